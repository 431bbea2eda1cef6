// shell.hpp : scripted runs, session recording and the interactive loop
//
///////////////////////////////////////////////////////////////////////////
//
// Copyright 2026 The alia-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
///////////////////////////////////////////////////////////////////////////
//
// Script lines ('#' comments and blank lines are skipped):
//
//   say: <utterance>          instruct the agent
//   wait: <n>                 run n cycles
//   assert: <regex>           some trace line so far matches
//   refute: <regex>           no trace line so far matches
//   seed: <n>                 reseed the agenda generator
//   scenario: <path>          load a scenario (relative to the script)
//
///////////////////////////////////////////////////////////////////////////

#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <regex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "alia/engine.hpp"
#include "alia/error.hpp"
#include "alia/persist.hpp"
#include "alia/world.hpp"

namespace alia {

enum ExitCode { kExitOk = 0, kExitAssert = 1, kExitConfig = 2 };

struct ScriptResult {
  int exit_code = kExitOk;
  std::vector<std::string> failures;   ///< "line N: assert ..." per failed check
};

namespace detail {

inline bool any_line(const std::vector<TraceEvent>& trace, const std::regex& re) {
  for (const TraceEvent& e : trace)
    if (std::regex_search(e.line(), re)) return true;
  return false;
}

}  // namespace detail

//= Run script text against the engine.
// throws ConfigError("script line N: ...") for a malformed line
inline ScriptResult run_script(Engine& e, const std::string& text, const std::filesystem::path& base = ".",
                               std::ostream* echo = nullptr) {
  ScriptResult r;
  std::istringstream in(text);
  std::string line;
  int ln = 0;
  while (std::getline(in, line)) {
    ln++;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    line = line.substr(first);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    auto colon = line.find(':');
    auto fail = [&](const std::string& m) { throw ConfigError("script line " + std::to_string(ln) + ": " + m); };
    if (colon == std::string::npos) fail("expected 'key: value'");
    std::string key = line.substr(0, colon);
    std::string arg = line.substr(colon + 1);
    arg.erase(0, arg.find_first_not_of(' '));
    auto count = [&]() -> long long {
      try {
        size_t used = 0;
        long long n = std::stoll(arg, &used);
        if (used == arg.size() && n >= 0) return n;
      } catch (const std::exception&) {
      }
      fail("expected a non-negative count, got '" + arg + "'");
      return 0;
    };
    if (key == "say") {
      InstructionResult ir = e.instruct(arg);
      if (echo != nullptr && !ir.ok) *echo << "rejected: " << ir.diagnostic << "\n";
    } else if (key == "wait") {
      e.run(int(count()));
    } else if (key == "seed") {
      e.reseed(uint64_t(count()));
    } else if (key == "scenario") {
      std::filesystem::path p = base / arg;
      try {
        e.load_world(load_scenario(p), arg);
      } catch (const ConfigError& err) {
        fail(err.what());
      }
    } else if (key == "assert" || key == "refute") {
      std::regex re;
      try {
        re = std::regex(arg);
      } catch (const std::regex_error&) {
        fail("bad pattern '" + arg + "'");
      }
      bool seen = detail::any_line(e.trace(), re);
      if (seen != (key == "assert")) {
        r.failures.push_back("line " + std::to_string(ln) + ": " + key + " " + arg);
        r.exit_code = kExitAssert;
        if (echo != nullptr) *echo << "FAILED " << r.failures.back() << "\n";
      }
    } else {
      fail("unknown key '" + key + "'");
    }
  }
  return r;
}

//= The session so far as a script that replays it exactly.
inline std::string export_script(const Engine& e) {
  std::ostringstream os;
  os << "# recorded session, " << e.cycle() << " cycles\n";
  int at = 0;
  for (const TranscriptLine& t : e.transcript()) {
    if (t.speaker != "user" && t.speaker != "control") continue;
    if (t.cycle > at) os << "wait: " << (t.cycle - at) << "\n";
    at = t.cycle;
    if (t.speaker == "user") {
      os << "say: " << t.text << "\n";
    } else {
      auto sp = t.text.find(' ');
      os << t.text.substr(0, sp) << ": " << t.text.substr(sp + 1) << "\n";
    }
  }
  if (e.cycle() > at) os << "wait: " << (e.cycle() - at) << "\n";
  return os.str();
}

///////////////////////////////////////////////////////////////////////////
//                            interactive loop                           //
///////////////////////////////////////////////////////////////////////////

struct ReplOptions {
  bool realtime = true;     ///< keep cycling between lines
  double rate = 10;         ///< cycles per second when realtime
  int settle = 0;           ///< cycles run after each line when not realtime
  bool show_trace = false;
  std::string prompt = "> ";
};

class Repl {
 public:
  Repl(Engine& e, std::ostream& out, ReplOptions opt) : e_(e), out_(out), opt_(std::move(opt)) {}

  //= Read lines until end of input or ":quit". returns exit status
  int run(std::istream& in) {
    if (!opt_.realtime) {
      std::string line;
      prompt();
      while (std::getline(in, line)) {
        if (!handle(line)) break;
        e_.run(opt_.settle);
        flush();
        prompt();
      }
      return kExitOk;
    }
    struct Shared {
      std::mutex m;
      std::condition_variable cv;
      std::deque<std::string> lines;
      bool eof = false;
    };
    auto sh = std::make_shared<Shared>();
    // detached: it may stay blocked on input after we return
    std::thread([sh, &in] {
      std::string line;
      while (std::getline(in, line)) {
        std::lock_guard lk(sh->m);
        sh->lines.push_back(line);
        sh->cv.notify_one();
      }
      std::lock_guard lk(sh->m);
      sh->eof = true;
      sh->cv.notify_one();
    }).detach();
    auto period = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
        std::chrono::duration<double>(1.0 / std::max(opt_.rate, 0.1)));
    auto due = std::chrono::steady_clock::now();
    prompt();
    bool going = true;
    while (going) {
      std::unique_lock lk(sh->m);
      sh->cv.wait_until(lk, due, [&] { return !sh->lines.empty() || sh->eof; });
      std::deque<std::string> batch;
      batch.swap(sh->lines);
      bool done = sh->eof;
      lk.unlock();
      for (const std::string& l : batch) {
        if (!handle(l)) {
          going = false;
          break;
        }
        prompt();
      }
      if (!going || (done && batch.empty())) break;
      if (std::chrono::steady_clock::now() >= due) {
        if (!paused_) e_.step();
        due += period;
      }
      flush();
    }
    flush();
    return kExitOk;
  }

 private:
  void prompt() {
    if (!opt_.prompt.empty()) out_ << opt_.prompt << std::flush;
  }

  //= Print agent speech, rejections and (optionally) trace lines since last time.
  void flush() {
    const auto& tr = e_.transcript();
    for (; said_ < tr.size(); said_++) {
      const TranscriptLine& t = tr[said_];
      if (t.speaker == "agent") out_ << "agent: " << t.text << "\n";
      if (t.speaker == "system") out_ << "?? " << t.text << "\n";
    }
    if (opt_.show_trace) {
      out_ << e_.trace_text(traced_);
    }
    traced_ = e_.trace().size();
    out_ << std::flush;
  }

  bool handle(const std::string& raw) {
    std::string line = raw;
    line.erase(0, line.find_first_not_of(" \t\r"));
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty()) return true;
    if (line[0] != ':') {
      InstructionResult r = e_.instruct(line);
      if (r.ok) out_ << "ok: " << r.badge << (r.id ? " " + std::to_string(r.id) : "") << "\n";
      flush();
      return true;
    }
    std::istringstream ws(line.substr(1));
    std::string cmd, arg;
    ws >> cmd;
    std::getline(ws >> std::ws, arg);
    try {
      if (cmd == "quit" || cmd == "q") return false;
      if (cmd == "pause") paused_ = true;
      else if (cmd == "resume") paused_ = false;
      else if (cmd == "step") e_.run(arg.empty() ? 1 : std::stoi(arg));
      else if (cmd == "memory") out_ << e_.memory().export_text(e_.cycle());
      else if (cmd == "trees") out_ << e_.director().text();
      else if (cmd == "rules") out_ << save_rules(e_.rules());
      else if (cmd == "ops") out_ << save_operators(e_.operators(), e_.kernel_operators());
      else if (cmd == "world") out_ << world_text();
      else if (cmd == "trace") opt_.show_trace = (arg != "off");
      else if (cmd == "seed") e_.reseed(std::stoull(arg));
      else if (cmd == "save-rules") write_file(arg, save_rules(e_.rules()));
      else if (cmd == "save-ops") write_file(arg, save_operators(e_.operators(), e_.kernel_operators()));
      else if (cmd == "record") write_file(arg, export_script(e_));
      else out_ << help();
    } catch (const std::exception& ex) {
      out_ << "?? " << ex.what() << "\n";
    }
    flush();
    return true;
  }

  std::string world_text() const {
    std::ostringstream os;
    const World& w = e_.world();
    os << "cycle " << e_.cycle() << " robot " << w.robot.pos.x << " " << w.robot.pos.y << " heading "
       << w.robot.heading << "\n";
    for (const WorldObject& o : w.objects) {
      auto [d, b] = range_bearing(w.robot, o);
      os << "  " << o.name << " at " << o.pos.x << " " << o.pos.y << " range " << d << " bearing " << b
         << (o.tracked ? " as " + o.tracked->name : "") << "\n";
    }
    return os.str();
  }

  static std::string help() {
    return ":pause :resume :step [n] :memory :trees :world :rules :ops :trace [off]\n"
           ":seed n :save-rules path :save-ops path :record path :quit\n";
  }

  Engine& e_;
  std::ostream& out_;
  ReplOptions opt_;
  bool paused_ = false;
  size_t said_ = 0;
  size_t traced_ = 0;
};

}  // namespace alia
