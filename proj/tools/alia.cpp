// alia.cpp : command line front end (repl, run, serve)
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
//   alia run   script.alia [--trace out.txt] [--record out.alia] [--snapshot out.json]
//   alia repl  [--step-mode] [--rate 10]
//   alia serve [--port 8080] [--static web/dist]
//
// Exit status: 0 ok, 1 a script assertion failed, 2 bad input or config.
//
///////////////////////////////////////////////////////////////////////////

#include <csignal>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "alia/engine.hpp"
#include "alia/language.hpp"
#include "alia/persist.hpp"
#include "alia/server.hpp"
#include "alia/shell.hpp"
#include "alia/world.hpp"

namespace {

struct Common {
  std::string grammar;
  std::string scenario;
  std::vector<std::string> kb;
  uint64_t seed = 1;
  int linger = 5;
};

std::unique_ptr<alia::Engine> make_engine(const Common& c) {
  alia::World w;
  if (!c.scenario.empty()) w = alia::load_scenario(c.scenario);
  alia::EngineConfig cfg;
  cfg.seed = c.seed;
  cfg.linger = c.linger;
  auto e = c.grammar.empty() ? std::make_unique<alia::Engine>(std::move(w), cfg)
                             : std::make_unique<alia::Engine>(std::move(w), cfg, alia::Grammar::load(c.grammar));
  for (const std::string& path : c.kb) alia::load_kb(alia::read_file(path), &e->rules(), &e->operators());
  return e;
}

void emit(const std::string& path, const std::string& text) {
  if (path == "-") std::cout << text;
  else alia::write_file(path, text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"alia: an advice-taking robot agent"};
  app.require_subcommand(1);
  app.fallthrough();
  Common c;
  app.add_option("--grammar", c.grammar, "instruction grammar file")->check(CLI::ExistingFile);
  app.add_option("--scenario", c.scenario, "world scenario file")->check(CLI::ExistingFile);
  app.add_option("--rules,--ops,--kb", c.kb, "rule/operator database files")->check(CLI::ExistingFile);
  app.add_option("--seed", c.seed, "agenda seed");
  app.add_option("--linger", c.linger, "cycles an unattended item stays in memory")->check(CLI::Range(0, 1000));

  auto* run = app.add_subcommand("run", "run a script and exit");
  std::string script, trace_out, record_out, snapshot_out;
  int extra = 0;
  bool quiet = false;
  run->add_option("script", script, "script file")->required()->check(CLI::ExistingFile);
  run->add_option("--cycles", extra, "cycles to run after the script")->check(CLI::NonNegativeNumber);
  run->add_option("--trace", trace_out, "write the trace log ('-' for stdout)");
  run->add_option("--record", record_out, "write the session as a replayable script");
  run->add_option("--snapshot", snapshot_out, "write the final state snapshot as JSON");
  run->add_flag("-q,--quiet", quiet, "print nothing but failures");

  auto* repl = app.add_subcommand("repl", "interactive session");
  alia::ReplOptions ropt;
  bool step_mode = false;
  std::string repl_record;
  repl->add_flag("--step-mode", step_mode, "cycle only on input instead of in real time");
  repl->add_option("--rate", ropt.rate, "cycles per second")->check(CLI::PositiveNumber);
  repl->add_option("--settle", ropt.settle, "cycles run after each line in step mode");
  repl->add_flag("--trace", ropt.show_trace, "print trace lines as they happen");
  repl->add_option("--record", repl_record, "write the session as a script on exit");

  auto* serve = app.add_subcommand("serve", "HTTP/WebSocket service for the dashboard");
  unsigned short port = 8080;
  std::string address = "127.0.0.1", static_root;
  double rate = 10;
  bool paused = false;
  serve->add_option("--port", port, "listen port (0 picks one)");
  serve->add_option("--address", address, "listen address");
  serve->add_option("--static", static_root, "dashboard bundle directory")->check(CLI::ExistingDirectory);
  serve->add_option("--rate", rate, "cycles per second")->check(CLI::PositiveNumber);
  serve->add_flag("--paused", paused, "start paused");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : alia::kExitConfig;
  }

  try {
    auto engine = make_engine(c);

    if (*run) {
      auto r = alia::run_script(*engine, alia::read_file(script), std::filesystem::path(script).parent_path(),
                                quiet ? nullptr : &std::cerr);
      engine->run(extra);
      if (!trace_out.empty()) emit(trace_out, engine->trace_text());
      if (!record_out.empty()) emit(record_out, alia::export_script(*engine));
      if (!snapshot_out.empty()) emit(snapshot_out, engine->snapshot().dump(2) + "\n");
      if (!quiet)
        for (const auto& t : engine->transcript())
          if (t.speaker == "agent") std::cout << "agent: " << t.text << "\n";
      if (quiet)
        for (const auto& f : r.failures) std::cerr << "FAILED " << f << "\n";
      return r.exit_code;
    }

    if (*repl) {
      ropt.realtime = !step_mode;
      alia::Repl loop(*engine, std::cout, ropt);
      int rc = loop.run(std::cin);
      if (!repl_record.empty()) alia::write_file(repl_record, alia::export_script(*engine));
      return rc;
    }

    alia::service::Runner runner(*engine, rate, paused);
    alia::service::Server server(runner, port, static_root, address);
    runner.start();
    server.start(2);
    std::cerr << "listening on http://" << address << ":" << server.port() << "\n";
    sigset_t set;
    sigemptyset(&set);
    sigaddset(&set, SIGINT);
    sigaddset(&set, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set, nullptr);
    int sig = 0;
    sigwait(&set, &sig);
    server.stop();
    runner.stop();
    return alia::kExitOk;
  } catch (const alia::ConfigError& e) {
    std::cerr << "alia: " << e.what() << "\n";
    return alia::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "alia: " << e.what() << "\n";
    return alia::kExitConfig;
  }
}
