// persist.hpp : rule and operator database files
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
// Both databases share one container. Section lines start in column 0,
// graphlet lines (semnet dump format) are indented two spaces:
//
//   rule <belief> "<sentence>"
//   condition
//     X object "" 1.000 0
//     ...
//   conclusion
//     ...
//   end
//
//   operator <KIND> <preference> "<sentence>"
//   trigger
//     ...
//   enablement
//     ...
//   step <KIND> [function]
//     ...
//   end
//
///////////////////////////////////////////////////////////////////////////

#pragma once

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "alia/directive_kind.hpp"
#include "alia/error.hpp"
#include "alia/inference.hpp"
#include "alia/policy.hpp"
#include "alia/semnet.hpp"

namespace alia {

namespace detail {

inline std::string exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void put_graphlet(std::ostringstream& os, const char* header, const Graphlet& g) {
  os << header << "\n";
  std::istringstream in(dump(g));
  std::string line;
  while (std::getline(in, line)) os << "  " << line << "\n";
}

/// Line reader that knows its position.
class KbReader {
 public:
  explicit KbReader(const std::string& text) : in_(text) {}

  //= Next non-blank, non-comment line; false at end.
  bool next(std::string& line) {
    if (held_) {
      line = *held_;
      held_.reset();
      return true;
    }
    while (std::getline(in_, line)) {
      ln_++;
      auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
      return true;
    }
    return false;
  }

  void unread(const std::string& line) { held_ = line; }

  //= Indented block following a section line.
  Graphlet graphlet() {
    std::string text, line;
    while (next(line)) {
      if (line.rfind("  ", 0) != 0) {
        unread(line);
        break;
      }
      text += line.substr(2) + "\n";
    }
    try {
      return parse_dump(text);
    } catch (const StructuralError& e) {
      fail(e.what());
    }
  }

  [[noreturn]] void fail(const std::string& m) const {
    throw ConfigError("kb line " + std::to_string(ln_) + ": " + m);
  }

 private:
  std::istringstream in_;
  std::optional<std::string> held_;
  int ln_ = 0;
};

//= Split `word word "quoted text"` into words and the unquoted tail.
inline std::pair<std::vector<std::string>, std::string> header(const std::string& line) {
  std::vector<std::string> words;
  std::string quoted;
  size_t q = line.find('"');
  std::istringstream ws(line.substr(0, q));
  std::string w;
  while (ws >> w) words.push_back(w);
  if (q != std::string::npos) {
    for (size_t i = q + 1; i < line.size() && line[i] != '"'; i++) {
      if (line[i] == '\\' && i + 1 < line.size()) i++;
      quoted += line[i];
    }
  }
  return {words, quoted};
}

inline double kb_number(const std::string& s, const KbReader& r) {
  try {
    size_t used = 0;
    double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  r.fail("expected a number, got '" + s + "'");
}

inline DirectiveKind kb_kind(const std::string& s, const KbReader& r) {
  auto k = directive_from_string(s);
  if (!k) r.fail("unknown directive kind '" + s + "'");
  return *k;
}

}  // namespace detail

inline std::string save_rules(const RuleBase& rules) {
  std::ostringstream os;
  for (const Rule& r : rules.rules()) {
    os << "rule " << detail::exact(r.belief) << " " << detail::quote(r.provenance) << "\n";
    detail::put_graphlet(os, "condition", r.condition);
    detail::put_graphlet(os, "conclusion", r.conclusion);
    os << "end\n";
  }
  return os.str();
}

inline std::string save_operators(const OperatorStore& ops, const std::set<int>& skip = {}) {
  std::ostringstream os;
  for (const Operator& o : ops.operators()) {
    if (skip.count(o.id)) continue;
    os << "operator " << to_string(o.trigger_kind) << " " << detail::exact(o.preference) << " "
       << detail::quote(o.provenance) << "\n";
    detail::put_graphlet(os, "trigger", o.trigger);
    if (!o.enablement.empty()) detail::put_graphlet(os, "enablement", o.enablement);
    for (const DirectiveTemplate& d : o.body) {
      std::string h = "step " + std::string(to_string(d.kind)) + (d.fn.empty() ? "" : " " + d.fn);
      detail::put_graphlet(os, h.c_str(), d.payload);
    }
    os << "end\n";
  }
  return os.str();
}

//= Add every rule and operator in text. returns (rules, operators) read
// throws ConfigError naming the line; StructuralError from validation
// is reported the same way
inline std::pair<int, int> load_kb(const std::string& text, RuleBase* rules, OperatorStore* ops) {
  detail::KbReader rd(text);
  std::string line;
  int nr = 0, no = 0;
  while (rd.next(line)) {
    auto [w, quoted] = detail::header(line);
    if (w.empty()) rd.fail("unexpected '" + line + "'");
    if (w[0] == "rule" && w.size() == 2) {
      Rule r;
      r.belief = detail::kb_number(w[1], rd);
      r.provenance = quoted;
      std::string sec;
      while (rd.next(sec) && sec != "end") {
        if (sec == "condition") r.condition = rd.graphlet();
        else if (sec == "conclusion") r.conclusion = rd.graphlet();
        else rd.fail("unexpected '" + sec + "' in rule");
      }
      if (sec != "end") rd.fail("rule not closed with 'end'");
      if (rules == nullptr) continue;
      try {
        rules->add(std::move(r));
      } catch (const StructuralError& e) {
        rd.fail(e.what());
      }
      nr++;
    } else if (w[0] == "operator" && w.size() == 3) {
      Operator o;
      o.trigger_kind = detail::kb_kind(w[1], rd);
      o.preference = detail::kb_number(w[2], rd);
      o.provenance = quoted;
      std::string sec;
      while (rd.next(sec) && sec != "end") {
        auto [sw, sq] = detail::header(sec);
        if (sec == "trigger") {
          o.trigger = rd.graphlet();
        } else if (sec == "enablement") {
          o.enablement = rd.graphlet();
        } else if (!sw.empty() && sw[0] == "step" && (sw.size() == 2 || sw.size() == 3)) {
          DirectiveTemplate d;
          d.kind = detail::kb_kind(sw[1], rd);
          if (sw.size() == 3) d.fn = sw[2];
          d.payload = rd.graphlet();
          o.body.push_back(std::move(d));
        } else {
          rd.fail("unexpected '" + sec + "' in operator");
        }
      }
      if (sec != "end") rd.fail("operator not closed with 'end'");
      if (ops == nullptr) continue;
      try {
        ops->add(std::move(o));
      } catch (const StructuralError& e) {
        rd.fail(e.what());
      }
      no++;
    } else {
      rd.fail("unexpected '" + line + "'");
    }
  }
  return {nr, no};
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << text;
}

}  // namespace alia
