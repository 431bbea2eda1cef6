// language.hpp : grammar, chart parser, a-list digestion and compilation
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
// text --tokenize--> words --parse--> tree --digest--> a-list --compile-->
// rule | operator | focus item
//
// Acceptance and the longest viable prefix come from an Earley pass. The
// tree itself is the cheapest derivation: fewest productions, ties broken
// by comparing production ids in leftmost-derivation order.
//
///////////////////////////////////////////////////////////////////////////

#pragma once

#include <algorithm>
#include <cctype>
#include <deque>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "alia/directive_kind.hpp"
#include "alia/error.hpp"
#include "alia/inference.hpp"
#include "alia/memory.hpp"
#include "alia/policy.hpp"
#include "alia/semnet.hpp"

namespace alia {

///////////////////////////////////////////////////////////////////////////
//                                Grammar                                //
///////////////////////////////////////////////////////////////////////////

struct Symbol {
  std::string name;
  bool terminal = false;
  bool retained = false;
  std::string slot;
};

struct Production {
  int id = 0;
  std::string lhs;
  std::vector<Symbol> rhs;
};

inline bool is_nonterminal_name(std::string_view s) {
  if (s.empty() || !std::isupper(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isupper(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c)) || c == '-' ||
           c == '_';
  });
}

inline bool is_terminal_name(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::islower(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c)) || c == '\'' ||
           c == '-';
  });
}

class Grammar {
 public:
  //= Read the text format. throws ConfigError naming the line
  static Grammar parse(const std::string& text) {
    Grammar g;
    std::istringstream in(text);
    std::string line, lhs;
    int ln = 0, lhs_line = 0;
    auto fail = [&](int at, const std::string& m) { throw ConfigError("grammar line " + std::to_string(at) + ": " + m); };
    auto add_alt = [&](const std::string& alt, int at) {
      std::istringstream words(alt);
      std::string w;
      Production p;
      p.id = int(g.prods_.size());
      p.lhs = lhs;
      while (words >> w) {
        Symbol s;
        if (w[0] == '*') {
          s.retained = true;
          w.erase(0, 1);
        }
        if (auto c = w.find(':'); c != std::string::npos) {
          s.slot = w.substr(c + 1);
          w = w.substr(0, c);
          if (!is_nonterminal_name(s.slot)) fail(at, "bad slot name '" + s.slot + "'");
        }
        if (is_nonterminal_name(w)) {
          s.terminal = false;
        } else if (is_terminal_name(w)) {
          s.terminal = true;
          if (s.retained) fail(at, "terminal '" + w + "' cannot be retained");
        } else {
          fail(at, "bad symbol '" + w + "'");
        }
        s.name = w;
        p.rhs.push_back(std::move(s));
      }
      if (p.rhs.empty()) fail(at, "empty alternative for " + lhs);
      g.prods_.push_back(std::move(p));
    };
    auto add_alts = [&](const std::string& body, int at) {
      size_t start = 0;
      while (start <= body.size()) {
        size_t bar = body.find('|', start);
        std::string alt = body.substr(start, bar == std::string::npos ? std::string::npos : bar - start);
        if (alt.find_first_not_of(" \t") != std::string::npos) add_alt(alt, at);
        else if (bar != std::string::npos && bar + 1 < body.size() && start != 0) fail(at, "empty alternative");
        if (bar == std::string::npos) break;
        start = bar + 1;
      }
    };
    while (std::getline(in, line)) {
      ln++;
      if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
      auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos) continue;
      line = line.substr(first);
      while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
      if (line[0] == '|') {
        if (lhs.empty()) fail(ln, "continuation without a rule");
        add_alts(line.substr(1), ln);
        continue;
      }
      auto arrow = line.find("->");
      if (arrow == std::string::npos) fail(ln, "expected 'NT -> ...'");
      std::string name = line.substr(0, arrow);
      while (!name.empty() && std::isspace(static_cast<unsigned char>(name.back()))) name.pop_back();
      if (!is_nonterminal_name(name)) fail(ln, "bad nonterminal '" + name + "'");
      if (g.start_.empty()) g.start_ = name;
      lhs = name;
      lhs_line = ln;
      g.lines_[name] = ln;
      add_alts(line.substr(arrow + 2), ln);
    }
    (void)lhs_line;
    if (g.prods_.empty()) throw ConfigError("grammar is empty");
    g.index();
    g.validate();
    return g;
  }

  static Grammar load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open grammar " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
  }

  const std::string& start() const { return start_; }
  const std::vector<Production>& productions() const { return prods_; }
  const std::vector<int>& alternatives(const std::string& nt) const {
    static const std::vector<int> none;
    auto it = by_lhs_.find(nt);
    return it == by_lhs_.end() ? none : it->second;
  }

  //= Every terminal word the grammar knows.
  std::set<std::string> vocabulary() const {
    std::set<std::string> v;
    for (const Production& p : prods_)
      for (const Symbol& s : p.rhs)
        if (s.terminal) v.insert(s.name);
    return v;
  }

 private:
  void index() {
    for (const Production& p : prods_) by_lhs_[p.lhs].push_back(p.id);
  }

  //= Defined, reachable, productive and free of unit cycles.
  void validate() const {
    auto line_of = [&](const std::string& nt) { return std::to_string(lines_.at(nt)); };
    for (const Production& p : prods_)
      for (const Symbol& s : p.rhs)
        if (!s.terminal && !by_lhs_.count(s.name))
          throw ConfigError("grammar line " + line_of(p.lhs) + ": undefined nonterminal " + s.name);
    std::set<std::string> reach{start_};
    std::vector<std::string> todo{start_};
    while (!todo.empty()) {
      std::string nt = todo.back();
      todo.pop_back();
      for (int id : by_lhs_.at(nt))
        for (const Symbol& s : prods_[id].rhs)
          if (!s.terminal && reach.insert(s.name).second) todo.push_back(s.name);
    }
    for (const auto& kv : by_lhs_)
      if (!reach.count(kv.first))
        throw ConfigError("grammar line " + line_of(kv.first) + ": unreachable nonterminal " + kv.first);
    std::set<std::string> productive;
    bool grew = true;
    while (grew) {
      grew = false;
      for (const Production& p : prods_) {
        if (productive.count(p.lhs)) continue;
        bool ok = std::all_of(p.rhs.begin(), p.rhs.end(),
                              [&](const Symbol& s) { return s.terminal || productive.count(s.name) > 0; });
        if (ok) grew = productive.insert(p.lhs).second;
      }
    }
    for (const auto& kv : by_lhs_)
      if (!productive.count(kv.first))
        throw ConfigError("grammar line " + line_of(kv.first) + ": nonterminal derives no sentence: " + kv.first);
    // unit cycles would make the cheapest-tree search loop
    std::map<std::string, std::set<std::string>> unit;
    for (const Production& p : prods_)
      if (p.rhs.size() == 1 && !p.rhs[0].terminal) unit[p.lhs].insert(p.rhs[0].name);
    for (const auto& kv : unit) {
      std::set<std::string> seen;
      std::vector<std::string> st(kv.second.begin(), kv.second.end());
      while (!st.empty()) {
        std::string n = st.back();
        st.pop_back();
        if (n == kv.first)
          throw ConfigError("grammar line " + line_of(kv.first) + ": unit cycle through " + kv.first);
        if (!seen.insert(n).second) continue;
        if (unit.count(n)) st.insert(st.end(), unit[n].begin(), unit[n].end());
      }
    }
  }

  std::string start_;
  std::vector<Production> prods_;
  std::map<std::string, std::vector<int>> by_lhs_;
  std::map<std::string, int> lines_;
};

//= The built-in grammar (a copy of data/alia.gram).
inline const Grammar& default_grammar() {
  static const Grammar g = Grammar::parse(
#include "alia/default_grammar.inc"
  );
  return g;
}

///////////////////////////////////////////////////////////////////////////
//                                Parsing                                //
///////////////////////////////////////////////////////////////////////////

//= Lower-case words; punctuation other than apostrophes becomes space.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    unsigned char u = static_cast<unsigned char>(c);
    if (std::isalnum(u) || c == '\'') {
      cur += static_cast<char>(std::tolower(u));
    } else if (!cur.empty()) {
      out.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

inline std::string join(const std::vector<std::string>& w, size_t b = 0, size_t e = std::string::npos) {
  std::string s;
  e = std::min(e, w.size());
  for (size_t i = b; i < e; i++) {
    if (i > b) s += ' ';
    s += w[i];
  }
  return s;
}

struct ParseNode {
  std::string symbol;
  bool terminal = false;
  bool retained = false;
  std::string slot;
  int production = -1;
  size_t begin = 0, end = 0;
  std::vector<ParseNode> children;
};

struct ParseOutcome {
  bool accepted = false;
  std::vector<std::string> tokens;
  ParseNode tree;
  size_t prefix = 0;             ///< words that could start some sentence
  std::string diagnostic;
};

class Parser {
 public:
  explicit Parser(const Grammar& g) : g_(g) {}

  ParseOutcome parse(std::string_view text) const {
    ParseOutcome out;
    out.tokens = tokenize(text);
    if (out.tokens.empty()) {
      out.diagnostic = "empty input";
      return out;
    }
    auto [ok, prefix] = recognize(out.tokens);
    out.prefix = prefix;
    if (!ok) {
      out.diagnostic = prefix == out.tokens.size()
                           ? "incomplete sentence: \"" + join(out.tokens) + "\""
                           : "not understood after \"" + join(out.tokens, 0, prefix) + "\" at \"" +
                                 out.tokens[prefix] + "\"";
      if (prefix == 0 && prefix < out.tokens.size()) out.diagnostic = "not understood: \"" + out.tokens[0] + "\"";
      return out;
    }
    Search s(g_, out.tokens);
    auto best = s.symbol(Symbol{g_.start(), false, false, ""}, 0, out.tokens.size());
    out.tree = std::move(best->node);
    out.accepted = true;
    return out;
  }

  //= Earley recognition. returns (accepted, longest viable prefix)
  std::pair<bool, size_t> recognize(const std::vector<std::string>& w) const {
    struct Item {
      int prod;
      size_t dot, origin;
      bool operator<(const Item& o) const { return std::tie(prod, dot, origin) < std::tie(o.prod, o.dot, o.origin); }
    };
    const auto& P = g_.productions();
    size_t n = w.size();
    std::vector<std::vector<Item>> sets(n + 1);
    std::vector<std::set<Item>> seen(n + 1);
    auto add = [&](size_t k, Item it) {
      if (seen[k].insert(it).second) sets[k].push_back(it);
    };
    for (int id : g_.alternatives(g_.start())) add(0, {id, 0, 0});
    size_t prefix = 0;
    for (size_t k = 0; k <= n; k++) {
      if (!sets[k].empty()) prefix = k;
      for (size_t i = 0; i < sets[k].size(); i++) {
        Item it = sets[k][i];
        const Production& p = P[it.prod];
        if (it.dot == p.rhs.size()) {
          for (size_t j = 0; j < sets[it.origin].size(); j++) {
            Item up = sets[it.origin][j];
            const Production& q = P[up.prod];
            if (up.dot < q.rhs.size() && !q.rhs[up.dot].terminal && q.rhs[up.dot].name == p.lhs)
              add(k, {up.prod, up.dot + 1, up.origin});
          }
          continue;
        }
        const Symbol& s = p.rhs[it.dot];
        if (s.terminal) {
          if (k < n && w[k] == s.name) add(k + 1, {it.prod, it.dot + 1, it.origin});
        } else {
          for (int id : g_.alternatives(s.name)) add(k, {id, 0, k});
        }
      }
    }
    bool ok = false;
    for (const Item& it : sets[n])
      if (it.origin == 0 && it.dot == P[it.prod].rhs.size() && P[it.prod].lhs == g_.start()) ok = true;
    return {ok, ok ? n : std::min(prefix, n)};
  }

 private:
  struct Best {
    size_t count = 0;
    std::vector<int> order;   // production ids, leftmost derivation
    ParseNode node;
  };

  //= Memoized cheapest derivation of a symbol over a span.
  class Search {
   public:
    Search(const Grammar& g, const std::vector<std::string>& w) : g_(g), w_(w) {}

    const Best* symbol(const Symbol& s, size_t i, size_t j) {
      auto key = std::make_tuple(s.name, i, j);
      auto it = memo_.find(key);
      if (it == memo_.end()) it = memo_.emplace(key, compute(s.name, s.terminal, i, j)).first;
      if (!it->second) return nullptr;
      scratch_.push_back(*it->second);
      Best& b = scratch_.back();
      b.node.slot = s.slot;
      b.node.retained = s.retained;
      return &b;
    }

   private:
    static bool better(const Best& a, const Best& b) {
      if (a.count != b.count) return a.count < b.count;
      return a.order < b.order;
    }

    std::optional<Best> compute(const std::string& name, bool terminal, size_t i, size_t j) {
      if (terminal) {
        if (j != i + 1 || w_[i] != name) return std::nullopt;
        Best b;
        b.node.symbol = name;
        b.node.terminal = true;
        b.node.begin = i;
        b.node.end = j;
        return b;
      }
      std::optional<Best> best;
      for (int id : g_.alternatives(name)) {
        const Production& p = g_.productions()[id];
        if (p.rhs.size() > j - i) continue;
        std::vector<Best> kids;
        std::optional<Best> cand;
        seq(p, 0, i, j, kids, cand);
        if (cand && (!best || better(*cand, *best))) best = std::move(cand);
      }
      return best;
    }

    //= Try every split of [i,j) over rhs[k..]; keep the cheapest whole.
    void seq(const Production& p, size_t k, size_t i, size_t j, std::vector<Best>& kids, std::optional<Best>& best) {
      if (k == p.rhs.size()) {
        if (i != j) return;
        Best b;
        b.count = 1;
        b.order.push_back(p.id);
        b.node.symbol = p.lhs;
        b.node.production = p.id;
        b.node.begin = kids.empty() ? i : kids.front().node.begin;
        b.node.end = j;
        for (const Best& c : kids) {
          b.count += c.count;
          b.order.insert(b.order.end(), c.order.begin(), c.order.end());
          b.node.children.push_back(c.node);
        }
        if (!best || better(b, *best)) best = std::move(b);
        return;
      }
      size_t rest = p.rhs.size() - k - 1;   // each later symbol needs a word
      for (size_t m = i + 1; m + rest <= j; m++) {
        const Best* c = symbol(p.rhs[k], i, m);
        if (c == nullptr) continue;
        kids.push_back(*c);
        seq(p, k + 1, m, j, kids, best);
        kids.pop_back();
      }
    }

    const Grammar& g_;
    const std::vector<std::string>& w_;
    std::map<std::tuple<std::string, size_t, size_t>, std::optional<Best>> memo_;
    std::deque<Best> scratch_;
  };

  const Grammar& g_;
};

///////////////////////////////////////////////////////////////////////////
//                               Digestion                               //
///////////////////////////////////////////////////////////////////////////

struct Constituent {
  std::string label;
  std::vector<std::pair<std::string, std::string>> slots;
  std::vector<Constituent> parts;

  std::optional<std::string> get(const std::string& slot) const {
    for (const auto& [k, v] : slots)
      if (k == slot) return v;
    return std::nullopt;
  }

  std::vector<std::string> all(const std::string& slot) const {
    std::vector<std::string> out;
    for (const auto& [k, v] : slots)
      if (k == slot) out.push_back(v);
    return out;
  }
};

struct AList {
  std::vector<std::pair<std::string, std::string>> pairs;   ///< every slot in walk order
  Constituent root;

  //= "(OPER (ACTION OP-BODY-ACT=check OP-BODY-ARG=striped))"
  std::string bracketed() const {
    std::function<std::string(const Constituent&)> show = [&](const Constituent& c) {
      std::string s = "(" + c.label;
      for (const auto& [k, v] : c.slots) s += " " + k + "=" + (v.find(' ') != std::string::npos ? "\"" + v + "\"" : v);
      for (const Constituent& p : c.parts) s += " " + show(p);
      return s + ")";
    };
    return show(root);
  }
};

//= Walk the tree keeping slot fillers and retained constituents.
inline AList digest(const ParseNode& tree, const std::vector<std::string>& tokens) {
  AList a;
  a.root.label = tree.symbol;
  std::function<void(const ParseNode&, Constituent&)> walk = [&](const ParseNode& n, Constituent& cur) {
    Constituent* here = &cur;
    if (n.retained) {
      cur.parts.push_back(Constituent{n.symbol, {}, {}});
      here = &cur.parts.back();
    }
    if (!n.slot.empty()) {
      std::string v = join(tokens, n.begin, n.end);
      here->slots.emplace_back(n.slot, v);
      a.pairs.emplace_back(n.slot, v);
    }
    for (const ParseNode& c : n.children) walk(c, *here);
  };
  for (const ParseNode& c : tree.children) walk(c, a.root);
  return a;
}

///////////////////////////////////////////////////////////////////////////
//                              Compilation                              //
///////////////////////////////////////////////////////////////////////////

inline std::optional<double> hedge_value(const std::string& h) {
  static const std::map<std::string, double> table{
      {"usually", 0.8},    {"generally", 0.8}, {"typically", 0.8}, {"often", 0.8},   {"always", 1.0},
      {"sometimes", 0.5},  {"you could", 0.8}, {"you should", 0.8}, {"you must", 1.0}, {"you might", 0.5}};
  auto it = table.find(h);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

//= Plural class noun to its singular form.
inline std::string singular(std::string w) {
  if (w.size() > 3 && w.ends_with("ses")) return w.substr(0, w.size() - 2);
  if (w.size() > 1 && w.back() == 's') w.pop_back();
  return w;
}

enum class Category { rule, operator_, command, question, fact };

inline std::string_view to_string(Category c) {
  switch (c) {
    case Category::rule: return "rule";
    case Category::operator_: return "operator";
    case Category::command: return "command";
    case Category::question: return "question";
    case Category::fact: return "fact";
  }
  return "?";
}

struct Compiled {
  Category category = Category::command;
  std::optional<Rule> rule;
  std::optional<Operator> op;
  DirectiveKind focus_kind = DirectiveKind::DO;
  Graphlet focus;
  std::string provenance;   ///< normalized sentence
};

namespace detail {

/// Builds small graphlets with local names.
class Builder {
 public:
  Builder(Graphlet& g, std::string prefix) : g_(g), prefix_(std::move(prefix)) {}

  NodeId object(const NodeId& id) {
    if (!g_.contains(id)) g_.add_object(id);
    return id;
  }

  NodeId pred(const std::string& lex, const std::string& role, const NodeId& to, bool neg = false) {
    NodeId id(prefix_ + std::to_string(++n_));
    g_.add_predicate(id, lex, 1.0, neg);
    g_.add_link(id, role, to);
    return id;
  }

 private:
  Graphlet& g_;
  std::string prefix_;
  int n_ = 0;
};

inline const NodeId& var_x() {
  static const NodeId id("X");
  return id;
}

//= One ACTION constituent as a directive about subject.
inline DirectiveTemplate action(const Constituent& c, const NodeId& subject) {
  DirectiveTemplate d;
  Builder b(d.payload, "p");
  std::string act = c.get("OP-BODY-ACT").value_or("");
  std::string arg = c.get("OP-BODY-ARG").value_or("");
  if (act == "find out" || act == "determine") {
    d.kind = DirectiveKind::FIND;
    b.object(subject);
    if (arg == "what color") {
      NodeId q = b.pred("", "hq", subject);
      b.pred("color", "ako", q);
    } else if (arg == "what") {
      b.pred("", "ako", subject);
    } else {
      throw CompileError("OP-BODY-ARG", "cannot find out '" + arg + "'");
    }
  } else if (act == "check") {
    if (arg.empty()) throw CompileError("OP-BODY-ARG", "check needs a quality");
    d.kind = DirectiveKind::CHK;
    b.object(subject);
    b.pred(arg, "hq", subject);
  } else if (act == "say") {
    if (arg.empty()) throw CompileError("OP-BODY-ARG", "say needs a phrase");
    d.kind = DirectiveKind::DO;
    b.object(self_node());
    NodeId s = b.pred("say", "agt", self_node());
    b.pred(arg, "txt", s);
  } else if (!act.empty()) {
    d.kind = DirectiveKind::DO;
    b.object(self_node());
    NodeId v = b.pred(act, "agt", self_node());
    if (!arg.empty()) b.pred(arg, "mod", v);
  } else {
    throw CompileError("OP-BODY-ACT", "step has no act");
  }
  return d;
}

inline const Constituent* part(const Constituent& c, const std::string& label) {
  for (const Constituent& p : c.parts)
    if (p.label == label) return &p;
  return nullptr;
}

inline Rule compile_rule(const Constituent& r) {
  Rule rule;
  rule.belief = 1.0;
  if (auto h = r.get("HEDGE")) rule.belief = hedge_value(*h).value_or(1.0);
  const Constituent* q = part(r, "QRULE");
  const Constituent& src = q ? *q : r;
  if (auto h = src.get("HEDGE")) rule.belief = hedge_value(*h).value_or(1.0);
  Builder cb(rule.condition, "c"), rb(rule.conclusion, "r");
  NodeId x = cb.object(var_x());
  rb.object(x);
  if (q != nullptr) {
    // a quality of a quality: orange is a warm color
    std::string color = q->get("RULE-COND-HQ").value_or("");
    std::string temp = q->get("RULE-RES-HQ").value_or("");
    if (color.empty()) throw CompileError("RULE-COND-HQ", "missing quality");
    if (temp.empty()) throw CompileError("RULE-RES-HQ", "missing conclusion");
    NodeId c = cb.pred(color, "hq", x);
    Node shared = rule.condition.node(c);
    rule.conclusion.add_node(shared);
    rule.conclusion.add_link(c, "hq", x);
    rb.pred(temp, "hq", c);
    return rule;
  }
  for (const std::string& h : src.all("RULE-COND-HQ")) cb.pred(h, "hq", x);
  for (const std::string& k : src.all("RULE-COND-AKO")) cb.pred(singular(k), "ako", x);
  for (const std::string& k : src.all("RULE-RES-AKO")) rb.pred(singular(k), "ako", x);
  for (const std::string& h : src.all("RULE-RES-HQ")) rb.pred(h, "hq", x);
  if (rule.condition.size() == 1) throw CompileError("RULE-COND-HQ", "rule has no condition");
  if (rule.conclusion.size() == 1) throw CompileError("RULE-RES-AKO", "rule has no conclusion");
  return rule;
}

inline Operator compile_operator(const Constituent& o) {
  Operator op;
  if (auto h = o.get("HEDGE")) {
    auto v = hedge_value(*h);
    if (!v) throw CompileError("HEDGE", "unknown hedge '" + *h + "'");
    op.preference = *v;
  }
  const NodeId& x = var_x();
  size_t first_body = 0;
  if (const Constituent* cond = part(o, "COND")) {
    op.trigger_kind = DirectiveKind::NOTE;
    auto hq = cond->all("RULE-COND-HQ");
    auto ako = cond->all("RULE-COND-AKO");
    Builder tb(op.trigger, "t"), eb(op.enablement, "e");
    tb.object(x);
    if (!ako.empty()) {
      for (const std::string& k : ako) tb.pred(singular(k), "ako", x);
      if (!hq.empty()) {
        eb.object(x);
        for (const std::string& h : hq) eb.pred(h, "hq", x);
      }
    } else if (!hq.empty()) {
      tb.pred(hq[0], "hq", x);
      if (hq.size() > 1) {
        eb.object(x);
        for (size_t i = 1; i < hq.size(); i++) eb.pred(hq[i], "hq", x);
      }
    } else {
      throw CompileError("RULE-COND-HQ", "condition names nothing");
    }
    first_body = 1;
  } else {
    if (!o.get("OP-TRIG") || o.parts.empty() || o.parts[0].label != "ACTION")
      throw CompileError("OP-TRIG", "operator has no goal");
    DirectiveTemplate goal = action(o.parts[0], x);
    if (!can_trigger(goal.kind)) throw CompileError("OP-TRIG", "goal cannot trigger an operator");
    op.trigger_kind = goal.kind;
    op.trigger = goal.payload;
    first_body = 1;
  }
  for (size_t i = first_body; i < o.parts.size(); i++)
    if (o.parts[i].label == "ACTION") op.body.push_back(action(o.parts[i], x));
  if (op.body.empty()) throw CompileError("OP-BODY-ACT", "operator has no steps");
  return op;
}

//= Class or quality statement about a referent, for questions and facts.
inline Graphlet about(const Constituent& c, const NodeId& ref) {
  Graphlet g;
  Builder b(g, "p");
  b.object(ref);
  if (auto q = c.get("Q-PRED")) {
    if (*q == "what color") {
      NodeId p = b.pred("", "hq", ref);
      b.pred("color", "ako", p);
    } else {
      b.pred(*q, "hq", ref);
    }
  } else if (auto k = c.get("Q-CLASS")) {
    b.pred(*k == "what" ? "" : singular(*k), "ako", ref);
  } else {
    throw CompileError("Q-PRED", "nothing asked");
  }
  return g;
}

}  // namespace detail

//= Turn an a-list into a rule, an operator or a focus item.
// referent stands in for "it" in commands, questions and facts
// throws CompileError naming the slot at fault
inline Compiled compile(const AList& a, const std::vector<std::string>& tokens,
                        const std::optional<NodeId>& referent) {
  Compiled out;
  out.provenance = join(tokens);
  if (a.root.parts.empty()) throw CompileError("", "nothing to compile");
  const Constituent& top = a.root.parts[0];
  auto ref = [&]() -> NodeId {
    if (!referent) throw CompileError("REF", "nothing to refer to yet");
    return *referent;
  };
  if (top.label == "RULE") {
    out.category = Category::rule;
    out.rule = detail::compile_rule(top);
    out.rule->provenance = out.provenance;
  } else if (top.label == "OPER") {
    out.category = Category::operator_;
    out.op = detail::compile_operator(top);
    out.op->provenance = out.provenance;
  } else if (top.label == "CMD") {
    out.category = Category::command;
    const Constituent* act = detail::part(top, "ACTION");
    if (act == nullptr) throw CompileError("OP-BODY-ACT", "command has no action");
    std::string verb = act->get("OP-BODY-ACT").value_or("");
    bool about_thing = verb == "check" || verb == "find out" || verb == "determine";
    DirectiveTemplate d = detail::action(*act, about_thing ? ref() : self_node());
    out.focus_kind = d.kind;
    out.focus = d.payload;
  } else if (top.label == "YNQ") {
    out.category = Category::question;
    out.focus_kind = DirectiveKind::CHK;
    out.focus = detail::about(top, ref());
  } else if (top.label == "WHQ") {
    out.category = Category::question;
    out.focus_kind = DirectiveKind::FIND;
    out.focus = detail::about(top, ref());
  } else if (top.label == "FACT") {
    out.category = Category::fact;
    out.focus_kind = DirectiveKind::NOTE;
    out.focus = detail::about(top, ref());
  } else {
    throw CompileError("", "unknown sentence type " + top.label);
  }
  return out;
}

}  // namespace alia
