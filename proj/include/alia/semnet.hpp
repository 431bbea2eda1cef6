// semnet.hpp : semantic network graphlets and binding-based matcher
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
// A graphlet is a small closed network of object nodes and predicate
// nodes. Predicates point at their arguments through role-labeled links,
// so "obj-1 <-hq- orange <-ako- color" is three nodes and two links:
// the "orange" predicate has an hq link to obj-1 and the "color"
// predicate has an ako link to the "orange" predicate.
//
///////////////////////////////////////////////////////////////////////////

#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <compare>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "alia/error.hpp"

namespace alia {

///////////////////////////////////////////////////////////////////////////
//                              Basic Types                              //
///////////////////////////////////////////////////////////////////////////

/// Opaque node name. Only used for identity and debugging output.
struct NodeId {
  std::string name;

  NodeId() = default;
  explicit NodeId(std::string n) : name(std::move(n)) {}

  bool empty() const { return name.empty(); }
  auto operator<=>(const NodeId&) const = default;
};

inline std::ostream& operator<<(std::ostream& os, const NodeId& id) { return os << id.name; }

struct NodeIdHash {
  size_t operator()(const NodeId& id) const noexcept { return std::hash<std::string>{}(id.name); }
};

enum class NodeKind { object, predicate };

inline std::string_view to_string(NodeKind k) { return (k == NodeKind::object) ? "object" : "predicate"; }

struct Node {
  NodeId id;
  NodeKind kind = NodeKind::object;
  std::string lex;        ///< empty when the node has no lexical term
  double belief = 1.0;
  bool negated = false;

  bool is_object() const { return kind == NodeKind::object; }
  bool is_predicate() const { return kind == NodeKind::predicate; }
};

struct RoleLink {
  NodeId from;            ///< always a predicate
  std::string role;
  NodeId to;

  bool operator==(const RoleLink&) const = default;
};

/// Pattern node -> memory node.
using Binding = std::map<NodeId, NodeId>;

/// Stable text form of a binding, e.g. "{x-1=obj-1, y-2=hq-3}".
inline std::string to_string(const Binding& b) {
  std::string out = "{";
  bool first = true;
  for (const auto& [k, v] : b) {
    if (!first) out += ", ";
    out += k.name + "=" + v.name;
    first = false;
  }
  return out + "}";
}

///////////////////////////////////////////////////////////////////////////
//                            Role Registry                              //
///////////////////////////////////////////////////////////////////////////

/// The finite set of argument roles a predicate may use.
///   hq  = has quality      ako = a kind of
///   agt = agent of action  obj = object of action
///   mod = modifier         txt = literal text
inline const std::set<std::string, std::less<>>& role_registry() {
  static const std::set<std::string, std::less<>> roles{"hq", "ako", "agt", "obj", "mod", "txt"};
  return roles;
}

inline bool known_role(std::string_view role) { return role_registry().count(role) > 0; }

/// Lowercase and collapse runs of whitespace to single spaces.
inline std::string normalize_lex(std::string_view s) {
  std::string out;
  bool space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = !out.empty();
      continue;
    }
    if (space) out += ' ';
    space = false;
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

inline double clamp_belief(double b) { return std::clamp(b, 0.0, 1.0); }

///////////////////////////////////////////////////////////////////////////
//                               Graphlet                                //
///////////////////////////////////////////////////////////////////////////

class Graphlet {
 public:
  Graphlet() = default;

  //= Add a node. Lexical terms are normalized and belief clamped.
  // throws StructuralError on a duplicate id
  Node& add_node(Node n) {
    if (n.id.empty()) throw StructuralError("node with empty id");
    if (index_.count(n.id) > 0) throw StructuralError("duplicate node " + n.id.name);
    n.lex = normalize_lex(n.lex);
    n.belief = clamp_belief(n.belief);
    index_.emplace(n.id, nodes_.size());
    nodes_.push_back(std::move(n));
    out_.emplace_back();
    in_.emplace_back();
    return nodes_.back();
  }

  Node& add_object(const NodeId& id) { return add_node(Node{id, NodeKind::object, "", 1.0, false}); }

  Node& add_predicate(const NodeId& id, std::string_view lex, double belief = 1.0, bool negated = false) {
    return add_node(Node{id, NodeKind::predicate, std::string(lex), belief, negated});
  }

  //= Add a role link from a predicate to another member node.
  // exact duplicates are ignored
  void add_link(const NodeId& from, std::string_view role, const NodeId& to) {
    auto fi = index_.find(from);
    auto ti = index_.find(to);
    if (fi == index_.end() || ti == index_.end())
      throw StructuralError("link endpoint not in graphlet: " + from.name + " -" + std::string(role) + "-> " + to.name);
    if (!nodes_[fi->second].is_predicate()) throw StructuralError("link from object node " + from.name);
    if (!known_role(role)) throw StructuralError("unregistered role " + std::string(role));
    if (has_link(from, role, to)) return;
    out_[fi->second].push_back(links_.size());
    in_[ti->second].push_back(links_.size());
    links_.push_back(RoleLink{from, std::string(role), to});
  }

  bool contains(const NodeId& id) const { return index_.count(id) > 0; }

  const Node* find(const NodeId& id) const {
    auto it = index_.find(id);
    return (it == index_.end()) ? nullptr : &nodes_[it->second];
  }

  Node* find(const NodeId& id) {
    auto it = index_.find(id);
    return (it == index_.end()) ? nullptr : &nodes_[it->second];
  }

  const Node& node(const NodeId& id) const {
    const Node* n = find(id);
    if (n == nullptr) throw LookupError("no node " + id.name);
    return *n;
  }

  std::optional<size_t> index_of(const NodeId& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::span<const Node> nodes() const { return nodes_; }
  std::span<const RoleLink> links() const { return links_; }
  const Node& node_at(size_t i) const { return nodes_[i]; }
  const RoleLink& link_at(size_t i) const { return links_[i]; }

  /// Indices of links leaving / entering the node at index i.
  const std::vector<size_t>& out_links(size_t i) const { return out_[i]; }
  const std::vector<size_t>& in_links(size_t i) const { return in_[i]; }

  std::vector<RoleLink> links_from(const NodeId& id) const {
    std::vector<RoleLink> r;
    if (auto i = index_of(id))
      for (size_t li : out_[*i]) r.push_back(links_[li]);
    return r;
  }

  std::vector<RoleLink> links_to(const NodeId& id) const {
    std::vector<RoleLink> r;
    if (auto i = index_of(id))
      for (size_t li : in_[*i]) r.push_back(links_[li]);
    return r;
  }

  bool has_link(const NodeId& from, std::string_view role, const NodeId& to) const {
    auto fi = index_.find(from);
    if (fi == index_.end()) return false;
    for (size_t li : out_[fi->second])
      if (links_[li].role == role && links_[li].to == to) return true;
    return false;
  }

  bool empty() const { return nodes_.empty(); }
  size_t size() const { return nodes_.size(); }

  //= Add every node and link of other not already present (by id).
  void merge(const Graphlet& other) {
    for (const Node& n : other.nodes_)
      if (!contains(n.id)) add_node(n);
    for (const RoleLink& l : other.links_) add_link(l.from, l.role, l.to);
  }

  //= Remove the given nodes and every link touching them.
  void erase(const std::set<NodeId>& doomed) {
    if (doomed.empty()) return;
    Graphlet keep;
    for (const Node& n : nodes_)
      if (doomed.count(n.id) == 0) keep.add_node(n);
    for (const RoleLink& l : links_)
      if (doomed.count(l.from) == 0 && doomed.count(l.to) == 0) keep.add_link(l.from, l.role, l.to);
    *this = std::move(keep);
  }

  //= Every link endpoint is a member and every predicate has an argument.
  bool closed() const {
    for (const RoleLink& l : links_)
      if (!contains(l.from) || !contains(l.to)) return false;
    for (size_t i = 0; i < nodes_.size(); i++)
      if (nodes_[i].is_predicate() && out_[i].empty()) return false;
    return true;
  }

 private:
  std::vector<Node> nodes_;
  std::vector<RoleLink> links_;
  std::vector<std::vector<size_t>> out_, in_;
  std::unordered_map<NodeId, size_t, NodeIdHash> index_;
};

///////////////////////////////////////////////////////////////////////////
//                              Node Naming                              //
///////////////////////////////////////////////////////////////////////////

/// Hands out debug-friendly unique names like "obj-1" or "orange-3".
/// Each stem has its own counter and counters never go backwards.
class NameGen {
 public:
  NodeId next(std::string_view stem) {
    std::string s(stem.empty() ? "node" : stem);
    int n = ++counters_[s];
    return NodeId(s + "-" + std::to_string(n));
  }

  //= Name derived from the lexical term if any, else from the node kind.
  NodeId fresh(const Node& proto) { return next(stem_for(proto)); }

  static std::string stem_for(const Node& proto) {
    std::string stem;
    for (char c : proto.lex) {
      if (stem.size() >= 12) break;
      if (std::isalnum(static_cast<unsigned char>(c)))
        stem += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      else if (c == ' ' || c == '_' || c == '-')
        stem += '_';
    }
    if (stem.empty()) stem = proto.is_object() ? "obj" : "pred";
    return stem;
  }

 private:
  std::map<std::string, int, std::less<>> counters_;
};

///////////////////////////////////////////////////////////////////////////
//                                Matcher                                //
///////////////////////////////////////////////////////////////////////////

/// Belief level at which a fact counts as believed.
inline constexpr double kDefaultMinBelief = 0.5;

/// Backtracking subgraph matcher. Every pattern node is a variable; seed
/// bindings pin some of them in advance. Predicate nodes bind injectively,
/// object nodes may share a store node.
class Matcher {
 public:
  Matcher(const Graphlet& pattern, const Graphlet& store, double min_belief)
      : pat_(pattern), st_(store), min_blf_(min_belief) {}

  //= Call fn(binding) for every complete match; stop early if fn returns false.
  // enumeration order depends only on pattern and store insertion order
  void run(const Binding& seed, const std::function<bool(const Binding&)>& fn) {
    size_t np = pat_.size();
    assign_.assign(np, kNone);
    used_.assign(st_.size(), 0);
    fn_ = &fn;
    stop_ = false;

    // pin seeded pattern nodes first
    for (size_t p = 0; p < np; p++) {
      auto it = seed.find(pat_.node_at(p).id);
      if (it == seed.end()) continue;
      auto s = st_.index_of(it->second);
      if (!s || !consistent(p, *s)) return;
      bind(p, *s);
    }
    plan();
    extend(0);
  }

 private:
  static constexpr size_t kNone = static_cast<size_t>(-1);

  enum class Source { in_link, out_link, scan };

  struct Step {
    size_t node;
    Source src;
    size_t anchor;       // pattern node already bound when this step runs
    std::string role;
  };

  //= Choose an order for unbound pattern nodes so that most nodes are
  //  reached through a link from something already bound.
  void plan() {
    size_t np = pat_.size();
    std::vector<bool> bound(np);
    for (size_t p = 0; p < np; p++) bound[p] = (assign_[p] != kNone);
    steps_.clear();
    while (true) {
      std::optional<Step> pick;
      for (size_t p = 0; p < np && !pick; p++) {
        if (bound[p]) continue;
        // predicate whose argument is bound
        for (size_t li : pat_.out_links(p)) {
          const RoleLink& l = pat_.link_at(li);
          size_t t = *pat_.index_of(l.to);
          if (bound[t]) {
            pick = Step{p, Source::in_link, t, l.role};
            break;
          }
        }
        if (pick) break;
        // argument of a bound predicate
        for (size_t li : pat_.in_links(p)) {
          const RoleLink& l = pat_.link_at(li);
          size_t f = *pat_.index_of(l.from);
          if (bound[f]) {
            pick = Step{p, Source::out_link, f, l.role};
            break;
          }
        }
      }
      if (!pick) {
        // nothing reachable: prefer a node with a lexical term
        for (size_t p = 0; p < np && !pick; p++)
          if (!bound[p] && !pat_.node_at(p).lex.empty()) pick = Step{p, Source::scan, kNone, ""};
        for (size_t p = 0; p < np && !pick; p++)
          if (!bound[p]) pick = Step{p, Source::scan, kNone, ""};
      }
      if (!pick) break;
      bound[pick->node] = true;
      steps_.push_back(*pick);
    }
  }

  void extend(size_t k) {
    if (stop_) return;
    if (k == steps_.size()) {
      Binding b;
      for (size_t p = 0; p < pat_.size(); p++) b.emplace(pat_.node_at(p).id, st_.node_at(assign_[p]).id);
      if (!(*fn_)(b)) stop_ = true;
      return;
    }
    const Step& step = steps_[k];
    auto attempt = [&](size_t s) {
      if (stop_ || !consistent(step.node, s)) return;
      bind(step.node, s);
      extend(k + 1);
      unbind(step.node);
    };
    if (step.src == Source::in_link) {
      // candidates: predicates linking to the anchor's mate with this role
      for (size_t li : st_.in_links(assign_[step.anchor])) {
        const RoleLink& l = st_.link_at(li);
        if (l.role == step.role) attempt(*st_.index_of(l.from));
      }
    } else if (step.src == Source::out_link) {
      for (size_t li : st_.out_links(assign_[step.anchor])) {
        const RoleLink& l = st_.link_at(li);
        if (l.role == step.role) attempt(*st_.index_of(l.to));
      }
    } else {
      for (size_t s = 0; s < st_.size(); s++) attempt(s);
    }
  }

  bool consistent(size_t p, size_t s) const {
    const Node& pn = pat_.node_at(p);
    const Node& sn = st_.node_at(s);
    if (pn.kind != sn.kind) return false;
    if (!pn.lex.empty() && pn.lex != sn.lex) return false;
    if (pn.negated != sn.negated) return false;
    if (sn.belief < min_blf_) return false;
    if (pn.is_predicate() && used_[s] > 0) return false;
    for (size_t li : pat_.out_links(p)) {
      const RoleLink& l = pat_.link_at(li);
      size_t t = *pat_.index_of(l.to);
      size_t ts = (t == p) ? s : assign_[t];
      if (ts != kNone && !st_.has_link(sn.id, l.role, st_.node_at(ts).id)) return false;
    }
    for (size_t li : pat_.in_links(p)) {
      const RoleLink& l = pat_.link_at(li);
      size_t f = *pat_.index_of(l.from);
      size_t fs = (f == p) ? s : assign_[f];
      if (fs != kNone && !st_.has_link(st_.node_at(fs).id, l.role, sn.id)) return false;
    }
    return true;
  }

  void bind(size_t p, size_t s) {
    assign_[p] = s;
    if (pat_.node_at(p).is_predicate()) used_[s]++;
  }

  void unbind(size_t p) {
    if (pat_.node_at(p).is_predicate()) used_[assign_[p]]--;
    assign_[p] = kNone;
  }

  const Graphlet& pat_;
  const Graphlet& st_;
  double min_blf_;
  std::vector<size_t> assign_;
  std::vector<int> used_;
  std::vector<Step> steps_;
  const std::function<bool(const Binding&)>* fn_ = nullptr;
  bool stop_ = false;
};

//= Visit every binding of pattern into store (lazy: fn may stop early).
inline void for_each_match(const Graphlet& pattern, const Graphlet& store, double min_belief,
                           const std::function<bool(const Binding&)>& fn, const Binding& seed = {}) {
  Matcher(pattern, store, min_belief).run(seed, fn);
}

//= All bindings of pattern into store in enumeration order.
inline std::vector<Binding> match(const Graphlet& pattern, const Graphlet& store,
                                  double min_belief = kDefaultMinBelief, const Binding& seed = {}) {
  std::vector<Binding> out;
  for_each_match(pattern, store, min_belief, [&](const Binding& b) {
    out.push_back(b);
    return true;
  }, seed);
  return out;
}

inline std::optional<Binding> first_match(const Graphlet& pattern, const Graphlet& store,
                                          double min_belief = kDefaultMinBelief, const Binding& seed = {}) {
  std::optional<Binding> out;
  for_each_match(pattern, store, min_belief, [&](const Binding& b) {
    out = b;
    return false;
  }, seed);
  return out;
}

//= Same shape up to renaming of nodes (beliefs ignored).
inline bool isomorphic(const Graphlet& a, const Graphlet& b) {
  if (a.size() != b.size() || a.links().size() != b.links().size()) return false;
  bool found = false;
  for_each_match(a, b, 0.0, [&](const Binding& m) {
    std::set<NodeId> image;
    for (const auto& kv : m) image.insert(kv.second);
    found = (image.size() == m.size());
    return !found;
  });
  return found;
}

///////////////////////////////////////////////////////////////////////////
//                             Instantiation                             //
///////////////////////////////////////////////////////////////////////////

//= Copy a template substituting bound nodes and naming fresh ones.
// unbound predicates are fresh unless an explicit fresh set is given
// fresh node beliefs are template belief * belief_scale (clamped)
// bound nodes copy their attributes from source when it has them
// throws StructuralError for an unbound node that is not fresh
inline Graphlet instantiate(const Graphlet& tmpl, const Binding& binding, double belief_scale, NameGen& names,
                            const Graphlet* source = nullptr, const std::set<NodeId>* fresh = nullptr) {
  Graphlet out;
  Binding full = binding;
  for (const Node& n : tmpl.nodes()) {
    auto it = binding.find(n.id);
    if (it != binding.end()) {
      if (out.contains(it->second)) continue;
      const Node* src = (source != nullptr) ? source->find(it->second) : nullptr;
      Node copy = (src != nullptr) ? *src : n;
      copy.id = it->second;
      out.add_node(copy);
      continue;
    }
    bool is_fresh = (fresh != nullptr) ? (fresh->count(n.id) > 0) : n.is_predicate();
    if (!is_fresh) throw StructuralError("unbound template node " + n.id.name);
    Node copy = n;
    copy.id = names.fresh(n);
    copy.belief = clamp_belief(n.belief * belief_scale);
    full[n.id] = copy.id;
    out.add_node(copy);
  }
  for (const RoleLink& l : tmpl.links()) out.add_link(full.at(l.from), l.role, full.at(l.to));
  return out;
}

///////////////////////////////////////////////////////////////////////////
//                          Arrow Notation Text                          //
///////////////////////////////////////////////////////////////////////////

namespace detail {

inline bool plain_word(std::string_view s) {
  if (s.empty() || s == "not" || s == "?") return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '\''))
      return false;
  return true;
}

inline std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

inline std::string fmt_belief(double b) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", b);
  return buf;
}

inline std::string label(const Graphlet& g, const Node& n) {
  if (n.is_object()) return n.id.name;
  std::string s = n.negated ? "not " : "";
  if (n.lex.empty())
    s += "?";
  else
    s += plain_word(n.lex) ? n.lex : quote(n.lex);
  if (n.belief < 1.0 - 1e-9) s += " (" + fmt_belief(n.belief) + ")";
  auto out = g.links_from(n.id);
  if (out.size() > 1) {
    // multi-argument predicate shown as a root with its arguments listed
    s += " [";
    for (size_t i = 0; i < out.size(); i++) s += (i ? " " : "") + out[i].role + ":" + out[i].to.name;
    s += "]";
  }
  return s;
}

}  // namespace detail

//= Arrow notation, one chain per line, lines sorted for a stable order.
// "obj-1 <-hq- orange <-ako- color" means a predicate "orange" with an hq
// link to obj-1 and a predicate "color" with an ako link to "orange"
inline std::string render(const Graphlet& g) {
  size_t n = g.size();
  auto chained = [&](size_t i) { return g.node_at(i).is_predicate() && g.out_links(i).size() == 1; };
  std::vector<std::string> lines;
  std::vector<bool> seen(n, false);

  std::function<void(size_t, const std::string&)> walk = [&](size_t i, const std::string& path) {
    seen[i] = true;
    bool leaf = true;
    for (size_t li : g.in_links(i)) {
      const RoleLink& l = g.link_at(li);
      size_t c = *g.index_of(l.from);
      if (!chained(c) || seen[c]) continue;
      leaf = false;
      walk(c, path + " <-" + l.role + "- " + detail::label(g, g.node_at(c)));
    }
    if (leaf) lines.push_back(path);
  };

  for (size_t i = 0; i < n; i++)
    if (!chained(i)) walk(i, detail::label(g, g.node_at(i)));
  for (size_t i = 0; i < n; i++)   // cycles of single-argument predicates
    if (!seen[i]) walk(i, detail::label(g, g.node_at(i)));
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (size_t i = 0; i < lines.size(); i++) out += (i ? "\n" : "") + lines[i];
  return out;
}

//= Single-line summary: render() lines joined with "; ".
inline std::string render_inline(const Graphlet& g) {
  std::string s = render(g);
  std::string out;
  for (char c : s) {
    if (c == '\n')
      out += "; ";
    else
      out += c;
  }
  return out;
}

//= Rebuild a graphlet from chain-form arrow notation.
// first token of a line is an object id; each "<-role- label" adds (or
// reuses, for a shared prefix) a single-argument predicate
// throws StructuralError on malformed text
inline Graphlet parse_render(std::string_view text, NameGen& names) {
  Graphlet g;
  std::map<std::string, NodeId> reuse;
  std::istringstream in{std::string(text)};
  std::string line;
  int lnum = 0;
  while (std::getline(in, line)) {
    lnum++;
    // tokenize: quoted strings, arrows, "(0.80)" beliefs, bare words
    std::vector<std::string> tok;
    for (size_t i = 0; i < line.size();) {
      char c = line[i];
      if (std::isspace(static_cast<unsigned char>(c))) {
        i++;
      } else if (c == '"') {
        std::string s = "\"";
        for (i++; i < line.size() && line[i] != '"'; i++) {
          if (line[i] == '\\' && i + 1 < line.size()) i++;
          s += line[i];
        }
        if (i >= line.size()) throw StructuralError("unterminated quote on line " + std::to_string(lnum));
        i++;
        tok.push_back(s);
      } else {
        size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) j++;
        tok.push_back(line.substr(i, j - i));
        i = j;
      }
    }
    if (tok.empty()) continue;
    NodeId cur(tok[0]);
    if (tok[0].rfind("<-", 0) == 0 || tok[0][0] == '"') throw StructuralError("line must start with an object id");
    if (!g.contains(cur)) g.add_object(cur);
    for (size_t k = 1; k < tok.size();) {
      const std::string& arrow = tok[k];
      if (arrow.size() < 4 || arrow.rfind("<-", 0) != 0 || arrow.back() != '-')
        throw StructuralError("expected <-role- on line " + std::to_string(lnum));
      std::string role = arrow.substr(2, arrow.size() - 3);
      if (++k >= tok.size()) throw StructuralError("dangling arrow on line " + std::to_string(lnum));
      bool neg = false;
      if (tok[k] == "not") {
        neg = true;
        if (++k >= tok.size()) throw StructuralError("dangling not on line " + std::to_string(lnum));
      }
      std::string lex = tok[k++];
      bool quoted = (!lex.empty() && lex[0] == '"');
      if (quoted)
        lex = lex.substr(1);
      else if (lex == "?")
        lex.clear();
      double blf = 1.0;
      if (k < tok.size() && tok[k].size() > 2 && tok[k].front() == '(' && tok[k].back() == ')') {
        blf = std::stod(tok[k].substr(1, tok[k].size() - 2));
        k++;
      }
      std::string key = cur.name + "|" + role + "|" + (neg ? "~" : "") + (quoted ? "\"" : "") + lex + "|" + detail::fmt_belief(blf);
      auto it = reuse.find(key);
      if (it != reuse.end()) {
        cur = it->second;
        continue;
      }
      Node proto{NodeId(), NodeKind::predicate, lex, blf, neg};
      NodeId id = names.fresh(proto);
      proto.id = id;
      g.add_node(proto);
      g.add_link(id, role, cur);
      reuse.emplace(key, id);
      cur = id;
    }
  }
  return g;
}

///////////////////////////////////////////////////////////////////////////
//                          Structured Dump Text                         //
///////////////////////////////////////////////////////////////////////////

//= One node per line "id kind "lex" belief negated", then one link per
//  line "from -role-> to". Insertion order is preserved.
inline std::string dump(const Graphlet& g) {
  std::string out;
  for (const Node& n : g.nodes()) {
    char blf[32];
    std::snprintf(blf, sizeof(blf), "%.3f", n.belief);
    out += n.id.name + " " + std::string(to_string(n.kind)) + " " + detail::quote(n.lex) + " " + blf + " " +
           (n.negated ? "1" : "0") + "\n";
  }
  for (const RoleLink& l : g.links()) out += l.from.name + " -" + l.role + "-> " + l.to.name + "\n";
  return out;
}

//= Inverse of dump(). Blank lines are skipped.
inline Graphlet parse_dump(std::string_view text) {
  Graphlet g;
  std::vector<RoleLink> links;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string a, b;
    if (!(ls >> a)) continue;
    if (!(ls >> b)) throw StructuralError("short dump line: " + line);
    if (b.size() > 3 && b.rfind("-", 0) == 0 && b.substr(b.size() - 2) == "->") {
      std::string to;
      if (!(ls >> to)) throw StructuralError("link without target: " + line);
      links.push_back(RoleLink{NodeId(a), b.substr(1, b.size() - 3), NodeId(to)});
      continue;
    }
    Node n;
    n.id = NodeId(a);
    if (b == "object")
      n.kind = NodeKind::object;
    else if (b == "predicate")
      n.kind = NodeKind::predicate;
    else
      throw StructuralError("bad node kind: " + line);
    // quoted lexical term
    ls >> std::ws;
    if (ls.get() != '"') throw StructuralError("expected quoted lex: " + line);
    for (int c = ls.get(); c != '"'; c = ls.get()) {
      if (c == EOF) throw StructuralError("unterminated lex: " + line);
      if (c == '\\') c = ls.get();
      n.lex += static_cast<char>(c);
    }
    int neg = 0;
    if (!(ls >> n.belief >> neg)) throw StructuralError("bad belief/negation: " + line);
    n.negated = (neg != 0);
    g.add_node(n);
  }
  for (const RoleLink& l : links) g.add_link(l.from, l.role, l.to);
  return g;
}

}  // namespace alia
