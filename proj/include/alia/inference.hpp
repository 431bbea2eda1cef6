// inference.hpp : rules and the two-step halo derivation
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
// The halo is thrown away and rebuilt every cycle. Step 1 applies every
// rule to working memory; step 2 applies every rule to working memory
// plus the step-1 conclusions. Nothing is derived from a step-2 fact.
//
///////////////////////////////////////////////////////////////////////////

#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "alia/error.hpp"
#include "alia/semnet.hpp"

namespace alia {

struct Rule {
  int id = 0;
  Graphlet condition;    ///< pattern matched against memory
  Graphlet conclusion;   ///< template; nodes shared with condition are bound
  double belief = 1.0;
  std::string provenance;
};

//= Throws StructuralError unless the rule is usable.
inline void validate_rule(const Rule& r) {
  if (!(r.belief > 0.0 && r.belief <= 1.0)) throw StructuralError("rule belief must be in (0,1]");
  if (r.condition.empty() || !r.condition.closed()) throw StructuralError("rule condition must be a closed non-empty graphlet");
  if (r.conclusion.empty() || !r.conclusion.closed()) throw StructuralError("rule conclusion must be a closed non-empty graphlet");
  bool shared = false;
  for (const Node& n : r.conclusion.nodes()) {
    if (r.condition.contains(n.id)) {
      shared = true;
      continue;
    }
    if (n.is_object()) throw StructuralError("conclusion introduces unbound object " + n.id.name);
  }
  if (!shared) throw StructuralError("conclusion shares no node with condition");
}

struct HaloFact {
  int id = 0;
  Graphlet fact;            ///< bound memory nodes plus the new predicates
  int step = 1;             ///< 1 or 2
  int rule_id = 0;
  Binding binding;          ///< condition node -> memory node
  double belief = 1.0;
  std::vector<int> support; ///< ids of step-1 facts used by a step-2 derivation
  std::set<NodeId> fresh;   ///< nodes introduced by this fact
};

///////////////////////////////////////////////////////////////////////////
//                               Rule Base                               //
///////////////////////////////////////////////////////////////////////////

class RuleBase {
 public:
  //= Store a rule; a structural duplicate keeps the larger belief.
  // returns the id of the stored (or merged) rule
  int add(Rule r) {
    validate_rule(r);
    for (Rule& old : rules_)
      if (same_shape(old, r)) {
        old.belief = std::max(old.belief, r.belief);
        return old.id;
      }
    r.id = next_id_++;
    rules_.push_back(std::move(r));
    return rules_.back().id;
  }

  const std::vector<Rule>& rules() const { return rules_; }
  size_t size() const { return rules_.size(); }

  const Rule& get(int id) const {
    for (const Rule& r : rules_)
      if (r.id == id) return r;
    throw LookupError("no rule " + std::to_string(id));
  }

 private:
  //= Condition and conclusion isomorphic under one shared renaming.
  static bool same_shape(const Rule& a, const Rule& b) { return isomorphic(combined(a), combined(b)); }

  static Graphlet combined(const Rule& r) {
    Graphlet g = r.condition;
    for (const Node& n : r.conclusion.nodes()) {
      if (g.contains(n.id)) continue;
      Node m = n;
      m.lex = "=> " + n.lex;   // keeps conclusion nodes apart from condition nodes
      g.add_node(m);
    }
    for (const RoleLink& l : r.conclusion.links()) g.add_link(l.from, l.role, l.to);
    return g;
  }

  std::vector<Rule> rules_;
  int next_id_ = 1;
};

///////////////////////////////////////////////////////////////////////////
//                            Halo Derivation                            //
///////////////////////////////////////////////////////////////////////////

/// Remembers the node names given to each (rule, binding) derivation so
/// that re-deriving an unchanged fact reuses its names. Entries not used
/// during a derivation are dropped and their names are never handed out
/// again.
class HaloNamer {
 public:
  //= Conclusion of r under b; fresh receives the names of the new nodes.
  Graphlet instantiate(const Rule& r, const Binding& b, double belief, NameGen& names, const Graphlet& source,
                       std::set<NodeId>& fresh) {
    std::string key = std::to_string(r.id) + to_string(b);
    Binding& given = cache_[key];
    used_.insert(key);
    Graphlet out;
    Binding full;
    for (const Node& n : r.conclusion.nodes()) {
      if (auto it = b.find(n.id); it != b.end()) {
        full[n.id] = it->second;
        if (out.contains(it->second)) continue;
        const Node* src = source.find(it->second);
        Node copy = (src != nullptr) ? *src : n;
        copy.id = it->second;
        out.add_node(copy);
        continue;
      }
      auto g = given.find(n.id);
      NodeId id = (g != given.end()) ? g->second : names.fresh(n);
      given[n.id] = id;
      full[n.id] = id;
      fresh.insert(id);
      Node copy = n;
      copy.id = id;
      copy.belief = clamp_belief(n.belief * belief);
      out.add_node(copy);
    }
    for (const RoleLink& l : r.conclusion.links()) out.add_link(full.at(l.from), l.role, full.at(l.to));
    return out;
  }

  void begin() { used_.clear(); }

  void finish() {
    for (auto it = cache_.begin(); it != cache_.end();)
      it = used_.count(it->first) ? std::next(it) : cache_.erase(it);
  }

 private:
  std::map<std::string, Binding> cache_;
  std::set<std::string> used_;
};

namespace detail {

//= Is fact already present in store, keeping its bound nodes fixed?
inline bool fact_present(const Graphlet& fact, const std::set<NodeId>& fresh, const Graphlet& store) {
  Binding seed;
  for (const Node& n : fact.nodes())
    if (!fresh.count(n.id)) seed[n.id] = n.id;
  return first_match(fact, store, 0.0, seed).has_value();
}

}  // namespace detail

//= Union of all halo fact graphlets.
inline Graphlet halo_store(const std::vector<HaloFact>& facts) {
  Graphlet g;
  for (const HaloFact& h : facts) g.merge(h.fact);
  return g;
}

//= Recompute the halo from scratch: two passes, nothing deeper.
// derived belief = rule belief * min belief of the matched predicates
// conclusions already in working memory (or already derived) are skipped
inline std::vector<HaloFact> derive_halo(const Graphlet& working, const RuleBase& rules, NameGen& names,
                                         HaloNamer* namer = nullptr, double min_belief = kDefaultMinBelief) {
  HaloNamer scratch;
  HaloNamer& nm = (namer != nullptr) ? *namer : scratch;
  nm.begin();
  std::vector<HaloFact> halo;
  Graphlet derived;   // union of halo facts so far

  auto emit = [&](const Rule& r, const Binding& b, const Graphlet& store, int step, const std::set<NodeId>& step1_nodes,
                  const std::map<NodeId, int>& owner) {
    double ante = 1.0;
    for (const Node& n : r.condition.nodes())
      if (n.is_predicate()) ante = std::min(ante, store.node(b.at(n.id)).belief);
    double blf = clamp_belief(r.belief * ante);
    std::set<NodeId> fresh;
    Graphlet fact = nm.instantiate(r, b, blf, names, store, fresh);
    if (detail::fact_present(fact, fresh, working) || detail::fact_present(fact, fresh, derived)) return;
    HaloFact h;
    h.id = static_cast<int>(halo.size()) + 1;
    h.fact = fact;
    h.step = step;
    h.rule_id = r.id;
    h.binding = b;
    h.belief = blf;
    h.fresh = fresh;
    if (step == 2) {
      std::set<int> sup;
      for (const auto& kv : b)
        if (step1_nodes.count(kv.second)) sup.insert(owner.at(kv.second));
      h.support.assign(sup.begin(), sup.end());
    }
    derived.merge(fact);
    halo.push_back(std::move(h));
  };

  // step 1: working memory only
  for (const Rule& r : rules.rules())
    for (const Binding& b : match(r.condition, working, min_belief))
      emit(r, b, working, 1, {}, {});

  // step 2: working memory plus step-1 conclusions, new bindings only
  Graphlet store = working;
  std::set<NodeId> step1_nodes;
  std::map<NodeId, int> owner;
  for (const HaloFact& h : halo) {
    for (const Node& n : h.fact.nodes())
      if (!working.contains(n.id)) {
        step1_nodes.insert(n.id);
        owner[n.id] = h.id;
      }
    store.merge(h.fact);
  }
  if (!step1_nodes.empty())
    for (const Rule& r : rules.rules())
      for (const Binding& b : match(r.condition, store, min_belief)) {
        bool uses_step1 = std::any_of(b.begin(), b.end(), [&](const auto& kv) { return step1_nodes.count(kv.second) > 0; });
        if (uses_step1) emit(r, b, store, 2, step1_nodes, owner);
      }

  nm.finish();
  return halo;
}

}  // namespace alia
