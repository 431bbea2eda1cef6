// policy.hpp : operators, applicability and preference-weighted ordering
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

#pragma once

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "alia/directive_kind.hpp"
#include "alia/error.hpp"
#include "alia/memory.hpp"
#include "alia/semnet.hpp"

namespace alia {

/// One step of an operator body. fn names the grounding function for FCN.
struct DirectiveTemplate {
  DirectiveKind kind = DirectiveKind::DO;
  Graphlet payload;
  std::string fn;
};

struct Operator {
  int id = 0;
  DirectiveKind trigger_kind = DirectiveKind::NOTE;
  Graphlet trigger;
  Graphlet enablement;        ///< may be empty
  std::vector<DirectiveTemplate> body;
  double preference = 1.0;
  std::string provenance;
};

struct Candidate {
  int op_id = 0;
  Binding binding;   ///< trigger and enablement nodes -> focus / memory nodes
  double weight = 1.0;

  bool operator==(const Candidate&) const = default;
};

inline bool can_trigger(DirectiveKind k) {
  return k == DirectiveKind::NOTE || k == DirectiveKind::DO || k == DirectiveKind::CHK || k == DirectiveKind::FIND ||
         k == DirectiveKind::ACH;
}

//= Throws StructuralError unless the operator is usable.
inline void validate_operator(const Operator& o) {
  if (!can_trigger(o.trigger_kind))
    throw StructuralError("operator cannot be triggered by " + std::string(to_string(o.trigger_kind)));
  if (o.trigger.empty() || !o.trigger.closed()) throw StructuralError("operator trigger must be a closed graphlet");
  if (!o.enablement.empty() && !o.enablement.closed()) throw StructuralError("operator enablement is not closed");
  if (o.body.empty()) throw StructuralError("operator body is empty");
  if (!(o.preference > 0.0 && o.preference <= 1.0)) throw StructuralError("operator preference must be in (0,1]");
  for (const DirectiveTemplate& d : o.body) {
    if (d.payload.empty() && d.kind != DirectiveKind::PUNT) throw StructuralError("empty body directive");
    if (!d.payload.closed()) throw StructuralError("body directive payload is not closed");
    if (d.kind == DirectiveKind::FCN && d.fn.empty()) throw StructuralError("FCN without a function name");
    for (const Node& n : d.payload.nodes()) {
      if (n.is_predicate() || n.id == self_node()) continue;
      if (!o.trigger.contains(n.id) && !o.enablement.contains(n.id))
        throw StructuralError("unbound body variable " + n.id.name);
    }
  }
}

//= Pattern pinning the agent node to itself.
inline Binding self_seed(const Graphlet& pattern) {
  Binding b;
  if (pattern.contains(self_node())) b[self_node()] = self_node();
  return b;
}

class OperatorStore {
 public:
  //= Store an operator; re-teaching the same sentence keeps the larger preference.
  int add(Operator o) {
    validate_operator(o);
    if (!o.provenance.empty())
      for (Operator& old : ops_)
        if (old.provenance == o.provenance) {
          old.preference = std::max(old.preference, o.preference);
          return old.id;
        }
    o.id = next_id_++;
    ops_.push_back(std::move(o));
    return ops_.back().id;
  }

  const std::vector<Operator>& operators() const { return ops_; }
  size_t size() const { return ops_.size(); }

  const Operator& get(int id) const {
    for (const Operator& o : ops_)
      if (o.id == id) return o;
    throw LookupError("no operator " + std::to_string(id));
  }

  //= Every operator whose trigger matches the focus and whose enablement
  //  holds in store, with one candidate per combined binding.
  std::vector<Candidate> applicable(DirectiveKind kind, const Graphlet& focus, const Graphlet& store,
                                    double min_belief = kDefaultMinBelief) const {
    std::vector<Candidate> out;
    double trig_belief = (kind == DirectiveKind::NOTE) ? min_belief : 0.0;
    for (const Operator& o : ops_) {
      if (o.trigger_kind != kind) continue;
      for (const Binding& tb : match(o.trigger, focus, trig_belief, self_seed(o.trigger))) {
        if (o.enablement.empty()) {
          out.push_back({o.id, tb, o.preference});
          continue;
        }
        Binding seed = self_seed(o.enablement);
        for (const auto& [k, v] : tb)
          if (o.enablement.contains(k)) seed[k] = v;
        for (const Binding& eb : match(o.enablement, store, min_belief, seed)) {
          Binding all = tb;
          for (const auto& [k, v] : eb) all.emplace(k, v);
          out.push_back({o.id, all, o.preference});
        }
      }
    }
    return out;
  }

 private:
  std::vector<Operator> ops_;
  int next_id_ = 1;
};

//= Uniform double in [0,1) from the top 53 bits of one engine draw.
inline double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

//= Weighted sampling without replacement; fixed seed gives a fixed order.
inline std::vector<Candidate> order_candidates(std::vector<Candidate> c, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Candidate> out;
  out.reserve(c.size());
  while (!c.empty()) {
    double total = 0.0;
    for (const Candidate& x : c) total += x.weight;
    double u = unit_draw(rng) * total;
    size_t pick = c.size() - 1;
    double acc = 0.0;
    for (size_t i = 0; i < c.size(); i++) {
      acc += c[i].weight;
      if (u < acc) {
        pick = i;
        break;
      }
    }
    out.push_back(std::move(c[pick]));
    c.erase(c.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  return out;
}

//= Concrete directive from a body template under a candidate binding.
// unbound predicates get fresh names, the agent node maps to itself
inline Graphlet instantiate_body(const DirectiveTemplate& d, const Binding& b, NameGen& names) {
  Binding full = b;
  if (d.payload.contains(self_node())) full[self_node()] = self_node();
  return instantiate(d.payload, full, 1.0, names);
}

}  // namespace alia
