// memory.hpp : attention buffer, working memory and halo
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

#include <algorithm>
#include <deque>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "alia/directive_kind.hpp"
#include "alia/error.hpp"
#include "alia/inference.hpp"
#include "alia/semnet.hpp"

namespace alia {

enum class ItemKind { assertion, command };
enum class ItemState { active, deactivated };
enum class Source { user, grounding, promotion, operator_ };

inline std::string_view to_string(ItemKind k) { return k == ItemKind::assertion ? "assertion" : "command"; }
inline std::string_view to_string(ItemState s) { return s == ItemState::active ? "active" : "deactivated"; }

inline std::string_view to_string(Source s) {
  switch (s) {
    case Source::user: return "user";
    case Source::grounding: return "grounding";
    case Source::promotion: return "promotion";
    case Source::operator_: return "operator";
  }
  return "?";
}

/// The one object node that stands for the agent itself.
inline const NodeId& self_node() {
  static const NodeId id("self");
  return id;
}

struct FocusItem {
  int id = 0;
  DirectiveKind directive = DirectiveKind::NOTE;
  Graphlet payload;           ///< node ids are working-memory ids
  ItemKind kind = ItemKind::assertion;
  ItemState state = ItemState::active;
  int born_cycle = 0;
  std::optional<int> deactivated_cycle;
  Source source = Source::user;
  bool handled = false;       ///< operator matching has been done
  std::string explanation;    ///< derivation chain for promoted facts

  bool active() const { return state == ItemState::active; }
};

class Memory {
 public:
  explicit Memory(NameGen& names, int linger = 5) : names_(names), linger_(linger) {}

  int linger() const { return linger_; }
  void set_linger(int n) { linger_ = std::max(0, n); }

  //= Append an attention item and merge its payload into working memory.
  // a structurally equal assertion still in attention absorbs the post
  // throws StructuralError for an empty or open payload
  FocusItem& post(const Graphlet& payload, DirectiveKind kind, Source src, int cycle) {
    if (payload.empty()) throw StructuralError("empty payload");
    if (!payload.closed()) throw StructuralError("payload is not closed");
    ItemKind ik = (kind == DirectiveKind::NOTE) ? ItemKind::assertion : ItemKind::command;
    Graphlet local = (ik == ItemKind::assertion) ? absorb(payload) : payload;
    if (ik == ItemKind::assertion) {
      std::string key = render(local);
      for (FocusItem& it : attention_)
        if (it.kind == ItemKind::assertion && it.directive == kind && render(it.payload) == key) return it;
      drop_halo_duplicates();
    } else {
      // a command is not a fact: only the things it mentions enter memory
      for (const Node& n : local.nodes())
        if (n.is_object() && !working_.contains(n.id)) working_.add_object(n.id);
    }
    FocusItem item;
    item.id = next_id_++;
    item.directive = kind;
    item.payload = std::move(local);
    item.kind = ik;
    item.born_cycle = cycle;
    item.source = src;
    attention_.push_back(std::move(item));
    return attention_.back();
  }

  //= Move a halo fact into working memory and attention.
  // throws LookupError when the fact is not in the current halo
  FocusItem& promote(int halo_fact_id, int cycle) {
    auto it = std::find_if(halo_.begin(), halo_.end(), [&](const HaloFact& h) { return h.id == halo_fact_id; });
    if (it == halo_.end()) throw LookupError("no halo fact " + std::to_string(halo_fact_id));
    std::string why = explain(*it);
    Graphlet fact = it->fact;
    halo_.erase(it);
    size_t before = attention_.size();
    FocusItem& item = post(fact, DirectiveKind::NOTE, Source::promotion, cycle);
    if (attention_.size() > before) item.explanation = why;
    return item;
  }

  void deactivate(int item_id, int cycle) {
    FocusItem* it = find_item(item_id);
    if (it == nullptr || !it->active()) return;
    it->state = ItemState::deactivated;
    it->deactivated_cycle = std::max(cycle, it->born_cycle);
  }

  //= Drop items deactivated at least linger cycles ago, then any working
  //  memory node no longer connected to a surviving item or extra root.
  // returns the number of attention items removed
  int expire(int cycle, const std::set<NodeId>& extra_roots = {}) {
    int removed = 0;
    for (auto it = attention_.begin(); it != attention_.end();) {
      if (!it->active() && cycle - *it->deactivated_cycle >= linger_) {
        it = attention_.erase(it);
        removed++;
      } else {
        ++it;
      }
    }
    collect(extra_roots);
    return removed;
  }

  //= Replace the halo with a fresh derivation.
  void set_halo(std::vector<HaloFact> facts) {
    halo_ = std::move(facts);
    drop_halo_duplicates();
  }

  FocusItem* find_item(int id) {
    for (FocusItem& it : attention_)
      if (it.id == id) return &it;
    return nullptr;
  }

  const std::deque<FocusItem>& attention() const { return attention_; }
  std::deque<FocusItem>& attention() { return attention_; }
  const Graphlet& working() const { return working_; }
  const std::vector<HaloFact>& halo() const { return halo_; }
  Graphlet halo_graph() const { return halo_store(halo_); }

  //= Working memory together with the halo.
  Graphlet combined() const {
    Graphlet g = working_;
    for (const HaloFact& h : halo_) g.merge(h.fact);
    return g;
  }

  //= Halo fact that introduced node id, if any.
  const HaloFact* halo_owner(const NodeId& id) const {
    for (const HaloFact& h : halo_)
      if (h.fresh.count(id)) return &h;
    return nullptr;
  }

  //= Most recent object mentioned in attention, other than the agent.
  std::optional<NodeId> referent() const {
    for (auto it = attention_.rbegin(); it != attention_.rend(); ++it) {
      const auto nodes = it->payload.nodes();
      for (auto n = nodes.rbegin(); n != nodes.rend(); ++n)
        if (n->is_object() && n->id != self_node()) return n->id;
    }
    return std::nullopt;
  }

  //= Structured text listing of all three layers.
  std::string export_text(int cycle) const {
    std::ostringstream os;
    os << "cycle " << cycle << "\n[attention]\n";
    for (const FocusItem& it : attention_) {
      os << "item " << it.id << ' ' << to_string(it.directive) << ' ' << to_string(it.state) << ' ' << it.born_cycle
         << ' ' << (it.deactivated_cycle ? std::to_string(*it.deactivated_cycle) : "-") << ' '
         << to_string(it.source) << " | " << render_inline(it.payload) << "\n";
    }
    os << "[working]\n" << dump(working_) << "[halo]\n";
    for (const HaloFact& h : halo_) {
      os << "fact " << h.id << " step " << h.step << " rule " << h.rule_id << ' ' << to_string(h.binding) << ' '
         << detail::fmt_belief(h.belief) << "\n"
         << dump(h.fact);
    }
    return os.str();
  }

  std::string explain(const HaloFact& h) const {
    std::string s = "rule " + std::to_string(h.rule_id) + " " + to_string(h.binding) + " step " + std::to_string(h.step);
    for (int sid : h.support)
      for (const HaloFact& o : halo_)
        if (o.id == sid) s += "; from " + render_inline(o.fact) + " by " + explain(o);
    return s;
  }

 private:
  //= Merge payload into working memory, reusing any predicate already
  //  present with the same label and arguments. returns payload in
  //  working-memory ids
  Graphlet absorb(const Graphlet& payload) {
    Binding map;
    for (const Node& n : payload.nodes())
      if (n.is_object()) {
        map[n.id] = n.id;
        if (!working_.contains(n.id)) working_.add_object(n.id);
      }
    std::vector<const Node*> todo;
    for (const Node& n : payload.nodes())
      if (n.is_predicate()) todo.push_back(&n);
    while (!todo.empty()) {
      bool progress = false;
      for (auto it = todo.begin(); it != todo.end();) {
        const Node& p = **it;
        std::set<std::pair<std::string, NodeId>> args;
        bool ready = true;
        for (const RoleLink& l : payload.links_from(p.id)) {
          auto m = map.find(l.to);
          if (m == map.end()) {
            ready = false;
            break;
          }
          args.emplace(l.role, m->second);
        }
        if (!ready) {
          ++it;
          continue;
        }
        map[p.id] = place(p, args);
        it = todo.erase(it);
        progress = true;
      }
      if (!progress) throw StructuralError("cyclic predicate arguments in payload");
    }
    Graphlet out;
    for (const Node& n : payload.nodes()) {
      if (out.contains(map[n.id])) continue;
      out.add_node(working_.node(map[n.id]));
    }
    for (const RoleLink& l : payload.links()) out.add_link(map[l.from], l.role, map[l.to]);
    return out;
  }

  NodeId place(const Node& p, const std::set<std::pair<std::string, NodeId>>& args) {
    const NodeId& anchor = args.begin()->second;
    auto ai = working_.index_of(anchor);
    for (size_t li : working_.in_links(*ai)) {
      Node* q = working_.find(working_.link_at(li).from);
      if (q->lex != p.lex || q->negated != p.negated) continue;
      std::set<std::pair<std::string, NodeId>> qa;
      for (const RoleLink& l : working_.links_from(q->id)) qa.emplace(l.role, l.to);
      if (qa != args) continue;
      q->belief = std::max(q->belief, p.belief);
      return q->id;
    }
    Node n = p;
    if (working_.contains(n.id)) n.id = names_.fresh(p);
    working_.add_node(n);
    for (const auto& [role, to] : args) working_.add_link(n.id, role, to);
    return n.id;
  }

  void drop_halo_duplicates() {
    std::erase_if(halo_, [&](const HaloFact& h) { return detail::fact_present(h.fact, h.fresh, working_); });
  }

  void collect(const std::set<NodeId>& extra_roots) {
    std::set<NodeId> seen;
    std::vector<NodeId> frontier;
    auto visit = [&](const NodeId& id) {
      if (working_.contains(id) && seen.insert(id).second) frontier.push_back(id);
    };
    for (const FocusItem& it : attention_)
      for (const Node& n : it.payload.nodes()) visit(n.id);
    for (const NodeId& id : extra_roots) visit(id);
    while (!frontier.empty()) {
      NodeId id = frontier.back();
      frontier.pop_back();
      if (id == self_node()) continue;   // everything touches the agent
      for (const RoleLink& l : working_.links_from(id)) visit(l.to);
      for (const RoleLink& l : working_.links_to(id)) visit(l.from);
    }
    std::set<NodeId> doomed;
    for (const Node& n : working_.nodes())
      if (!seen.count(n.id)) doomed.insert(n.id);
    working_.erase(doomed);
  }

  NameGen& names_;
  int linger_;
  int next_id_ = 1;
  std::deque<FocusItem> attention_;
  Graphlet working_;
  std::vector<HaloFact> halo_;
};

}  // namespace alia
