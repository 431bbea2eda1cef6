// director.hpp : directive interpreter and action trees
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
// Each tree makes at most one status transition per engine cycle. Work
// that is only bookkeeping (advancing a body cursor, picking the next
// operator from an agenda) does not count, so a step keeps going until
// something actually changes state or everything is waiting.
//
// Goal kinds (FIND, CHK, ACH, ANTE) look their payload up in working
// memory and the halo before and after every operator they try. A CHK
// also accepts the negated payload and remembers that it did.
//
///////////////////////////////////////////////////////////////////////////

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "alia/directive_kind.hpp"
#include "alia/policy.hpp"
#include "alia/semnet.hpp"

namespace alia {

enum class Status { pending, running, succeeded, failed };

inline std::string_view to_string(Status s) {
  switch (s) {
    case Status::pending: return "pending";
    case Status::running: return "running";
    case Status::succeeded: return "succeeded";
    case Status::failed: return "failed";
  }
  return "?";
}

inline bool terminal(Status s) { return s == Status::succeeded || s == Status::failed; }

/// Candidate id used when a DO maps straight onto a grounding function.
inline constexpr int kKernelDispatch = 0;

struct Directive {
  int id = 0;
  DirectiveKind kind = DirectiveKind::DO;
  Graphlet payload;
  std::string fn;                 ///< grounding function for FCN (and DO dispatch)
  Status status = Status::pending;
  int depth = 0;
  int activated = -1;             ///< cycle it started running
  bool root = false;              ///< NOTE root wrapping one operator body
  std::string reason;             ///< why it failed, if it did

  std::vector<Candidate> agenda;
  size_t next = 0;
  std::vector<std::pair<int, Binding>> chosen;
  uint64_t seed = 0;

  std::vector<std::unique_ptr<Directive>> children;
  size_t cursor = 0;
  bool body_active = false;
  std::vector<Directive*> keeps;

  bool negative = false;          ///< CHK settled by the negated payload
  Binding found;                  ///< goal payload -> memory
};

struct ActionTree {
  int id = 0;
  int focus_item = 0;
  int born = 0;
  std::unique_ptr<Directive> root;

  bool finished() const { return terminal(root->status); }
};

/// What the director needs from the rest of the engine.
class DirectorHost {
 public:
  virtual ~DirectorHost() = default;
  virtual int cycle() const = 0;
  //= Pattern in working memory or halo; halo matches are promoted.
  virtual std::optional<Binding> lookup(const Graphlet& pattern) = 0;
  //= Pattern holds right now (no promotion).
  virtual bool holds(const Graphlet& pattern) = 0;
  virtual std::vector<Candidate> applicable(DirectiveKind kind, const Graphlet& payload) = 0;
  virtual const Operator& op(int id) const = 0;
  virtual uint64_t agenda_seed() = 0;
  virtual NameGen& names() = 0;
  //= Grounding function that realizes a DO payload, if one does.
  virtual std::optional<std::string> function_for(const Graphlet& payload) = 0;
  //= Start a grounding function; empty string on success, else why not.
  virtual std::string start_function(int ticket, const std::string& fn, const Graphlet& payload) = 0;
  virtual void post(const Graphlet& payload) = 0;
  virtual void event(const std::string& detail) = 0;
};

struct DirectorConfig {
  int max_depth = 12;
  int fcn_timeout = 100;     ///< cycles
  int tree_budget = 2000;    ///< cycles before a tree is abandoned
};

//= Flip the negation of the predicates that speak directly about objects.
inline Graphlet flipped(const Graphlet& g) {
  Graphlet out = g;
  for (const Node& n : g.nodes()) {
    if (!n.is_predicate() || n.lex.empty()) continue;
    auto links = g.links_from(n.id);
    bool direct = std::all_of(links.begin(), links.end(), [&](const RoleLink& l) { return g.node(l.to).is_object(); });
    if (direct) out.find(n.id)->negated = !n.negated;
  }
  return out;
}

//= Binding that holds every object of a concrete payload in place.
inline Binding pin_objects(const Graphlet& payload) {
  Binding b;
  for (const Node& n : payload.nodes())
    if (n.is_object()) b[n.id] = n.id;
  return b;
}

//= Short label: kind plus payload, or function and arguments for FCN.
inline std::string summary(const Directive& d) {
  std::string s(to_string(d.kind));
  if (d.kind == DirectiveKind::FCN) {
    s += " " + d.fn;
    for (const Node& n : d.payload.nodes())
      if (n.is_object() && n.id != self_node()) s += " " + n.id.name;
    for (const RoleLink& l : d.payload.links())
      if (l.role == "txt") s += " " + detail::quote(d.payload.node(l.from).lex);
    return s;
  }
  std::string body = render_inline(d.payload);
  if (!body.empty()) s += " " + body;
  return s;
}

class Director {
 public:
  explicit Director(DirectorHost& host, DirectorConfig cfg = {}) : host_(host), cfg_(cfg) {}

  DirectorConfig& config() { return cfg_; }

  //= One tree per triggered operator; the root runs that operator's body.
  std::vector<int> spawn_note(int focus_item, const Graphlet& focus, const std::vector<Candidate>& cands) {
    std::vector<int> made;
    std::set<int> seen_ops;
    for (const Candidate& c : cands) {
      if (!seen_ops.insert(c.op_id).second) continue;
      auto root = make(DirectiveKind::NOTE, focus, 0);
      root->root = true;
      root->chosen.emplace_back(c.op_id, c.binding);
      load_body(*root, c);
      made.push_back(add_tree(focus_item, std::move(root)));
    }
    return made;
  }

  //= A command item becomes the root directive of a single tree.
  int spawn_command(int focus_item, DirectiveKind kind, const Graphlet& payload) {
    return add_tree(focus_item, make(kind, payload, 0));
  }

  //= Give every unfinished tree one step. returns trees that finished
  std::vector<int> step_all() {
    std::vector<int> done;
    for (auto& t : trees_) {
      if (t.finished()) continue;
      if (host_.cycle() - t.born > cfg_.tree_budget) {
        set_status(t, *t.root, Status::failed, "budget");
      } else {
        for (int guard = 0; guard < 64; guard++)
          if (advance(t, *t.root) != Progress::moved) break;
      }
      if (t.finished()) done.push_back(t.id);
    }
    return done;
  }

  //= A new attention item satisfies the deepest, newest waiting goal it matches.
  // returns the satisfied directive id, or 0
  int notify(const Graphlet& item) {
    ActionTree* best_tree = nullptr;
    Directive* best = nullptr;
    bool best_neg = false;
    Binding best_b;
    for (auto& t : trees_) {
      if (t.finished()) continue;
      visit(*t.root, [&](Directive& d) {
        if (d.status != Status::running || !is_goal(d.kind)) return;
        auto b = first_match(d.payload, item, kDefaultMinBelief, pin_objects(d.payload));
        bool neg = false;
        if (!b && d.kind == DirectiveKind::CHK) {
          b = first_match(flipped(d.payload), item, kDefaultMinBelief, pin_objects(d.payload));
          neg = b.has_value();
        }
        if (!b) return;
        if (best == nullptr || d.depth > best->depth || (d.depth == best->depth && d.activated > best->activated) ||
            (d.depth == best->depth && d.activated == best->activated && d.id > best->id)) {
          best = &d;
          best_tree = &t;
          best_neg = neg;
          best_b = *b;
        }
      });
    }
    if (best == nullptr) return 0;
    best->found = best_b;
    best->negative = best_neg;
    cancel_body(*best_tree, *best, true);
    set_status(*best_tree, *best, Status::succeeded, best_neg ? "negative" : "");
    return best->id;
  }

  //= A grounding function finished.
  void complete(int ticket, bool ok, const std::string& why = "") {
    for (auto& t : trees_) {
      Directive* d = find(*t.root, ticket);
      if (d == nullptr) continue;
      if (d->status == Status::running) set_status(t, *d, ok ? Status::succeeded : Status::failed, why);
      return;
    }
  }

  //= Forget finished trees.
  void prune() {
    std::erase_if(trees_, [](const ActionTree& t) { return t.finished(); });
  }

  const std::vector<ActionTree>& trees() const { return trees_; }

  const ActionTree* tree(int id) const {
    for (const ActionTree& t : trees_)
      if (t.id == id) return &t;
    return nullptr;
  }

  //= Nodes mentioned by unfinished trees (they keep memory alive).
  std::set<NodeId> live_nodes() const {
    std::set<NodeId> out;
    for (const ActionTree& t : trees_)
      if (!t.finished())
        cvisit(*t.root, [&](const Directive& d) {
          if (!terminal(d.status))
            for (const Node& n : d.payload.nodes()) out.insert(n.id);
        });
    return out;
  }

  //= Indented listing of all trees.
  std::string text() const {
    std::ostringstream os;
    for (const ActionTree& t : trees_) {
      os << "tree " << t.id << " focus " << t.focus_item << "\n";
      std::function<void(const Directive&, int)> walk = [&](const Directive& d, int ind) {
        os << std::string(2 * ind + 2, ' ') << 'D' << d.id << ' ' << summary(d) << " [" << to_string(d.status)
           << "]\n";
        for (const auto& c : d.children) walk(*c, ind + 1);
      };
      walk(*t.root, 0);
    }
    return os.str();
  }

  static void cvisit(const Directive& d, const std::function<void(const Directive&)>& fn) {
    fn(d);
    for (const auto& c : d.children) cvisit(*c, fn);
  }

 private:
  enum class Progress { transition, waiting, moved };

  std::unique_ptr<Directive> make(DirectiveKind k, const Graphlet& payload, int depth, std::string fn = "") {
    auto d = std::make_unique<Directive>();
    d->id = next_directive_++;
    d->kind = k;
    d->payload = payload;
    d->fn = std::move(fn);
    d->depth = depth;
    return d;
  }

  int add_tree(int focus_item, std::unique_ptr<Directive> root) {
    ActionTree t;
    t.id = next_tree_++;
    t.focus_item = focus_item;
    t.born = host_.cycle();
    t.root = std::move(root);
    trees_.push_back(std::move(t));
    return trees_.back().id;
  }

  static void visit(Directive& d, const std::function<void(Directive&)>& fn) {
    fn(d);
    for (auto& c : d.children) visit(*c, fn);
  }

  static Directive* find(Directive& d, int id) {
    if (d.id == id) return &d;
    for (auto& c : d.children)
      if (Directive* r = find(*c, id)) return r;
    return nullptr;
  }

  void set_status(ActionTree& t, Directive& d, Status s, const std::string& why = "") {
    if (d.status == s) return;
    std::string line = "T" + std::to_string(t.id) + " D" + std::to_string(d.id) + " " + summary(d) + " " +
                       std::string(to_string(d.status)) + "->" + std::string(to_string(s));
    if (!why.empty()) line += " (" + why + ")";
    if (s == Status::running) d.activated = host_.cycle();
    if (s == Status::failed) d.reason = why;
    d.status = s;
    host_.event(line);
  }

  //= Instantiate the candidate's body under d. ANTE steps go first and
  //  POST steps last, everything else keeps its taught order.
  void load_body(Directive& d, const Candidate& c) {
    d.children.clear();
    d.keeps.clear();
    d.cursor = 0;
    d.body_active = true;
    if (c.op_id == kKernelDispatch) {
      d.children.push_back(make(DirectiveKind::FCN, d.payload, d.depth + 1, d.fn));
      return;
    }
    const Operator& o = host_.op(c.op_id);
    for (int pass = 0; pass < 3; pass++)
      for (const DirectiveTemplate& tpl : o.body) {
        int rank = (tpl.kind == DirectiveKind::ANTE) ? 0 : (tpl.kind == DirectiveKind::POST) ? 2 : 1;
        if (rank != pass) continue;
        Graphlet g = instantiate_body(tpl, c.binding, host_.names());
        d.children.push_back(make(tpl.kind, g, d.depth + 1, tpl.fn));
      }
  }

  void cancel_body(ActionTree& t, Directive& d, bool keeps_ok) {
    for (Directive* k : d.keeps)
      if (k->status == Status::running) set_status(t, *k, keeps_ok ? Status::succeeded : Status::failed, "released");
    d.keeps.clear();
    for (auto& c : d.children)
      if (c->status == Status::running) {
        cancel_body(t, *c, keeps_ok);
        set_status(t, *c, Status::failed, "cancelled");
      }
    d.body_active = false;
  }

  Progress advance(ActionTree& t, Directive& d) {
    if (terminal(d.status)) return Progress::waiting;
    if (d.status == Status::pending) return start(t, d);
    switch (d.kind) {
      case DirectiveKind::FCN:
        if (host_.cycle() - d.activated > cfg_.fcn_timeout) {
          set_status(t, d, Status::failed, "timeout");
          return Progress::transition;
        }
        return Progress::waiting;
      case DirectiveKind::KEEP:
        return Progress::waiting;
      default:
        break;
    }
    if (d.body_active) {
      for (Directive* k : d.keeps)
        if (k->status == Status::running && !host_.holds(k->payload)) {
          set_status(t, *k, Status::failed, "not maintained");
          return body_done(t, d, false);
        }
      if (d.cursor >= d.children.size()) return body_done(t, d, true);
      Directive& c = *d.children[d.cursor];
      if (c.kind == DirectiveKind::KEEP && c.status == Status::pending) {
        Progress p = start(t, c);
        if (c.status == Status::running) d.keeps.push_back(&c);
        d.cursor++;
        return p;
      }
      if (!terminal(c.status)) return advance(t, c);
      if (c.status == Status::failed) return body_done(t, d, false);
      d.cursor++;
      return Progress::moved;
    }
    return choose(t, d);
  }

  Progress body_done(ActionTree& t, Directive& d, bool ok) {
    cancel_body(t, d, true);
    if (d.root) {
      set_status(t, d, ok ? Status::succeeded : Status::failed, ok ? "" : "body failed");
      return Progress::transition;
    }
    if (d.kind == DirectiveKind::DO && ok) {
      set_status(t, d, Status::succeeded);
      return Progress::transition;
    }
    return Progress::moved;
  }

  //= Goal check, then the next untried candidate.
  Progress choose(ActionTree& t, Directive& d) {
    if (is_goal(d.kind) && settle(t, d)) return Progress::transition;
    if (d.next >= d.agenda.size()) {
      set_status(t, d, Status::failed, d.agenda.empty() ? "no operator" : "exhausted");
      return Progress::transition;
    }
    const Candidate& c = d.agenda[d.next++];
    for (const auto& [op, b] : d.chosen)
      if (op == c.op_id && b == c.binding) return Progress::moved;   // never retried
    d.chosen.emplace_back(c.op_id, c.binding);
    if (d.depth + 1 > cfg_.max_depth) {
      set_status(t, d, Status::failed, "too deep");
      return Progress::transition;
    }
    host_.event("T" + std::to_string(t.id) + " D" + std::to_string(d.id) + " use " +
                (c.op_id == kKernelDispatch ? std::string("kernel ") + d.fn : "op-" + std::to_string(c.op_id)) + " " +
                to_string(c.binding));
    load_body(d, c);
    return Progress::moved;
  }

  //= Succeed a goal whose payload (or, for CHK, its negation) is known.
  bool settle(ActionTree& t, Directive& d) {
    if (auto b = host_.lookup(d.payload)) {
      d.found = *b;
      set_status(t, d, Status::succeeded);
      return true;
    }
    if (d.kind == DirectiveKind::CHK)
      if (auto b = host_.lookup(flipped(d.payload))) {
        d.found = *b;
        d.negative = true;
        set_status(t, d, Status::succeeded, "negative");
        return true;
      }
    return false;
  }

  Progress start(ActionTree& t, Directive& d) {
    switch (d.kind) {
      case DirectiveKind::NOTE:
        if (d.root) {
          set_status(t, d, Status::running);
          return Progress::transition;
        }
        [[fallthrough]];
      case DirectiveKind::POST:
        host_.post(d.payload);
        set_status(t, d, Status::succeeded);
        return Progress::transition;
      case DirectiveKind::PUNT:
        set_status(t, d, Status::failed, "punt");
        return Progress::transition;
      case DirectiveKind::KEEP:
        if (host_.holds(d.payload)) set_status(t, d, Status::running);
        else set_status(t, d, Status::failed, "not maintained");
        return Progress::transition;
      case DirectiveKind::FCN: {
        std::string why = host_.start_function(d.id, d.fn, d.payload);
        if (why.empty()) set_status(t, d, Status::running);
        else set_status(t, d, Status::failed, why);
        return Progress::transition;
      }
      case DirectiveKind::DO:
        if (auto fn = host_.function_for(d.payload)) {
          d.fn = *fn;
          d.agenda = {Candidate{kKernelDispatch, {}, 1.0}};
        } else {
          build_agenda(t, d);
        }
        set_status(t, d, Status::running);
        return Progress::transition;
      default:   // goals
        if (settle(t, d)) return Progress::transition;
        build_agenda(t, d);
        set_status(t, d, Status::running);
        return Progress::transition;
    }
  }

  void build_agenda(ActionTree& t, Directive& d) {
    d.seed = host_.agenda_seed();
    d.agenda = order_candidates(host_.applicable(d.kind, d.payload), d.seed);
    std::string line = "T" + std::to_string(t.id) + " D" + std::to_string(d.id) + " agenda seed=" + std::to_string(d.seed);
    for (const Candidate& c : d.agenda) line += " op-" + std::to_string(c.op_id);
    host_.event(line);
  }

  DirectorHost& host_;
  DirectorConfig cfg_;
  std::vector<ActionTree> trees_;
  int next_tree_ = 1;
  int next_directive_ = 1;
};

}  // namespace alia
