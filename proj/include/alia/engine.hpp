// engine.hpp : the cycle loop that ties memory, rules, operators, the
//              director and the grounding kernel together
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
// One cycle:
//
//   1. drain the inbox: grounding completions, then posts (each post may
//      satisfy a waiting FIND/CHK)
//   2. re-derive the halo
//   3. spawn action trees for unhandled attention items, newest first
//   4. step every tree once
//   5. tick the world (motion, activities, personal space)
//   6. expire old attention items and collect working memory
//
// Everything that happens is written to the trace as
// "<cycle> <category> <detail>".
//
///////////////////////////////////////////////////////////////////////////

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "alia/director.hpp"
#include "alia/inference.hpp"
#include "alia/kernel.hpp"
#include "alia/language.hpp"
#include "alia/memory.hpp"
#include "alia/policy.hpp"
#include "alia/semnet.hpp"
#include "alia/world.hpp"

namespace alia {

enum class TraceCategory { attention, halo, directive, grounding, speech };

inline std::string_view to_string(TraceCategory c) {
  switch (c) {
    case TraceCategory::attention: return "attention";
    case TraceCategory::halo: return "halo";
    case TraceCategory::directive: return "directive";
    case TraceCategory::grounding: return "grounding";
    case TraceCategory::speech: return "speech";
  }
  return "?";
}

struct TraceEvent {
  int cycle = 0;
  uint64_t seq = 0;
  TraceCategory category = TraceCategory::attention;
  std::string detail;

  std::string line() const { return std::to_string(cycle) + " " + std::string(to_string(category)) + " " + detail; }
};

struct TranscriptLine {
  int cycle = 0;
  std::string speaker;   ///< user, agent or system
  std::string text;
};

struct InstructionResult {
  bool ok = false;
  std::string text;          ///< normalized words
  Category category = Category::command;
  std::string badge;         ///< "rule added", "operator added", ...
  int id = 0;                ///< rule or operator id
  std::string diagnostic;
  std::string slot;          ///< compile errors name a slot
  std::string prefix;        ///< longest understood prefix on rejection
};

struct EngineConfig {
  uint64_t seed = 1;
  int linger = 5;
  double min_belief = kDefaultMinBelief;
  DirectorConfig director;
};

class Engine : private DirectorHost {
 public:
  explicit Engine(World world = {}, EngineConfig cfg = {}, const Grammar& grammar = default_grammar())
      : cfg_(cfg),
        grammar_(grammar),
        parser_(grammar_),
        memory_(names_, cfg.linger),
        director_(*this, cfg.director),
        kernel_(std::move(world)),
        rng_(cfg.seed) {
    install_kernel_operators();
  }

  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  ///////////////////////////////////////////////////////////////////////
  //                           instruction                             //
  ///////////////////////////////////////////////////////////////////////

  //= Parse, compile and apply one utterance. Never throws on bad input.
  InstructionResult instruct(const std::string& text) {
    InstructionResult r;
    ParseOutcome p = parser_.parse(text);
    r.text = join(p.tokens);
    if (p.tokens.empty()) {
      r.diagnostic = "empty input";
      return r;
    }
    transcript_.push_back({cycle_, "user", r.text});
    auto reject = [&](const std::string& why) {
      r.ok = false;
      r.diagnostic = why;
      transcript_.push_back({cycle_, "system", why});
      log(TraceCategory::speech, "user " + detail::quote(r.text) + " rejected: " + why);
      return r;
    };
    if (!p.accepted) {
      r.prefix = join(p.tokens, 0, p.prefix);
      return reject(p.diagnostic);
    }
    Compiled c;
    try {
      if (auto now = memory_.referent()) referent_ = now;
      c = compile(digest(p.tree, p.tokens), p.tokens, referent_);
    } catch (const CompileError& e) {
      r.slot = e.slot();
      return reject(std::string(e.what()) + (e.slot().empty() ? "" : " [" + e.slot() + "]"));
    }
    r.category = c.category;
    try {
      switch (c.category) {
        case Category::rule: {
          size_t before = rules_.size();
          r.id = rules_.add(*c.rule);
          r.badge = rules_.size() > before ? "rule added" : "rule merged";
          break;
        }
        case Category::operator_: {
          size_t before = ops_.size();
          r.id = ops_.add(*c.op);
          r.badge = ops_.size() > before ? "operator added" : "operator merged";
          break;
        }
        case Category::command:
        case Category::question:
        case Category::fact:
          inbox_.push_back({c.focus, c.focus_kind, Source::user});
          r.badge = std::string(to_string(c.category)) + " posted";
          break;
      }
    } catch (const StructuralError& e) {
      return reject(e.what());
    }
    r.ok = true;
    log(TraceCategory::speech, "user " + detail::quote(r.text) + " -> " + r.badge +
                                   (r.id != 0 ? " " + std::to_string(r.id) : ""));
    return r;
  }

  ///////////////////////////////////////////////////////////////////////
  //                              cycle                                //
  ///////////////////////////////////////////////////////////////////////

  void step() {
    cycle_++;
    drain();
    rederive();
    spawn();
    director_.step_all();
    // goals satisfied by a post finish outside step_all
    std::vector<int> ended;
    for (const auto& [tree, item] : command_trees_)
      if (director_.tree(tree)->finished()) ended.push_back(tree);
    for (int id : ended) finish_tree(id);
    director_.prune();
    kernel_.tick(sink_);
    if (auto now = memory_.referent()) referent_ = now;
    expire();
  }

  void run(int cycles) {
    for (int i = 0; i < cycles; i++) step();
  }

  ///////////////////////////////////////////////////////////////////////
  //                             access                                //
  ///////////////////////////////////////////////////////////////////////

  int cycle() const override { return cycle_; }
  uint64_t seed() const { return cfg_.seed; }

  //= Restart the agenda stream (takes effect for agendas built from now on).
  void reseed(uint64_t seed) {
    cfg_.seed = seed;
    rng_.seed(seed);
    transcript_.push_back({cycle_, "control", "seed " + std::to_string(seed)});
    log(TraceCategory::grounding, "seed " + std::to_string(seed));
  }

  //= Swap the stage. label is what a replay needs to load it again.
  void load_world(World w, const std::string& label) {
    kernel_.world() = std::move(w);
    transcript_.push_back({cycle_, "control", "scenario " + label});
    log(TraceCategory::grounding, "scenario " + label);
  }

  Memory& memory() { return memory_; }
  const Memory& memory() const { return memory_; }
  RuleBase& rules() { return rules_; }
  OperatorStore& operators() { return ops_; }
  const Director& director() const { return director_; }
  Kernel& kernel() { return kernel_; }
  const Kernel& kernel() const { return kernel_; }
  World& world() { return kernel_.world(); }
  const World& world() const { return kernel_.world(); }
  const Grammar& grammar() const { return grammar_; }
  const std::vector<TraceEvent>& trace() const { return trace_; }
  const std::vector<TranscriptLine>& transcript() const { return transcript_; }

  std::string trace_text(size_t from = 0) const {
    std::string s;
    for (size_t i = from; i < trace_.size(); i++) s += trace_[i].line() + "\n";
    return s;
  }

  //= Operators the engine installs itself (perception on demand).
  const std::set<int>& kernel_operators() const { return builtin_ops_; }

  ///////////////////////////////////////////////////////////////////////
  //                            snapshot                               //
  ///////////////////////////////////////////////////////////////////////

  //= Structured state for the stream; events are those from index since.
  nlohmann::json snapshot(size_t since = 0, size_t transcript_tail = 20) const {
    using nlohmann::json;
    json j;
    j["type"] = "snapshot";
    j["cycle"] = cycle_;
    j["seed"] = cfg_.seed;

    json att = json::array();
    for (const FocusItem& it : memory_.attention()) {
      json a{{"id", it.id},
             {"directive", std::string(to_string(it.directive))},
             {"kind", std::string(to_string(it.kind))},
             {"state", std::string(to_string(it.state))},
             {"born", it.born_cycle},
             {"deactivated", it.deactivated_cycle ? json(*it.deactivated_cycle) : json(nullptr)},
             {"source", std::string(to_string(it.source))},
             {"payload", render_inline(it.payload)}};
      if (!it.explanation.empty()) a["explanation"] = it.explanation;
      att.push_back(a);
    }
    json halo = json::array();
    for (const HaloFact& h : memory_.halo())
      halo.push_back({{"id", h.id},
                      {"step", h.step},
                      {"rule", h.rule_id},
                      {"binding", to_string(h.binding)},
                      {"belief", h.belief},
                      {"fact", render_inline(h.fact)}});
    json working = json::array();
    for (const std::string& line : split_lines(render(memory_.working()))) working.push_back(line);
    j["memory"] = {{"attention", att}, {"working", working}, {"halo", halo}, {"export", memory_.export_text(cycle_)}};

    json trees = json::array();
    for (const ActionTree& t : director_.trees())
      trees.push_back({{"id", t.id}, {"focus", t.focus_item}, {"born", t.born}, {"root", directive_json(*t.root)}});
    j["trees"] = trees;

    const World& w = kernel_.world();
    json objs = json::array();
    Graphlet known = memory_.combined();
    for (const WorldObject& o : w.objects) {
      auto hist = color_histogram(o.pixels);
      size_t dom = size_t(std::max_element(hist.begin(), hist.end()) - hist.begin());
      json ob{{"name", o.name},
              {"x", o.pos.x},
              {"y", o.pos.y},
              {"radius", o.radius},
              {"inside", o.inside},
              {"color", std::string(kColorNames[dom])},
              {"tracked", o.tracked ? json(o.tracked->name) : json(nullptr)},
              {"striped", o.tracked ? believes(known, *o.tracked, "striped") : false}};
      objs.push_back(ob);
    }
    j["world"] = {{"bounds", {w.xmin, w.ymin, w.xmax, w.ymax}},
                  {"robot",
                   {{"x", w.robot.pos.x},
                    {"y", w.robot.pos.y},
                    {"heading", w.robot.heading},
                    {"gripper", w.robot.gripper == Gripper::open ? "open" : "closed"},
                    {"lift", w.robot.lift == Lift::down ? "down" : "up"}}},
                  {"personal_space", kernel_motor().personal_space},
                  {"front_arc", kernel_motor().front_arc},
                  {"objects", objs}};

    json tr = json::array();
    size_t start = transcript_.size() > transcript_tail ? transcript_.size() - transcript_tail : 0;
    for (size_t i = start; i < transcript_.size(); i++)
      tr.push_back({{"cycle", transcript_[i].cycle}, {"speaker", transcript_[i].speaker}, {"text", transcript_[i].text}});
    j["transcript"] = tr;

    json ev = json::array();
    for (size_t i = since; i < trace_.size(); i++)
      ev.push_back({{"cycle", trace_[i].cycle},
                    {"seq", trace_[i].seq},
                    {"category", std::string(to_string(trace_[i].category))},
                    {"detail", trace_[i].detail}});
    j["events"] = ev;
    return j;
  }

 private:
  struct Pending {
    Graphlet payload;
    DirectiveKind kind;
    Source source;
  };
  struct Completion {
    int ticket;
    bool ok;
    std::string why;
  };

  static std::vector<std::string> split_lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string line;
    while (std::getline(in, line))
      if (!line.empty()) out.push_back(line);
    return out;
  }

  static bool believes(const Graphlet& g, const NodeId& obj, const std::string& quality) {
    if (!g.contains(obj)) return false;
    for (const RoleLink& l : g.links_to(obj)) {
      const Node& p = g.node(l.from);
      if (l.role == "hq" && p.lex == quality && !p.negated && p.belief >= kDefaultMinBelief) return true;
    }
    return false;
  }

  static nlohmann::json directive_json(const Directive& d) {
    nlohmann::json kids = nlohmann::json::array();
    for (const auto& c : d.children) kids.push_back(directive_json(*c));
    nlohmann::json j{{"id", d.id},
                     {"kind", std::string(to_string(d.kind))},
                     {"summary", summary(d)},
                     {"status", std::string(to_string(d.status))},
                     {"depth", d.depth},
                     {"children", kids}};
    if (!d.reason.empty()) j["reason"] = d.reason;
    if (d.negative) j["negative"] = true;
    return j;
  }

  MotorConfig kernel_motor() const { return const_cast<Kernel&>(kernel_).motor(); }

  void log(TraceCategory c, const std::string& detail) { trace_.push_back({cycle_, seq_++, c, detail}); }

  //= Perception is reached through ordinary operators so that a goal can
  //  fall back on taught alternatives when it fails.
  void install_kernel_operators() {
    auto fcn = [&](DirectiveKind kind, Graphlet trigger, const std::string& fn) {
      Operator o;
      o.trigger_kind = kind;
      o.trigger = trigger;
      DirectiveTemplate d;
      d.kind = DirectiveKind::FCN;
      d.fn = fn;
      d.payload.add_object(NodeId("X"));
      o.body.push_back(d);
      o.provenance = "kernel " + fn;
      builtin_ops_.insert(ops_.add(o));
    };
    Graphlet color;
    color.add_object(NodeId("X"));
    color.add_predicate(NodeId("q"), "");
    color.add_link(NodeId("q"), "hq", NodeId("X"));
    color.add_predicate(NodeId("c"), "color");
    color.add_link(NodeId("c"), "ako", NodeId("q"));
    fcn(DirectiveKind::FIND, color, "class_color");
    Graphlet striped;
    striped.add_object(NodeId("X"));
    striped.add_predicate(NodeId("q"), "striped");
    striped.add_link(NodeId("q"), "hq", NodeId("X"));
    fcn(DirectiveKind::CHK, striped, "det_texture");
  }

  ///////////////////////////////////////////////////////////////////////
  //                          cycle stages                             //
  ///////////////////////////////////////////////////////////////////////

  void drain() {
    std::vector<Completion> done;
    done.swap(completions_);
    for (const Completion& c : done) director_.complete(c.ticket, c.ok, c.why);
    std::vector<Pending> in;
    in.swap(inbox_);
    for (const Pending& p : in) {
      size_t before = memory_.attention().size();
      FocusItem* item;
      try {
        item = &memory_.post(p.payload, p.kind, p.source, cycle_);
      } catch (const StructuralError& e) {
        log(TraceCategory::attention, std::string("rejected post: ") + e.what());
        continue;
      }
      if (memory_.attention().size() > before) log_item(*item, "post");
      if (item->kind == ItemKind::assertion) director_.notify(item->payload);
    }
  }

  void log_item(const FocusItem& it, const std::string& verb) {
    log(TraceCategory::attention, verb + " item " + std::to_string(it.id) + " " + std::string(to_string(it.directive)) +
                                      " " + std::string(to_string(it.source)) + " | " + render_inline(it.payload));
  }

  void rederive() {
    memory_.set_halo(derive_halo(memory_.working(), rules_, names_, &namer_, cfg_.min_belief));
    std::map<std::string, const HaloFact*> now;
    for (const HaloFact& h : memory_.halo()) now.emplace(render_inline(h.fact), &h);
    for (const auto& [text, step] : halo_lines_)
      if (!now.count(text)) log(TraceCategory::halo, "- " + text);
    std::map<std::string, int> next;
    for (const auto& [text, h] : now) {
      next[text] = h->step;
      if (!halo_lines_.count(text))
        log(TraceCategory::halo, "+ step " + std::to_string(h->step) + " rule " + std::to_string(h->rule_id) + " " +
                                     detail::fmt_belief(h->belief) + " | " + text);
    }
    halo_lines_ = std::move(next);
  }

  void spawn() {
    std::vector<int> order;
    for (auto it = memory_.attention().rbegin(); it != memory_.attention().rend(); ++it)
      if (it->active() && !it->handled) order.push_back(it->id);
    for (int id : order) {
      FocusItem* it = memory_.find_item(id);
      it->handled = true;
      if (it->kind == ItemKind::command) {
        int tree = director_.spawn_command(it->id, it->directive, it->payload);
        command_trees_[tree] = it->id;
        log(TraceCategory::directive, "T" + std::to_string(tree) + " spawn for item " + std::to_string(it->id));
        continue;
      }
      auto cands = ops_.applicable(DirectiveKind::NOTE, it->payload, memory_.combined(), cfg_.min_belief);
      for (int tree : director_.spawn_note(it->id, it->payload, cands))
        log(TraceCategory::directive, "T" + std::to_string(tree) + " spawn for item " + std::to_string(it->id) +
                                          " by op-" + std::to_string(director_.tree(tree)->root->chosen[0].first));
      memory_.deactivate(it->id, cycle_);
      log(TraceCategory::attention, "deactivate item " + std::to_string(it->id));
    }
  }

  //= A finished command tree answers its question and releases its item.
  void finish_tree(int id) {
    auto ct = command_trees_.find(id);
    if (ct == command_trees_.end()) return;
    const ActionTree* t = director_.tree(id);
    const Directive& d = *t->root;
    std::string answer;
    bool ok = d.status == Status::succeeded;
    if (d.kind == DirectiveKind::CHK) {
      answer = !ok ? "I don't know" : d.negative ? "no" : "yes";
    } else if (d.kind == DirectiveKind::FIND) {
      if (ok) {
        Graphlet known = memory_.combined();
        for (const Node& n : d.payload.nodes())
          if (n.is_predicate() && n.lex.empty()) {
            auto f = d.found.find(n.id);
            if (f != d.found.end())
              if (const Node* m = known.find(f->second)) answer += (answer.empty() ? "" : " ") + m->lex;
          }
      }
      if (answer.empty()) answer = "I don't know";
    } else if (!ok) {
      answer = "I can't";
    }
    if (!answer.empty()) say(answer);
    memory_.deactivate(ct->second, cycle_);
    log(TraceCategory::attention, "deactivate item " + std::to_string(ct->second));
    command_trees_.erase(ct);
  }

  void expire() {
    std::set<int> before;
    for (const FocusItem& it : memory_.attention()) before.insert(it.id);
    std::set<NodeId> roots = director_.live_nodes();
    memory_.expire(cycle_, roots);
    std::set<int> after;
    for (const FocusItem& it : memory_.attention()) after.insert(it.id);
    for (int id : before)
      if (!after.count(id)) log(TraceCategory::attention, "expire item " + std::to_string(id));
  }

  ///////////////////////////////////////////////////////////////////////
  //                          director host                            //
  ///////////////////////////////////////////////////////////////////////

  std::optional<Binding> lookup(const Graphlet& pattern) override {
    Binding pin = pin_objects(pattern);
    if (auto b = first_match(pattern, memory_.working(), cfg_.min_belief, pin)) return b;
    Graphlet all = memory_.combined();
    auto b = first_match(pattern, all, cfg_.min_belief, pin);
    if (!b) return std::nullopt;
    std::set<int> facts;
    for (const auto& [k, v] : *b)
      if (const HaloFact* h = memory_.halo_owner(v)) facts.insert(h->id);
    for (int fid : facts) {
      size_t before = memory_.attention().size();
      FocusItem& item = memory_.promote(fid, cycle_);
      if (memory_.attention().size() > before) log_item(item, "promote");
    }
    return first_match(pattern, memory_.working(), cfg_.min_belief, pin);
  }

  bool holds(const Graphlet& pattern) override {
    return first_match(pattern, memory_.combined(), cfg_.min_belief, pin_objects(pattern)).has_value();
  }

  std::vector<Candidate> applicable(DirectiveKind kind, const Graphlet& payload) override {
    return ops_.applicable(kind, payload, memory_.combined(), cfg_.min_belief);
  }

  const Operator& op(int id) const override { return ops_.get(id); }
  uint64_t agenda_seed() override { return rng_(); }
  NameGen& names() override { return names_; }
  std::optional<std::string> function_for(const Graphlet& payload) override { return kernel_.resolve(payload); }

  std::string start_function(int ticket, const std::string& fn, const Graphlet& payload) override {
    std::string why = kernel_.start(ticket, fn, payload);
    log(TraceCategory::grounding, fn + (why.empty() ? " started" : " refused (" + why + ")"));
    return why;
  }

  void post(const Graphlet& payload) override { inbox_.push_back({payload, DirectiveKind::NOTE, Source::operator_}); }
  void event(const std::string& detail) override { log(TraceCategory::directive, detail); }

  ///////////////////////////////////////////////////////////////////////
  //                           kernel sink                             //
  ///////////////////////////////////////////////////////////////////////

  class Sink : public KernelSink {
   public:
    explicit Sink(Engine& e) : e_(e) {}
    NodeId fresh_object() override { return e_.names_.next("obj"); }
    void post(const Graphlet& note) override { e_.inbox_.push_back({note, DirectiveKind::NOTE, Source::grounding}); }
    void complete(int ticket, bool ok, const std::string& why) override { e_.completions_.push_back({ticket, ok, why}); }
    void say(const std::string& text) override { e_.say(text); }
    void event(const std::string& detail) override { e_.log(TraceCategory::grounding, detail); }

   private:
    Engine& e_;
  };

  void say(const std::string& text) {
    transcript_.push_back({cycle_, "agent", text});
    log(TraceCategory::speech, "agent " + detail::quote(text));
  }

  EngineConfig cfg_;
  Grammar grammar_;
  Parser parser_;
  NameGen names_;
  HaloNamer namer_;
  Memory memory_;
  RuleBase rules_;
  OperatorStore ops_;
  Director director_;
  Kernel kernel_;
  std::mt19937_64 rng_;
  int cycle_ = 0;
  uint64_t seq_ = 0;
  std::vector<Pending> inbox_;
  std::vector<Completion> completions_;
  std::map<int, int> command_trees_;   // tree -> attention item
  std::map<std::string, int> halo_lines_;
  std::set<int> builtin_ops_;
  std::vector<TraceEvent> trace_;
  std::vector<TranscriptLine> transcript_;
  std::optional<NodeId> referent_;   ///< "it": outlives the memory that named it
  Sink sink_{*this};
};

}  // namespace alia
