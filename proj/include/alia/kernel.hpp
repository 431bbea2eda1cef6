// kernel.hpp : grounding functions over the simulated world
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
// Grounding functions never hand data back to their caller. Whatever they
// learn goes out through KernelSink::post, and the only other thing they
// report is whether they finished or failed.
//
///////////////////////////////////////////////////////////////////////////

#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "alia/memory.hpp"
#include "alia/perception.hpp"
#include "alia/semnet.hpp"
#include "alia/world.hpp"

namespace alia {

/// Everything grounding can do to the rest of the engine.
class KernelSink {
 public:
  virtual ~KernelSink() = default;
  virtual NodeId fresh_object() = 0;
  virtual void post(const Graphlet& note) = 0;
  virtual void complete(int ticket, bool ok, const std::string& why) = 0;
  virtual void say(const std::string& text) = 0;
  virtual void event(const std::string& detail) = 0;
};

struct Outcome {
  enum class State { running, succeeded, failed } state = State::running;
  std::string why;

  static Outcome running() { return {}; }
  static Outcome done() { return {State::succeeded, ""}; }
  static Outcome fail(std::string w) { return {State::failed, std::move(w)}; }
};

struct MotorConfig {
  double drive_cm = 20;
  double turn_deg = 30;
  int discrete_cycles = 2;     ///< grab, release, raise, lower
  double personal_space = 10;  ///< cm
  double front_arc = 45;       ///< degrees either side of heading
};

/// Arguments a grounding function reads from its payload.
struct CallArgs {
  std::string verb;                    ///< act predicate label
  std::vector<std::string> modifiers;  ///< mod labels, e.g. "backward"
  std::optional<NodeId> target;        ///< first object other than the agent
  std::string text;                    ///< txt label
};

//= Pull the act, modifiers, target and text out of a DO/FCN payload.
inline CallArgs call_args(const Graphlet& p) {
  CallArgs a;
  for (const Node& n : p.nodes()) {
    if (n.is_object() && n.id != self_node() && !a.target) a.target = n.id;
    if (!n.is_predicate()) continue;
    for (const RoleLink& l : p.links_from(n.id)) {
      if (l.role == "agt" && a.verb.empty()) a.verb = n.lex;
      if (l.role == "mod") a.modifiers.push_back(n.lex);
      if (l.role == "txt") a.text = n.lex;
    }
  }
  if (a.verb.empty())
    for (const Node& n : p.nodes())
      if (n.is_predicate()) {
        bool is_arg = false;
        for (const RoleLink& l : p.links_from(n.id)) is_arg |= (l.role == "mod" || l.role == "txt");
        if (!is_arg) {
          a.verb = n.lex;
          break;
        }
      }
  return a;
}

class Kernel {
 public:
  using Tick = std::function<Outcome(KernelSink&)>;
  struct Start {
    std::string error;   ///< non-empty: refused
    Tick tick;
  };
  using Starter = std::function<Start(const Graphlet& payload)>;

  explicit Kernel(World world = {}, PerceptionConfig pcfg = {}, MotorConfig mcfg = {})
      : world_(std::move(world)), pcfg_(pcfg), mcfg_(mcfg) {
    install_builtins();
  }

  World& world() { return world_; }
  const World& world() const { return world_; }
  PerceptionConfig& perception() { return pcfg_; }
  MotorConfig& motor() { return mcfg_; }

  //= Register (or replace) a grounding function. group names the actuator
  //  it occupies; an empty group never conflicts.
  void define(const std::string& name, const std::string& group, Starter start) {
    fns_[name] = Fn{group, std::move(start)};
  }

  bool has(const std::string& name) const { return fns_.count(name) > 0; }

  std::vector<std::string> functions() const {
    std::vector<std::string> out;
    for (const auto& kv : fns_) out.push_back(kv.first);
    return out;
  }

  //= Grounding function that realizes a DO payload, if any.
  std::optional<std::string> resolve(const Graphlet& payload) const {
    CallArgs a = call_args(payload);
    auto has_mod = [&](std::string_view m) {
      return std::find(a.modifiers.begin(), a.modifiers.end(), m) != a.modifiers.end();
    };
    std::string name = a.verb;
    if (name == "move" || name == "drive" || name == "go") name = (has_mod("backward") || has_mod("back")) ? "move_backward" : "drive";
    if (name == "pick up") name = "grab";
    if (name == "put down") name = "release";
    std::replace(name.begin(), name.end(), ' ', '_');
    if (has(name)) return name;
    return std::nullopt;
  }

  //= Begin a function for a directive. returns "" or why it was refused
  std::string start(int ticket, const std::string& fn, const Graphlet& payload) {
    auto it = fns_.find(fn);
    if (it == fns_.end()) return "unknown function " + fn;
    const std::string& group = it->second.group;
    if (!group.empty())
      for (const Activity& a : running_)
        if (a.group == group) return group + " busy";
    Start s = it->second.start(payload);
    if (!s.error.empty()) return s.error;
    running_.push_back(Activity{ticket, fn, group, std::move(s.tick)});
    return "";
  }

  //= Advance the world one cycle: objects move, activities progress,
  //  then personal space is checked.
  void tick(KernelSink& sink) {
    for (WorldObject& o : world_.objects) {
      if (o.velocity.x == 0 && o.velocity.y == 0) continue;
      Vec2 p{o.pos.x + o.velocity.x, o.pos.y + o.velocity.y};
      if (p.x < world_.xmin || p.x > world_.xmax) o.velocity.x = -o.velocity.x, p.x = o.pos.x;
      if (p.y < world_.ymin || p.y > world_.ymax) o.velocity.y = -o.velocity.y, p.y = o.pos.y;
      o.pos = p;
    }
    std::vector<Activity> now;
    now.swap(running_);
    for (Activity& a : now) {
      if (a.cancelled) {
        running_.push_back(std::move(a));
        continue;
      }
      Outcome r = a.tick(sink);
      if (r.state == Outcome::State::running) {
        running_.push_back(std::move(a));
        continue;
      }
      bool ok = r.state == Outcome::State::succeeded;
      sink.event(a.fn + (ok ? " done" : " failed") + (r.why.empty() ? "" : " (" + r.why + ")"));
      sink.complete(a.ticket, ok, r.why);
    }
    for (Activity& a : running_)
      if (a.cancelled) {
        sink.event(a.fn + " failed (stopped)");
        sink.complete(a.ticket, false, "stopped");
      }
    std::erase_if(running_, [](const Activity& a) { return a.cancelled; });
    watch(sink);
  }

  //= Personal-space check; posts "<node> <-hq- close" once per entry.
  void watch(KernelSink& sink) {
    for (WorldObject& o : world_.objects) {
      auto [dist, bearing] = range_bearing(world_.robot, o);
      bool in = dist <= mcfg_.personal_space && std::abs(bearing) <= mcfg_.front_arc;
      if (in && !o.inside) {
        if (!o.tracked) o.tracked = sink.fresh_object();
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.1f", dist);
        sink.event("proximity " + o.name + " as " + o.tracked->name + " at " + buf + " cm");
        sink.post(quality_note(*o.tracked, "close"));
      }
      o.inside = in;
    }
  }

  static Graphlet quality_note(const NodeId& target, const std::string& quality, bool negated = false) {
    Graphlet g;
    g.add_object(target);
    NodeId q(quality + "-of-" + target.name);
    g.add_predicate(q, quality, 1.0, negated);
    g.add_link(q, "hq", target);
    return g;
  }

  static Graphlet color_note(const NodeId& target, const std::string& color) {
    Graphlet g = quality_note(target, color);
    NodeId c("color-of-" + color + "-" + target.name);
    g.add_predicate(c, "color");
    g.add_link(c, "ako", NodeId(color + "-of-" + target.name));
    return g;
  }

  bool busy(const std::string& group) const {
    for (const Activity& a : running_)
      if (a.group == group) return true;
    return false;
  }

 private:
  struct Fn {
    std::string group;
    Starter start;
  };
  struct Activity {
    int ticket;
    std::string fn;
    std::string group;
    Tick tick;
    bool cancelled = false;
  };

  WorldObject* target_of(const Graphlet& payload, std::string& error) {
    CallArgs a = call_args(payload);
    if (!a.target) {
      error = "no target";
      return nullptr;
    }
    WorldObject* o = world_.tracked(*a.target);
    if (o == nullptr) error = "untracked target " + a.target->name;
    return o;
  }

  //= Straight-line motion of dist cm (negative = backward).
  Start translate(double dist) {
    auto left = std::make_shared<double>(std::abs(dist));
    double sign = dist < 0 ? -1.0 : 1.0;
    return {"", [this, left, sign](KernelSink&) {
              RobotState& r = world_.robot;
              double step = std::min(*left, r.speed);
              double rad = r.heading * M_PI / 180.0;
              Vec2 p{r.pos.x + sign * step * std::cos(rad), r.pos.y + sign * step * std::sin(rad)};
              if (!world_.inside_bounds(p)) return Outcome::fail("wall");
              r.pos = p;
              *left -= step;
              return (*left <= 1e-9) ? Outcome::done() : Outcome::running();
            }};
  }

  Start timed(int cycles, std::function<void()> at_end) {
    auto left = std::make_shared<int>(std::max(1, cycles));
    return {"", [left, at_end](KernelSink&) {
              if (--*left > 0) return Outcome::running();
              at_end();
              return Outcome::done();
            }};
  }

  void install_builtins() {
    define("drive", "wheels", [this](const Graphlet& p) {
      CallArgs a = call_args(p);
      bool back = std::find(a.modifiers.begin(), a.modifiers.end(), "backward") != a.modifiers.end();
      return translate(back ? -mcfg_.drive_cm : mcfg_.drive_cm);
    });
    define("move_backward", "wheels", [this](const Graphlet&) { return translate(-mcfg_.drive_cm); });
    define("turn", "wheels", [this](const Graphlet& p) {
      CallArgs a = call_args(p);
      bool right = std::find(a.modifiers.begin(), a.modifiers.end(), "right") != a.modifiers.end();
      auto left = std::make_shared<double>(mcfg_.turn_deg);
      double sign = right ? -1.0 : 1.0;
      return Start{"", [this, left, sign](KernelSink&) {
                     RobotState& r = world_.robot;
                     double step = std::min(*left, r.turn_rate);
                     r.heading = norm_heading(r.heading + sign * step);
                     *left -= step;
                     return (*left <= 1e-9) ? Outcome::done() : Outcome::running();
                   }};
    });
    define("stop", "", [this](const Graphlet&) {
      return Start{"", [this](KernelSink&) {
                     for (Activity& a : running_)
                       if (a.group == "wheels") a.cancelled = true;
                     return Outcome::done();
                   }};
    });
    define("grab", "gripper", [this](const Graphlet&) {
      return timed(mcfg_.discrete_cycles, [this] { world_.robot.gripper = Gripper::closed; });
    });
    define("release", "gripper", [this](const Graphlet&) {
      return timed(mcfg_.discrete_cycles, [this] { world_.robot.gripper = Gripper::open; });
    });
    define("raise", "lift", [this](const Graphlet&) {
      return timed(mcfg_.discrete_cycles, [this] { world_.robot.lift = Lift::up; });
    });
    define("lower", "lift", [this](const Graphlet&) {
      return timed(mcfg_.discrete_cycles, [this] { world_.robot.lift = Lift::down; });
    });
    define("say", "voice", [](const Graphlet& p) {
      std::string text = call_args(p).text;
      if (text.empty()) return Start{"nothing to say", {}};
      return Start{"", [text](KernelSink& s) {
                     s.say(text);
                     return Outcome::done();
                   }};
    });
    define("beep", "voice", [](const Graphlet&) {
      return Start{"", [](KernelSink& s) {
                     s.say("beep");
                     return Outcome::done();
                   }};
    });
    define("class_color", "", [this](const Graphlet& p) {
      std::string err;
      WorldObject* o = target_of(p, err);
      if (o == nullptr) return Start{err, {}};
      NodeId node = *o->tracked;
      std::string name = o->name;
      return Start{"", [this, node, name](KernelSink& s) {
                     WorldObject* obj = world_.object(name);
                     auto terms = color_terms(obj->pixels, pcfg_);
                     std::string list;
                     for (CanonicalColor c : terms) {
                       list += " " + std::string(to_string(c));
                       s.post(color_note(node, std::string(to_string(c))));
                     }
                     s.event("class_color " + node.name + " ->" + (list.empty() ? " nothing" : list));
                     return terms.empty() ? Outcome::fail("no dominant color") : Outcome::done();
                   }};
    });
    define("det_texture", "", [this](const Graphlet& p) {
      std::string err;
      WorldObject* o = target_of(p, err);
      if (o == nullptr) return Start{err, {}};
      NodeId node = *o->tracked;
      std::string name = o->name;
      return Start{"", [this, node, name](KernelSink& s) {
                     TextureReport t = texture(world_.object(name)->pixels, pcfg_);
                     char buf[96];
                     std::snprintf(buf, sizeof buf, " -> %s (%d lines, %.0f%% coverage)",
                                   t.striped ? "striped" : "not striped", t.kept, 100.0 * t.coverage);
                     s.event("det_texture " + node.name + buf);
                     s.post(quality_note(node, "striped", !t.striped));
                     return Outcome::done();
                   }};
    });
  }

  World world_;
  PerceptionConfig pcfg_;
  MotorConfig mcfg_;
  std::map<std::string, Fn> fns_;
  std::vector<Activity> running_;
};

}  // namespace alia
