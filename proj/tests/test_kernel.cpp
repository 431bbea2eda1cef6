// test_kernel.cpp : grounding functions, kinematics and proximity
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

#include <gtest/gtest.h>

#include "alia/kernel.hpp"

using namespace alia;

namespace {

struct Sink : KernelSink {
  int next = 0;
  std::vector<Graphlet> posts;
  std::vector<std::tuple<int, bool, std::string>> done;
  std::vector<std::string> said, events;

  NodeId fresh_object() override { return NodeId("obj-" + std::to_string(++next)); }
  void post(const Graphlet& g) override { posts.push_back(g); }
  void complete(int t, bool ok, const std::string& why) override { done.emplace_back(t, ok, why); }
  void say(const std::string& s) override { said.push_back(s); }
  void event(const std::string& e) override { events.push_back(e); }
};

World one_object(double x, double y, double radius = 5) {
  World w;
  WorldObject o;
  o.name = "thing";
  o.pos = {x, y};
  o.radius = radius;
  o.pixels = uniform_grid(10, 10, parse_hex("ff8000"));
  w.objects.push_back(o);
  return w;
}

Graphlet act(std::string_view text) {
  NameGen n;
  return parse_render(text, n);
}

size_t run(Kernel& k, Sink& s, int cycles) {
  for (int i = 0; i < cycles; i++) k.tick(s);
  return s.posts.size();
}

}  // namespace

TEST(Proximity, NineCentimetresAheadPostsOnce) {
  Kernel k(one_object(14, 0));
  Sink s;
  EXPECT_EQ(run(k, s, 50), 1u);
  EXPECT_EQ(render(s.posts[0]), "obj-1 <-hq- close");
}

TEST(Proximity, ElevenCentimetresOrBehindPostNothing) {
  Kernel far(one_object(16, 0));
  Sink s1;
  EXPECT_EQ(run(far, s1, 50), 0u);
  Kernel rear(one_object(-14, 0));
  Sink s2;
  EXPECT_EQ(run(rear, s2, 50), 0u);
  Kernel side(one_object(0, 14));
  Sink s3;
  EXPECT_EQ(run(side, s3, 50), 0u);
}

TEST(Proximity, ReentryPostsAgainWithTheSameNode) {
  Kernel k(one_object(14, 0));
  Sink s;
  run(k, s, 1);
  k.world().objects[0].pos = {40, 0};
  run(k, s, 1);
  k.world().objects[0].pos = {13, 0};
  run(k, s, 1);
  ASSERT_EQ(s.posts.size(), 2u);
  EXPECT_EQ(render(s.posts[1]), "obj-1 <-hq- close");
  EXPECT_EQ(s.next, 1);
}

TEST(Proximity, TrackingIsStableOverLongRuns) {
  World w = one_object(60, 0, 4);
  w.objects[0].velocity = {-3.7, 1.3};
  WorldObject b = w.objects[0];
  b.name = "other";
  b.pos = {-50, 30};
  b.velocity = {2.9, -2.2};
  w.objects.push_back(b);
  Kernel k(w);
  Sink s;
  std::map<std::string, NodeId> seen;
  for (int i = 0; i < 1000; i++) {
    k.tick(s);
    for (const WorldObject& o : k.world().objects) {
      if (!o.tracked) continue;
      auto [it, fresh] = seen.emplace(o.name, *o.tracked);
      EXPECT_EQ(it->second, *o.tracked) << o.name;
    }
  }
  EXPECT_EQ(size_t(s.next), seen.size());
}

TEST(Motor, DriveAndBackUp) {
  Kernel k;
  Sink s;
  ASSERT_EQ(k.start(1, "move_backward", act("self <-agt- move <-mod- backward")), "");
  run(k, s, 10);
  EXPECT_NEAR(k.world().robot.pos.x, -20, 1e-9);
  EXPECT_NEAR(k.world().robot.pos.y, 0, 1e-9);
  ASSERT_EQ(s.done.size(), 1u);
  EXPECT_EQ(std::get<0>(s.done[0]), 1);
  EXPECT_TRUE(std::get<1>(s.done[0]));

  ASSERT_EQ(k.start(2, "drive", act("self <-agt- drive <-mod- forward")), "");
  run(k, s, 10);
  EXPECT_NEAR(k.world().robot.pos.x, 0, 1e-9);
}

TEST(Motor, TurnLeftThenRight) {
  Kernel k;
  Sink s;
  k.start(1, "turn", act("self <-agt- turn <-mod- left"));
  run(k, s, 1);
  EXPECT_NEAR(k.world().robot.heading, 15, 1e-9);
  run(k, s, 5);
  EXPECT_NEAR(k.world().robot.heading, 30, 1e-9);
  k.start(2, "turn", act("self <-agt- turn <-mod- right"));
  k.start(3, "turn", act("self <-agt- turn <-mod- right"));
  run(k, s, 5);
  EXPECT_NEAR(k.world().robot.heading, 0, 1e-9);
}

TEST(Motor, WheelsAreExclusiveAndStopCancels) {
  Kernel k;
  Sink s;
  ASSERT_EQ(k.start(1, "drive", act("self <-agt- drive")), "");
  EXPECT_EQ(k.start(2, "turn", act("self <-agt- turn")), "wheels busy");
  k.tick(s);
  ASSERT_EQ(k.start(3, "stop", act("self <-agt- stop")), "");
  k.tick(s);
  EXPECT_FALSE(k.busy("wheels"));
  // the cancelled drive still finished its step for this tick
  EXPECT_NEAR(k.world().robot.pos.x, 10, 1e-9);
  k.tick(s);
  EXPECT_NEAR(k.world().robot.pos.x, 10, 1e-9);
  bool stopped = false;
  for (auto& [t, ok, why] : s.done) stopped |= (t == 1 && !ok && why == "stopped");
  EXPECT_TRUE(stopped);
}

TEST(Motor, WallStopsMotion) {
  World w;
  w.xmax = 12;
  Kernel k(w);
  Sink s;
  k.start(1, "drive", act("self <-agt- drive"));
  run(k, s, 10);
  ASSERT_EQ(s.done.size(), 1u);
  EXPECT_FALSE(std::get<1>(s.done[0]));
  EXPECT_EQ(std::get<2>(s.done[0]), "wall");
  EXPECT_NEAR(k.world().robot.pos.x, 10, 1e-9);
}

TEST(Motor, GripperAndLift) {
  Kernel k;
  Sink s;
  k.start(1, "grab", act("self <-agt- grab"));
  k.start(2, "raise", act("self <-agt- raise"));
  run(k, s, 3);
  EXPECT_EQ(k.world().robot.gripper, Gripper::closed);
  EXPECT_EQ(k.world().robot.lift, Lift::up);
}

TEST(Voice, SayAndBeep) {
  Kernel k;
  Sink s;
  EXPECT_EQ(k.start(1, "say", act("self <-agt- say")), "nothing to say");
  EXPECT_EQ(k.start(2, "say", act("self <-agt- say <-txt- \"save me master\"")), "");
  k.tick(s);
  k.start(3, "beep", act("self <-agt- beep"));
  k.tick(s);
  EXPECT_EQ(s.said, (std::vector<std::string>{"save me master", "beep"}));
}

TEST(Perceive, ClassColorNeedsATrackedTarget) {
  Kernel k(one_object(14, 0));
  Sink s;
  EXPECT_EQ(k.start(1, "class_color", act("obj-1 <-hq- ? <-ako- color")), "untracked target obj-1");
  k.tick(s);   // proximity binds obj-1
  ASSERT_EQ(k.start(2, "class_color", act("obj-1 <-hq- ? <-ako- color")), "");
  ASSERT_EQ(k.start(3, "det_texture", act("obj-1 <-hq- striped")), "");
  k.tick(s);
  ASSERT_EQ(s.posts.size(), 3u);
  EXPECT_EQ(render(s.posts[1]), "obj-1 <-hq- orange <-ako- color");
  EXPECT_EQ(render(s.posts[2]), "obj-1 <-hq- not striped");
  EXPECT_EQ(k.start(4, "nope", act("self <-agt- nope")), "unknown function nope");
}

TEST(CallArgs, PullsVerbModifiersTargetAndText) {
  CallArgs a = call_args(act("self <-agt- say <-txt- hello"));
  EXPECT_EQ(a.verb, "say");
  EXPECT_EQ(a.text, "hello");
  EXPECT_FALSE(a.target);
  CallArgs b = call_args(act("obj-2 <-hq- striped"));
  EXPECT_EQ(*b.target, NodeId("obj-2"));
  EXPECT_EQ(b.verb, "striped");
}
