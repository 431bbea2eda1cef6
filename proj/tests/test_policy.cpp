// test_policy.cpp : operator store, applicability and agenda ordering
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

#include <cmath>
#include <map>

#include "alia/policy.hpp"
#include "fake_host.hpp"

using namespace alia;
using testing_support::fcn_operator;
using testing_support::G;

namespace {

std::vector<Candidate> weighted(const std::vector<double>& w) {
  std::vector<Candidate> c;
  for (size_t i = 0; i < w.size(); i++) c.push_back({int(i + 1), {}, w[i]});
  return c;
}

}  // namespace

TEST(Operator, ValidationRejectsBrokenOperators) {
  Operator ok = fcn_operator(DirectiveKind::FIND, "X <-ako- ?", "f", 0.5);
  EXPECT_NO_THROW(validate_operator(ok));

  Operator bad = ok;
  bad.preference = 0;
  EXPECT_THROW(validate_operator(bad), StructuralError);
  bad = ok;
  bad.preference = 1.5;
  EXPECT_THROW(validate_operator(bad), StructuralError);
  bad = ok;
  bad.body.clear();
  EXPECT_THROW(validate_operator(bad), StructuralError);
  bad = ok;
  bad.trigger_kind = DirectiveKind::FCN;
  EXPECT_THROW(validate_operator(bad), StructuralError);
  bad = ok;
  bad.body[0].fn.clear();
  EXPECT_THROW(validate_operator(bad), StructuralError);
  bad = ok;
  bad.body[0].payload = G("Y <-hq- red");
  EXPECT_THROW(validate_operator(bad), StructuralError);
}

TEST(OperatorStore, SameSentenceKeepsLargerPreference) {
  OperatorStore s;
  int a = s.add(fcn_operator(DirectiveKind::FIND, "X <-ako- ?", "f", 0.5));
  int b = s.add(fcn_operator(DirectiveKind::FIND, "X <-ako- ?", "f", 0.8));
  int c = s.add(fcn_operator(DirectiveKind::FIND, "X <-ako- ?", "f", 0.3));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
  EXPECT_EQ(s.size(), 1u);
  EXPECT_DOUBLE_EQ(s.get(a).preference, 0.8);
  EXPECT_THROW(s.get(99), LookupError);
}

TEST(OperatorStore, ApplicableNeedsTriggerAndEnablement) {
  OperatorStore s;
  int plain = s.add(fcn_operator(DirectiveKind::FIND, "X <-ako- ?", "plain", 0.9));
  int gated = s.add(fcn_operator(DirectiveKind::FIND, "X <-ako- ?", "gated", 0.4, "X <-hq- orange"));
  s.add(fcn_operator(DirectiveKind::CHK, "X <-hq- striped", "other", 1.0));

  Graphlet focus = G("obj-1 <-ako- ?");
  Graphlet store;
  auto c = s.applicable(DirectiveKind::FIND, focus, store);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].op_id, plain);
  EXPECT_DOUBLE_EQ(c[0].weight, 0.9);
  EXPECT_EQ(c[0].binding.at(NodeId("X")), NodeId("obj-1"));

  store = G("obj-1 <-hq- orange\nobj-2 <-hq- orange");
  c = s.applicable(DirectiveKind::FIND, focus, store);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[1].op_id, gated);
  // enablement is evaluated under the trigger binding: obj-2 never shows up
  EXPECT_EQ(c[1].binding.at(NodeId("X")), NodeId("obj-1"));
}

TEST(Agenda, OrderIsAPermutationAndDeterministic) {
  auto in = weighted({0.9, 0.1, 0.5, 0.5, 0.2});
  for (uint64_t seed = 0; seed < 200; seed++) {
    auto a = order_candidates(in, seed);
    auto b = order_candidates(in, seed);
    EXPECT_EQ(a, b);
    std::set<int> ids;
    for (const Candidate& c : a) ids.insert(c.op_id);
    EXPECT_EQ(ids.size(), in.size());
  }
  EXPECT_TRUE(order_candidates({}, 3).empty());
}

TEST(Agenda, UnitDrawInHalfOpenInterval) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 10000; i++) {
    double u = unit_draw(rng);
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

// sampling without replacement: P(first=i) = w_i / W and
// P(second=j | first=i) = w_j / (W - w_i)
TEST(Agenda, FirstTwoPositionsFollowWeights) {
  std::vector<double> w{0.6, 0.3, 0.1};
  double total = 0.6 + 0.3 + 0.1;
  std::map<std::pair<int, int>, int> seen;
  const int n = 40000;
  for (int s = 0; s < n; s++) {
    auto o = order_candidates(weighted(w), uint64_t(s) * 2654435761u + 17);
    seen[{o[0].op_id, o[1].op_id}]++;
  }
  for (int i = 0; i < 3; i++)
    for (int j = 0; j < 3; j++) {
      if (i == j) continue;
      double p = w[i] / total * w[j] / (total - w[i]);
      double got = double(seen[{i + 1, j + 1}]) / n;
      double sd = std::sqrt(p * (1 - p) / n);
      EXPECT_NEAR(got, p, 5 * sd + 1e-3) << i << "," << j;
    }
}

TEST(Instantiate, BodyGetsFreshPredicatesAndSelf) {
  DirectiveTemplate d;
  d.kind = DirectiveKind::DO;
  d.payload = G("self <-agt- flee");
  NameGen names;
  Graphlet g = instantiate_body(d, {}, names);
  EXPECT_EQ(render(g), "self <-agt- flee");
  Graphlet h = instantiate_body(d, {}, names);
  EXPECT_NE(g.node_at(1).id, h.node_at(1).id);

  DirectiveTemplate c;
  c.kind = DirectiveKind::CHK;
  c.payload = G("X <-hq- striped");
  Binding b{{NodeId("X"), NodeId("obj-4")}};
  EXPECT_EQ(render(instantiate_body(c, b, names)), "obj-4 <-hq- striped");
}
