// test_semnet.cpp : graphlets, matcher, instantiation and text forms
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

#include <random>
#include <set>

#include "alia/semnet.hpp"
#include "oracles.hpp"

using namespace alia;

namespace {

NodeId N(const char* s) { return NodeId(s); }

Graphlet color_fact() {
  Graphlet g;
  g.add_object(N("obj-1"));
  g.add_predicate(N("hq-2"), "orange");
  g.add_predicate(N("ako-3"), "color");
  g.add_link(N("hq-2"), "hq", N("obj-1"));
  g.add_link(N("ako-3"), "ako", N("hq-2"));
  return g;
}

// five objects; obj-1 and obj-4 are both orange and striped
Graphlet five_object_store() {
  Graphlet g;
  const char* props[5][2] = {{"orange", "striped"}, {"orange", ""}, {"striped", ""},
                             {"orange", "striped"}, {"black", "striped"}};
  int k = 0;
  for (int i = 0; i < 5; i++) {
    NodeId obj("obj-" + std::to_string(i + 1));
    g.add_object(obj);
    for (const char* p : props[i]) {
      if (*p == '\0') continue;
      NodeId pid("hq-" + std::to_string(++k));
      g.add_predicate(pid, p);
      g.add_link(pid, "hq", obj);
    }
  }
  return g;
}

// chain form is canonical when no parent has two same-labeled children
bool canonical(const Graphlet& g) {
  std::set<std::string> seen;
  for (const RoleLink& l : g.links()) {
    const Node& n = g.node(l.from);
    std::string key = l.to.name + "|" + l.role + "|" + n.lex + "|" + std::to_string(n.negated) + "|" +
                      std::to_string(n.belief);
    if (!seen.insert(key).second) return false;
  }
  return true;
}

}  // namespace

TEST(Graphlet, RejectsDanglingLinksAndUnknownRoles) {
  Graphlet g;
  g.add_object(N("a"));
  g.add_predicate(N("p"), "red");
  EXPECT_THROW(g.add_link(N("p"), "hq", N("zz")), StructuralError);
  EXPECT_THROW(g.add_link(N("p"), "likes", N("a")), StructuralError);
  EXPECT_THROW(g.add_link(N("a"), "hq", N("p")), StructuralError);
  EXPECT_THROW(g.add_object(N("a")), StructuralError);
  EXPECT_FALSE(g.closed());  // predicate without argument yet
  g.add_link(N("p"), "hq", N("a"));
  EXPECT_TRUE(g.closed());
}

TEST(Graphlet, LexIsNormalized) {
  Graphlet g;
  g.add_object(N("a"));
  g.add_predicate(N("p"), "  Save   ME master ");
  EXPECT_EQ(g.node(N("p")).lex, "save me master");
}

TEST(Graphlet, EraseDropsIncidentLinks) {
  Graphlet g = color_fact();
  g.erase({N("hq-2")});
  EXPECT_EQ(g.size(), 2u);
  EXPECT_TRUE(g.links().empty());
}

TEST(Match, SingleQualityBindsObject) {
  Graphlet pat;
  pat.add_object(N("X"));
  pat.add_predicate(N("q"), "orange");
  pat.add_link(N("q"), "hq", N("X"));
  Graphlet store;
  store.add_object(N("obj-1"));
  store.add_predicate(N("hq-1"), "orange");
  store.add_link(N("hq-1"), "hq", N("obj-1"));
  auto ms = match(pat, store);
  ASSERT_EQ(ms.size(), 1u);
  EXPECT_EQ(ms[0].at(N("X")), N("obj-1"));
}

TEST(Match, EmptyPatternYieldsOneEmptyBinding) {
  Graphlet empty;
  auto ms = match(empty, five_object_store());
  ASSERT_EQ(ms.size(), 1u);
  EXPECT_TRUE(ms[0].empty());
  EXPECT_EQ(match(empty, Graphlet{}).size(), 1u);
}

TEST(Match, ConjunctionAgreesWithBruteForce) {
  Graphlet pat;
  pat.add_object(N("X"));
  pat.add_predicate(N("a"), "orange");
  pat.add_predicate(N("b"), "striped");
  pat.add_link(N("a"), "hq", N("X"));
  pat.add_link(N("b"), "hq", N("X"));
  Graphlet store = five_object_store();
  auto ms = match(pat, store);
  std::set<Binding> got(ms.begin(), ms.end());
  auto want = oracle::brute_force_matches(pat, store, kDefaultMinBelief);
  EXPECT_EQ(want.size(), 2u);
  EXPECT_EQ(got, want);
  std::set<NodeId> objs;
  for (const auto& b : ms) objs.insert(b.at(N("X")));
  EXPECT_EQ(objs, (std::set<NodeId>{N("obj-1"), N("obj-4")}));
}

TEST(Match, NegationAndBeliefDiscipline) {
  Graphlet store;
  store.add_object(N("o"));
  store.add_predicate(N("s1"), "striped", 1.0, true);
  store.add_predicate(N("s2"), "orange", 0.4);
  store.add_link(N("s1"), "hq", N("o"));
  store.add_link(N("s2"), "hq", N("o"));

  Graphlet pos;
  pos.add_object(N("X"));
  pos.add_predicate(N("p"), "striped");
  pos.add_link(N("p"), "hq", N("X"));
  EXPECT_TRUE(match(pos, store).empty());

  Graphlet neg;
  neg.add_object(N("X"));
  neg.add_predicate(N("p"), "striped", 1.0, true);
  neg.add_link(N("p"), "hq", N("X"));
  EXPECT_EQ(match(neg, store).size(), 1u);

  Graphlet weak;
  weak.add_object(N("X"));
  weak.add_predicate(N("p"), "orange");
  weak.add_link(N("p"), "hq", N("X"));
  EXPECT_TRUE(match(weak, store, 0.5).empty());
  EXPECT_EQ(match(weak, store, 0.3).size(), 1u);
}

TEST(Match, PredicateNodesBindInjectively) {
  // two "red" conjuncts cannot both use the single red fact
  Graphlet store;
  store.add_object(N("o"));
  store.add_predicate(N("r"), "red");
  store.add_link(N("r"), "hq", N("o"));
  Graphlet pat;
  pat.add_object(N("X"));
  pat.add_predicate(N("a"), "red");
  pat.add_predicate(N("b"), "red");
  pat.add_link(N("a"), "hq", N("X"));
  pat.add_link(N("b"), "hq", N("X"));
  EXPECT_TRUE(match(pat, store).empty());
  // but two object variables may share one object
  Graphlet pat2;
  pat2.add_object(N("X"));
  pat2.add_object(N("Y"));
  pat2.add_predicate(N("a"), "red");
  pat2.add_link(N("a"), "hq", N("X"));
  EXPECT_EQ(match(pat2, store).size(), 1u);
}

TEST(Match, SeedPinsNodes) {
  Graphlet store = five_object_store();
  Graphlet pat;
  pat.add_object(N("X"));
  pat.add_predicate(N("a"), "striped");
  pat.add_link(N("a"), "hq", N("X"));
  auto ms = match(pat, store, 0.5, Binding{{N("X"), N("obj-3")}});
  ASSERT_EQ(ms.size(), 1u);
  EXPECT_EQ(ms[0].at(N("a")), N("hq-4"));
  EXPECT_TRUE(match(pat, store, 0.5, Binding{{N("X"), N("obj-2")}}).empty());
  EXPECT_TRUE(match(pat, store, 0.5, Binding{{N("X"), N("missing")}}).empty());
}

TEST(Match, WildcardLexMatchesAnyTerm) {
  Graphlet pat;
  pat.add_object(N("X"));
  pat.add_predicate(N("k"), "");
  pat.add_predicate(N("c"), "color");
  pat.add_link(N("k"), "hq", N("X"));
  pat.add_link(N("c"), "ako", N("k"));
  auto ms = match(pat, color_fact());
  ASSERT_EQ(ms.size(), 1u);
  EXPECT_EQ(ms[0].at(N("k")), N("hq-2"));
}

TEST(Match, DeterministicAndSound) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 200; trial++) {
    Graphlet store = oracle::random_graphlet(rng, 8, "s", false);
    Graphlet pat = oracle::random_graphlet(rng, 4, "p", true);
    auto a = match(pat, store, 0.5);
    auto b = match(pat, store, 0.5);
    ASSERT_EQ(a, b);
    for (const Binding& m : a) {
      ASSERT_EQ(m.size(), pat.size());
      for (const RoleLink& l : pat.links()) EXPECT_TRUE(store.has_link(m.at(l.from), l.role, m.at(l.to)));
    }
  }
}

TEST(Match, FirstMatchStopsEarly) {
  Graphlet pat;
  pat.add_object(N("X"));
  int calls = 0;
  for_each_match(pat, five_object_store(), 0.5, [&](const Binding&) { return ++calls < 2; });
  EXPECT_EQ(calls, 2);
}

TEST(Instantiate, ConclusionWithScaledBelief) {
  Graphlet tmpl;
  tmpl.add_object(N("X"));
  tmpl.add_predicate(N("t"), "tiger");
  tmpl.add_link(N("t"), "ako", N("X"));
  NameGen names;
  Graphlet out = instantiate(tmpl, Binding{{N("X"), N("obj-1")}}, 0.9, names);
  EXPECT_EQ(render(out), "obj-1 <-ako- tiger (0.90)");
  const Node& t = out.node_at(1);
  EXPECT_EQ(t.id, N("tiger-1"));
  EXPECT_DOUBLE_EQ(t.belief, 0.9);
}

TEST(Instantiate, IdentityIsIsomorphic) {
  Graphlet tmpl = color_fact();
  NameGen names;
  Graphlet out = instantiate(tmpl, Binding{{N("obj-1"), N("obj-1")}}, 1.0, names);
  EXPECT_TRUE(isomorphic(tmpl, out));
  EXPECT_EQ(render(out), render(tmpl));
}

TEST(Instantiate, ZeroScaleAnnihilatesPredicates) {
  NameGen names;
  Graphlet out = instantiate(color_fact(), Binding{{N("obj-1"), N("obj-9")}}, 0.0, names);
  for (const Node& n : out.nodes()) {
    if (n.is_predicate()) {
      EXPECT_EQ(n.belief, 0.0);
    }
  }
}

TEST(Instantiate, UnboundObjectIsStructuralError) {
  NameGen names;
  EXPECT_THROW(instantiate(color_fact(), Binding{}, 1.0, names), StructuralError);
  std::set<NodeId> fresh{N("obj-1"), N("hq-2"), N("ako-3")};
  EXPECT_NO_THROW(instantiate(color_fact(), Binding{}, 1.0, names, nullptr, &fresh));
}

TEST(Render, ArrowNotation) {
  Graphlet close;
  close.add_object(N("obj-1"));
  close.add_predicate(N("hq-2"), "close");
  close.add_link(N("hq-2"), "hq", N("obj-1"));
  EXPECT_EQ(render(close), "obj-1 <-hq- close");
  EXPECT_EQ(render(color_fact()), "obj-1 <-hq- orange <-ako- color");
  EXPECT_EQ(render(Graphlet{}), "");
}

TEST(Render, QuotesNegationAndBranches) {
  Graphlet g;
  g.add_object(N("self"));
  g.add_object(N("obj-1"));
  g.add_predicate(N("s"), "say");
  g.add_predicate(N("t"), "save me master");
  g.add_predicate(N("n"), "striped", 1.0, true);
  g.add_predicate(N("w"), "", 0.8);
  g.add_link(N("s"), "agt", N("self"));
  g.add_link(N("t"), "txt", N("s"));
  g.add_link(N("n"), "hq", N("obj-1"));
  g.add_link(N("w"), "ako", N("obj-1"));
  EXPECT_EQ(render(g),
            "obj-1 <-ako- ? (0.80)\n"
            "obj-1 <-hq- not striped\n"
            "self <-agt- say <-txt- \"save me master\"");
}

TEST(Render, RoundTripOnChainForm) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 100; trial++) {
    Graphlet g;
    NameGen names;
    int objs = 1 + rng() % 2;
    std::vector<NodeId> ids;
    for (int i = 0; i < objs; i++) {
      ids.emplace_back("obj-" + std::to_string(i + 1));
      g.add_object(ids.back());
    }
    static const char* lex[] = {"orange", "striped", "color", "save me master", ""};
    int preds = rng() % 5;
    for (int i = 0; i < preds; i++) {
      NodeId id("p-" + std::to_string(i));
      g.add_predicate(id, lex[rng() % 5], (rng() % 3 == 0) ? 0.75 : 1.0, rng() % 4 == 0);
      g.add_link(id, (rng() % 2) ? "hq" : "ako", ids[rng() % ids.size()]);
      ids.push_back(id);
    }
    if (!canonical(g)) continue;
    std::string text = render(g);
    Graphlet back = parse_render(text, names);
    EXPECT_EQ(render(back), text);
  }
}

TEST(Dump, RoundTrip) {
  Graphlet g = color_fact();
  g.add_predicate(N("q"), "say \"hi\"", 0.25, true);
  g.add_link(N("q"), "txt", N("obj-1"));
  std::string text = dump(g);
  EXPECT_NE(text.find("obj-1 object \"\" 1.000 0"), std::string::npos);
  EXPECT_NE(text.find("ako-3 -ako-> hq-2"), std::string::npos);
  Graphlet back = parse_dump(text);
  EXPECT_EQ(dump(back), text);
}

TEST(NameGen, StemsAndCounters) {
  NameGen names;
  EXPECT_EQ(names.fresh(Node{NodeId(), NodeKind::object, ""}), N("obj-1"));
  EXPECT_EQ(names.fresh(Node{NodeId(), NodeKind::object, ""}), N("obj-2"));
  EXPECT_EQ(names.fresh(Node{NodeId(), NodeKind::predicate, "save me master"}), N("save_me_mast-1"));
  EXPECT_EQ(names.fresh(Node{NodeId(), NodeKind::predicate, ""}), N("pred-1"));
}
