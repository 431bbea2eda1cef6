// oracles.hpp : independent reference computations used only by tests
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
// None of these call into the code paths they check. The match oracle
// enumerates every assignment, the chaining oracle runs unbounded forward
// chaining over plain strings, and the color oracle restates the pixel
// thresholds as nine independent membership tests.
//
///////////////////////////////////////////////////////////////////////////

#pragma once

#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "alia/semnet.hpp"

namespace oracle {

using alia::Binding;
using alia::Graphlet;
using alia::Node;
using alia::NodeId;
using alia::RoleLink;

//= Every total assignment of pattern nodes to store nodes that respects
//  kind, lex, negation, belief, predicate injectivity and all links.
inline std::set<Binding> brute_force_matches(const Graphlet& pat, const Graphlet& st, double min_belief) {
  std::set<Binding> out;
  size_t np = pat.size(), ns = st.size();
  if (np == 0) {
    out.insert(Binding{});
    return out;
  }
  if (ns == 0) return out;
  std::vector<size_t> a(np, 0);
  while (true) {
    bool ok = true;
    for (size_t p = 0; p < np && ok; p++) {
      const Node& pn = pat.node_at(p);
      const Node& sn = st.node_at(a[p]);
      if (pn.kind != sn.kind) ok = false;
      else if (!pn.lex.empty() && pn.lex != sn.lex) ok = false;
      else if (pn.negated != sn.negated) ok = false;
      else if (sn.belief < min_belief) ok = false;
      for (size_t q = 0; q < p && ok; q++)
        if (pn.is_predicate() && pat.node_at(q).is_predicate() && a[p] == a[q]) ok = false;
    }
    if (ok) {
      std::map<NodeId, NodeId> m;
      for (size_t p = 0; p < np; p++) m[pat.node_at(p).id] = st.node_at(a[p]).id;
      for (const RoleLink& l : pat.links())
        if (!st.has_link(m[l.from], l.role, m[l.to])) {
          ok = false;
          break;
        }
      if (ok) out.insert(Binding(m.begin(), m.end()));
    }
    // odometer increment
    size_t k = 0;
    while (k < np && ++a[k] == ns) a[k++] = 0;
    if (k == np) break;
  }
  return out;
}

//= Random small graphlet: objects then single- or double-link predicates
//  drawn from a tiny lexicon so collisions are common.
inline Graphlet random_graphlet(std::mt19937& rng, int max_nodes, const std::string& prefix, bool allow_wild) {
  static const char* lex[] = {"red", "big", "tiger", "color"};
  static const char* roles[] = {"hq", "ako"};
  std::uniform_int_distribution<int> count(1, max_nodes);
  int n = count(rng);
  int nobj = std::uniform_int_distribution<int>(1, std::max(1, n / 2))(rng);
  Graphlet g;
  std::vector<NodeId> ids;
  for (int i = 0; i < nobj; i++) {
    ids.emplace_back(prefix + "o" + std::to_string(i));
    g.add_object(ids.back());
  }
  for (int i = nobj; i < n; i++) {
    NodeId id(prefix + "p" + std::to_string(i));
    std::string l = lex[rng() % 4];
    if (allow_wild && rng() % 4 == 0) l.clear();
    double blf = (rng() % 5 == 0) ? 0.3 : 1.0;
    bool neg = (rng() % 7 == 0);
    g.add_predicate(id, l, blf, neg);
    g.add_link(id, roles[rng() % 2], ids[rng() % ids.size()]);
    if (rng() % 4 == 0) g.add_link(id, roles[rng() % 2], ids[rng() % ids.size()]);
    ids.push_back(id);
  }
  return g;
}

//= Unbounded forward chaining over "thing has property" strings, keeping
//  the step at which each property first appears.
inline std::map<std::string, int> chain_closure(const std::string& seed,
                                                const std::vector<std::pair<std::string, std::string>>& rules) {
  std::map<std::string, int> depth{{seed, 0}};
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& [from, to] : rules) {
      auto it = depth.find(from);
      if (it != depth.end() && depth.count(to) == 0) {
        depth[to] = it->second + 1;
        grew = true;
      }
    }
  }
  return depth;
}

//= Independent HSI conversion and nine membership predicates.
struct HsiRef {
  double h, s, i;
};

inline HsiRef hsi(double r, double g, double b) {
  double i = (r + g + b) / 3.0;
  double mn = std::min({r, g, b});
  double s = (i > 0.0) ? 1.0 - mn / i : 0.0;
  double num = 0.5 * ((r - g) + (r - b));
  double den = std::sqrt((r - g) * (r - g) + (r - b) * (g - b));
  double h = 0.0;
  if (den > 1e-12) {
    double th = std::acos(std::clamp(num / den, -1.0, 1.0)) * 180.0 / M_PI;
    h = (b <= g) ? th : 360.0 - th;
  }
  return {h, s, i};
}

inline std::vector<std::string> color_memberships(double r, double g, double b) {
  HsiRef c = hsi(r, g, b);
  bool colorful = c.s >= 0.25 && c.i >= 0.1 && c.i <= 0.95;
  std::vector<std::string> m;
  if (colorful && (c.h >= 345.0 || c.h < 15.0)) m.push_back("red");
  if (colorful && c.h >= 15.0 && c.h < 45.0) m.push_back("orange");
  if (colorful && c.h >= 45.0 && c.h < 75.0) m.push_back("yellow");
  if (colorful && c.h >= 75.0 && c.h < 165.0) m.push_back("green");
  if (colorful && c.h >= 165.0 && c.h < 255.0) m.push_back("blue");
  if (colorful && c.h >= 255.0 && c.h < 345.0) m.push_back("purple");
  if (!colorful && c.i < 0.2) m.push_back("black");
  if (!colorful && c.i > 0.8) m.push_back("white");
  if (!colorful && c.i >= 0.2 && c.i <= 0.8) m.push_back("gray");
  return m;
}

}  // namespace oracle
