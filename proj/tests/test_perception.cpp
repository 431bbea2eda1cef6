// test_perception.cpp : color partition, dominant colors and stripes
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

#include "alia/perception.hpp"
#include "oracles.hpp"

using namespace alia;

namespace {

std::vector<std::string> names(const std::vector<CanonicalColor>& cs) {
  std::vector<std::string> out;
  for (CanonicalColor c : cs) out.emplace_back(to_string(c));
  return out;
}

}  // namespace

TEST(Color, CubeSweepIsAPartition) {
  const int n = 32;
  std::array<size_t, 9> hits{};
  for (int r = 0; r < n; r++)
    for (int g = 0; g < n; g++)
      for (int b = 0; b < n; b++) {
        double R = r / double(n - 1), Gv = g / double(n - 1), B = b / double(n - 1);
        auto want = oracle::color_memberships(R, Gv, B);
        ASSERT_EQ(want.size(), 1u) << R << " " << Gv << " " << B;
        CanonicalColor got = classify({R, Gv, B});
        ASSERT_EQ(std::string(to_string(got)), want[0]) << R << " " << Gv << " " << B;
        hits[size_t(got)]++;
      }
  for (size_t k = 0; k < hits.size(); k++) EXPECT_GT(hits[k], 0u) << kColorNames[k];
}

TEST(Color, ReferencePoints) {
  EXPECT_EQ(classify({1, 0.5, 0}), CanonicalColor::orange);
  EXPECT_EQ(classify({1, 0, 0}), CanonicalColor::red);
  EXPECT_EQ(classify({0, 0, 1}), CanonicalColor::blue);
  EXPECT_EQ(classify({0, 0, 0}), CanonicalColor::black);
  EXPECT_EQ(classify({1, 1, 1}), CanonicalColor::white);
  EXPECT_EQ(classify({0.5, 0.5, 0.5}), CanonicalColor::gray);
  Hsi o = to_hsi({1, 0.5, 0});
  EXPECT_NEAR(o.h, 30.0, 1e-9);
  EXPECT_NEAR(o.s, 1.0, 1e-9);
  EXPECT_NEAR(o.i, 0.5, 1e-9);
}

TEST(Color, HueAgreesWithOracleFormula) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 5000; i++) {
    double r = u(rng), g = u(rng), b = u(rng);
    auto want = oracle::hsi(r, g, b);
    Hsi got = to_hsi({r, g, b});
    if (want.s < 1e-6) continue;
    double d = std::abs(got.h - want.h);
    EXPECT_LT(std::min(d, 360 - d), 1e-6);
    EXPECT_NEAR(got.s, want.s, 1e-12);
    EXPECT_NEAR(got.i, want.i, 1e-12);
  }
}

TEST(Color, DominantTerms) {
  EXPECT_EQ(names(color_terms(uniform_grid(20, 20, parse_hex("ff8000")))), std::vector<std::string>{"orange"});
  EXPECT_EQ(names(color_terms(uniform_grid(20, 20, parse_hex("000000")))), std::vector<std::string>{"black"});
  EXPECT_EQ(names(color_terms(halves_grid(20, 20, parse_hex("000000"), parse_hex("ffffff")))),
            (std::vector<std::string>{"black", "white"}));
  EXPECT_EQ(names(color_terms(band_grid(100, 50, 10, parse_hex("ff8000"), parse_hex("000000")))),
            (std::vector<std::string>{"orange", "black"}));
}

TEST(Color, MinorityBelowShareIsDropped) {
  PixelGrid g = uniform_grid(10, 10, parse_hex("0000ff"));
  for (int x = 0; x < 10; x++) g.at(x, 0) = parse_hex("ff0000");   // 10%
  EXPECT_EQ(names(color_terms(g)), std::vector<std::string>{"blue"});
  g.mask.assign(g.mask.size(), 0);
  EXPECT_TRUE(color_terms(g).empty());
}

TEST(Color, HexParsing) {
  EXPECT_EQ(parse_hex("#FF0000"), (Rgb{1, 0, 0}));
  EXPECT_THROW(parse_hex("ff00"), ConfigError);
  EXPECT_THROW(parse_hex("gg0000"), ConfigError);
}

TEST(Texture, TenBandsAreStriped) {
  for (bool vertical : {true, false}) {
    auto t = texture(band_grid(100, 50, 10, parse_hex("ff8000"), parse_hex("000000"), vertical));
    EXPECT_TRUE(t.striped);
    EXPECT_GE(t.kept, 3);
  }
  EXPECT_TRUE(texture(band_grid(100, 50, 10, parse_hex("000000"), parse_hex("ffffff"))).striped);
}

TEST(Texture, UniformAndSingleEdgeAreNot) {
  auto u = texture(uniform_grid(100, 50, parse_hex("ff8000")));
  EXPECT_FALSE(u.striped);
  EXPECT_EQ(u.components, 0);
  auto h = texture(halves_grid(100, 50, parse_hex("000000"), parse_hex("ffffff")));
  EXPECT_FALSE(h.striped);
  EXPECT_EQ(h.kept, 1);
}

TEST(Texture, VerdictIsDeterministic) {
  PixelGrid g = band_grid(100, 50, 10, parse_hex("ff8000"), parse_hex("000000"));
  auto a = texture(g);
  for (int i = 0; i < 20; i++) {
    auto b = texture(g);
    EXPECT_EQ(a.striped, b.striped);
    EXPECT_EQ(a.kept, b.kept);
    EXPECT_EQ(a.coverage, b.coverage);
  }
}

TEST(Texture, MaskedDiskWithBandsIsStriped) {
  PixelGrid g = band_grid(80, 80, 10, parse_hex("ffffff"), parse_hex("000000"));
  for (int y = 0; y < 80; y++)
    for (int x = 0; x < 80; x++)
      if (std::hypot(x - 39.5, y - 39.5) > 39) g.mask[g.index(x, y)] = 0;
  EXPECT_TRUE(texture(g).striped);
}
