// perception.hpp : pixel grids, canonical colors and stripe detection
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
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "alia/error.hpp"

namespace alia {

struct Rgb {
  double r = 0, g = 0, b = 0;
  bool operator==(const Rgb&) const = default;
};

//= "ff8000" -> (1, 0.502, 0). throws ConfigError
inline Rgb parse_hex(std::string_view hex) {
  if (hex.size() == 7 && hex[0] == '#') hex.remove_prefix(1);
  if (hex.size() != 6) throw ConfigError("bad color '" + std::string(hex) + "'");
  auto byte = [&](size_t i) {
    unsigned v = 0;
    for (size_t k = i; k < i + 2; k++) {
      char c = static_cast<char>(std::tolower(static_cast<unsigned char>(hex[k])));
      v *= 16;
      if (c >= '0' && c <= '9') v += static_cast<unsigned>(c - '0');
      else if (c >= 'a' && c <= 'f') v += static_cast<unsigned>(c - 'a' + 10);
      else throw ConfigError("bad color '" + std::string(hex) + "'");
    }
    return v / 255.0;
  };
  return {byte(0), byte(2), byte(4)};
}

struct PixelGrid {
  int width = 0, height = 0;
  std::vector<Rgb> rgb;
  std::vector<uint8_t> mask;   ///< 1 where the object is

  PixelGrid() = default;
  PixelGrid(int w, int h, Rgb fill = {}) : width(w), height(h), rgb(size_t(w) * h, fill), mask(size_t(w) * h, 1) {}

  size_t index(int x, int y) const { return size_t(y) * width + x; }
  Rgb& at(int x, int y) { return rgb[index(x, y)]; }
  const Rgb& at(int x, int y) const { return rgb[index(x, y)]; }
  bool in_mask(int x, int y) const {
    return x >= 0 && y >= 0 && x < width && y < height && mask[index(x, y)] != 0;
  }
  size_t mask_count() const { return size_t(std::count(mask.begin(), mask.end(), 1)); }
};

inline PixelGrid uniform_grid(int w, int h, Rgb c) { return PixelGrid(w, h, c); }

//= n equal bands alternating a, b; vertical bands change along x.
inline PixelGrid band_grid(int w, int h, int n, Rgb a, Rgb b, bool vertical = true) {
  PixelGrid g(w, h);
  for (int y = 0; y < h; y++)
    for (int x = 0; x < w; x++) {
      int along = vertical ? x : y;
      int span = vertical ? w : h;
      int band = along * n / span;
      g.at(x, y) = (band % 2 == 0) ? a : b;
    }
  return g;
}

inline PixelGrid halves_grid(int w, int h, Rgb a, Rgb b) { return band_grid(w, h, 2, a, b, true); }

//= Binary (P6) or ASCII (P3) portable pixmap. throws ConfigError
inline PixelGrid load_ppm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open pixmap " + path);
  std::string magic;
  in >> magic;
  auto next_int = [&]() {
    std::string tok;
    while (in >> tok) {
      if (tok[0] == '#') {
        std::string rest;
        std::getline(in, rest);
        continue;
      }
      return std::stoi(tok);
    }
    throw ConfigError("truncated pixmap " + path);
  };
  if (magic != "P3" && magic != "P6") throw ConfigError("not a P3/P6 pixmap: " + path);
  int w = next_int(), h = next_int(), maxv = next_int();
  if (w <= 0 || h <= 0 || maxv <= 0 || maxv > 255) throw ConfigError("bad pixmap header " + path);
  PixelGrid g(w, h);
  if (magic == "P6") in.get();
  for (size_t i = 0; i < g.rgb.size(); i++) {
    int c[3];
    for (int& v : c) {
      if (magic == "P3") v = next_int();
      else {
        int ch = in.get();
        if (ch == EOF) throw ConfigError("truncated pixmap " + path);
        v = ch;
      }
    }
    g.rgb[i] = {c[0] / double(maxv), c[1] / double(maxv), c[2] / double(maxv)};
  }
  return g;
}

///////////////////////////////////////////////////////////////////////////
//                                 Color                                 //
///////////////////////////////////////////////////////////////////////////

enum class CanonicalColor { red, orange, yellow, green, blue, purple, black, gray, white };

inline constexpr std::array<std::string_view, 9> kColorNames{"red",    "orange", "yellow", "green", "blue",
                                                             "purple", "black",  "gray",   "white"};

inline std::string_view to_string(CanonicalColor c) { return kColorNames[static_cast<size_t>(c)]; }

struct Hsi {
  double h = 0, s = 0, i = 0;   ///< hue in degrees [0,360)
};

inline Hsi to_hsi(const Rgb& c) {
  Hsi out;
  out.i = (c.r + c.g + c.b) / 3.0;
  double mn = std::min({c.r, c.g, c.b});
  out.s = (out.i > 0.0) ? 1.0 - mn / out.i : 0.0;
  double h = std::atan2(std::sqrt(3.0) * (c.g - c.b), 2.0 * c.r - c.g - c.b) * 180.0 / M_PI;
  out.h = (h < 0.0) ? h + 360.0 : h;
  if (out.h >= 360.0) out.h -= 360.0;
  return out;
}

struct PerceptionConfig {
  double min_saturation = 0.25;
  double min_intensity = 0.10;      ///< colorful range
  double max_intensity = 0.95;
  double black_below = 0.20;
  double white_above = 0.80;
  std::array<double, 6> hue_edges{15, 45, 75, 165, 255, 345};   ///< orange..purple start, red starts at the last
  double min_share = 0.20;          ///< histogram share for a color term
  double sobel_ratio = 0.5;
  int min_lines = 3;
  double min_coverage = 0.10;
  double min_length = 0.20;         ///< of the mask bounding-box diagonal
};

inline CanonicalColor classify(const Rgb& c, const PerceptionConfig& cfg = {}) {
  Hsi p = to_hsi(c);
  bool colorful = p.s >= cfg.min_saturation && p.i >= cfg.min_intensity && p.i <= cfg.max_intensity;
  if (!colorful) {
    if (p.i < cfg.black_below) return CanonicalColor::black;
    if (p.i > cfg.white_above) return CanonicalColor::white;
    return CanonicalColor::gray;
  }
  const auto& e = cfg.hue_edges;
  if (p.h >= e[5] || p.h < e[0]) return CanonicalColor::red;
  for (int k = 0; k < 5; k++)
    if (p.h < e[k + 1]) return static_cast<CanonicalColor>(k + 1);
  return CanonicalColor::red;
}

//= Histogram of canonical colors over the mask.
inline std::array<size_t, 9> color_histogram(const PixelGrid& g, const PerceptionConfig& cfg = {}) {
  std::array<size_t, 9> hist{};
  for (size_t i = 0; i < g.rgb.size(); i++)
    if (g.mask[i]) hist[static_cast<size_t>(classify(g.rgb[i], cfg))]++;
  return hist;
}

//= Every color holding at least min_share of the mask, in canonical order.
inline std::vector<CanonicalColor> color_terms(const PixelGrid& g, const PerceptionConfig& cfg = {}) {
  auto hist = color_histogram(g, cfg);
  double total = double(g.mask_count());
  std::vector<CanonicalColor> out;
  if (total == 0) return out;
  for (size_t k = 0; k < hist.size(); k++)
    if (double(hist[k]) / total >= cfg.min_share) out.push_back(static_cast<CanonicalColor>(k));
  return out;
}

///////////////////////////////////////////////////////////////////////////
//                                Texture                                //
///////////////////////////////////////////////////////////////////////////

struct TextureReport {
  int components = 0;     ///< all edge components
  int kept = 0;           ///< long enough to count as lines
  double coverage = 0;    ///< kept edge pixels / mask pixels
  bool striped = false;
};

//= Sobel gradient magnitude over the mask; neighbors outside use the center value.
inline std::vector<double> sobel_magnitude(const PixelGrid& g) {
  std::vector<double> inten(g.rgb.size());
  for (size_t i = 0; i < g.rgb.size(); i++) inten[i] = (g.rgb[i].r + g.rgb[i].g + g.rgb[i].b) / 3.0;
  std::vector<double> mag(g.rgb.size(), 0.0);
  static const int kx[3][3] = {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}};
  static const int ky[3][3] = {{-1, -2, -1}, {0, 0, 0}, {1, 2, 1}};
  for (int y = 0; y < g.height; y++)
    for (int x = 0; x < g.width; x++) {
      if (!g.in_mask(x, y)) continue;
      double center = inten[g.index(x, y)];
      double gx = 0, gy = 0;
      for (int dy = -1; dy <= 1; dy++)
        for (int dx = -1; dx <= 1; dx++) {
          double v = g.in_mask(x + dx, y + dy) ? inten[g.index(x + dx, y + dy)] : center;
          gx += kx[dy + 1][dx + 1] * v;
          gy += ky[dy + 1][dx + 1] * v;
        }
      mag[g.index(x, y)] = std::sqrt(gx * gx + gy * gy);
    }
  return mag;
}

inline TextureReport texture(const PixelGrid& g, const PerceptionConfig& cfg = {}) {
  TextureReport rep;
  size_t area = g.mask_count();
  if (area == 0) return rep;
  auto mag = sobel_magnitude(g);
  double peak = *std::max_element(mag.begin(), mag.end());
  if (peak <= 1e-12) return rep;
  double cut = cfg.sobel_ratio * peak;

  int bx0 = g.width, by0 = g.height, bx1 = -1, by1 = -1;
  for (int y = 0; y < g.height; y++)
    for (int x = 0; x < g.width; x++)
      if (g.in_mask(x, y)) {
        bx0 = std::min(bx0, x), by0 = std::min(by0, y);
        bx1 = std::max(bx1, x), by1 = std::max(by1, y);
      }
  double diag = std::hypot(bx1 - bx0 + 1, by1 - by0 + 1);

  std::vector<int> label(mag.size(), 0);
  size_t kept_pixels = 0;
  std::vector<std::pair<int, int>> stack;
  for (int y = 0; y < g.height; y++)
    for (int x = 0; x < g.width; x++) {
      size_t i = g.index(x, y);
      if (!g.in_mask(x, y) || mag[i] < cut || label[i] != 0) continue;
      rep.components++;
      int cx0 = x, cx1 = x, cy0 = y, cy1 = y;
      size_t count = 0;
      stack.assign(1, {x, y});
      label[i] = rep.components;
      while (!stack.empty()) {
        auto [px, py] = stack.back();
        stack.pop_back();
        count++;
        cx0 = std::min(cx0, px), cx1 = std::max(cx1, px);
        cy0 = std::min(cy0, py), cy1 = std::max(cy1, py);
        for (int dy = -1; dy <= 1; dy++)
          for (int dx = -1; dx <= 1; dx++) {
            int nx = px + dx, ny = py + dy;
            if (!g.in_mask(nx, ny)) continue;
            size_t j = g.index(nx, ny);
            if (label[j] != 0 || mag[j] < cut) continue;
            label[j] = rep.components;
            stack.emplace_back(nx, ny);
          }
      }
      int extent = std::max(cx1 - cx0 + 1, cy1 - cy0 + 1);
      if (extent >= cfg.min_length * diag) {
        rep.kept++;
        kept_pixels += count;
      }
    }
  rep.coverage = double(kept_pixels) / double(area);
  rep.striped = rep.kept >= cfg.min_lines && rep.coverage >= cfg.min_coverage;
  return rep;
}

}  // namespace alia
