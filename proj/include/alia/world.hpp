// world.hpp : simulated stage, robot pose and scenario files
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
// Scenario file, one directive per line, '#' starts a comment:
//
//   world <xmin> <ymin> <xmax> <ymax>
//   robot <x> <y> <heading>
//   object <name> <x> <y> <radius>
//     velocity <vx> <vy>
//     pixels <w> <h> uniform <hex>
//     pixels <w> <h> bands <n> <hex> <hex> [vertical|horizontal]
//     pixels <w> <h> halves <hex> <hex>
//     row <hex|.> ...          (repeat; '.' is outside the object)
//     ppm <file>               (relative to the scenario file)
//   end
//
///////////////////////////////////////////////////////////////////////////

#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "alia/error.hpp"
#include "alia/perception.hpp"
#include "alia/semnet.hpp"

namespace alia {

struct Vec2 {
  double x = 0, y = 0;
  bool operator==(const Vec2&) const = default;
};

inline double norm_heading(double h) {
  h = std::fmod(h, 360.0);
  if (h < 0) h += 360.0;
  if (h >= 360.0) h -= 360.0;
  return h;
}

struct WorldObject {
  std::string name;               ///< world id
  Vec2 pos;                       ///< cm
  double radius = 5;              ///< cm
  Vec2 velocity;                  ///< cm per cycle
  PixelGrid pixels;
  std::optional<NodeId> tracked;  ///< bound on first detection, never changed
  bool inside = false;            ///< currently in personal space
};

enum class Gripper { open, closed };
enum class Lift { down, up };

struct RobotState {
  Vec2 pos;
  double heading = 0;      ///< degrees, 0 = +x, counterclockwise
  Gripper gripper = Gripper::open;
  Lift lift = Lift::down;
  double speed = 5;        ///< cm per cycle
  double turn_rate = 15;   ///< degrees per cycle
};

struct World {
  double xmin = -100, ymin = -100, xmax = 100, ymax = 100;
  RobotState robot;
  std::vector<WorldObject> objects;

  bool inside_bounds(Vec2 p) const { return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax; }

  WorldObject* object(const std::string& name) {
    for (WorldObject& o : objects)
      if (o.name == name) return &o;
    return nullptr;
  }

  WorldObject* tracked(const NodeId& id) {
    for (WorldObject& o : objects)
      if (o.tracked && *o.tracked == id) return &o;
    return nullptr;
  }
};

//= Distance from the robot to the object's edge and bearing relative to heading.
inline std::pair<double, double> range_bearing(const RobotState& r, const WorldObject& o) {
  double dx = o.pos.x - r.pos.x, dy = o.pos.y - r.pos.y;
  double dist = std::hypot(dx, dy) - o.radius;
  double bearing = norm_heading(std::atan2(dy, dx) * 180.0 / M_PI - r.heading);
  if (bearing > 180.0) bearing -= 360.0;
  return {dist, bearing};
}

namespace detail {

inline std::vector<std::string> words(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> w;
  std::string t;
  while (in >> t) {
    if (t[0] == '#') break;
    w.push_back(t);
  }
  return w;
}

inline double number(const std::string& s, int line) {
  try {
    size_t used = 0;
    double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("line " + std::to_string(line) + ": expected a number, got '" + s + "'");
}

}  // namespace detail

//= Parse scenario text. throws ConfigError naming the line
inline World parse_scenario(const std::string& text, const std::filesystem::path& base = ".") {
  World w;
  std::istringstream in(text);
  std::string line;
  int ln = 0;
  WorldObject* cur = nullptr;
  std::vector<std::vector<std::string>> rows;
  auto fail = [&](const std::string& msg) { throw ConfigError("line " + std::to_string(ln) + ": " + msg); };
  auto num = [&](const std::string& s) { return detail::number(s, ln); };
  auto finish_rows = [&]() {
    if (rows.empty()) return;
    int h = int(rows.size()), wd = int(rows[0].size());
    PixelGrid g(wd, h);
    for (int y = 0; y < h; y++) {
      if (int(rows[y].size()) != wd) fail("ragged pixel rows");
      for (int x = 0; x < wd; x++) {
        if (rows[y][x] == ".") g.mask[g.index(x, y)] = 0;
        else g.at(x, y) = parse_hex(rows[y][x]);
      }
    }
    cur->pixels = std::move(g);
    rows.clear();
  };
  while (std::getline(in, line)) {
    ln++;
    auto t = detail::words(line);
    if (t.empty()) continue;
    const std::string& k = t[0];
    try {
      if (cur == nullptr) {
        if (k == "world" && t.size() == 5) {
          w.xmin = num(t[1]), w.ymin = num(t[2]), w.xmax = num(t[3]), w.ymax = num(t[4]);
          if (w.xmin >= w.xmax || w.ymin >= w.ymax) fail("empty world");
        } else if (k == "robot" && t.size() == 4) {
          w.robot.pos = {num(t[1]), num(t[2])};
          w.robot.heading = norm_heading(num(t[3]));
        } else if (k == "object" && t.size() == 5) {
          if (w.object(t[1]) != nullptr) fail("duplicate object " + t[1]);
          WorldObject o;
          o.name = t[1];
          o.pos = {num(t[2]), num(t[3])};
          o.radius = num(t[4]);
          if (o.radius <= 0) fail("radius must be positive");
          w.objects.push_back(std::move(o));
          cur = &w.objects.back();
        } else {
          fail("unexpected '" + line + "'");
        }
        continue;
      }
      if (k == "end" && t.size() == 1) {
        finish_rows();
        if (cur->pixels.mask_count() == 0) fail("object " + cur->name + " has no pixels");
        cur = nullptr;
      } else if (k == "velocity" && t.size() == 3) {
        cur->velocity = {num(t[1]), num(t[2])};
      } else if (k == "row" && t.size() >= 2) {
        rows.emplace_back(t.begin() + 1, t.end());
      } else if (k == "ppm" && t.size() == 2) {
        cur->pixels = load_ppm((base / t[1]).string());
      } else if (k == "pixels" && t.size() >= 5) {
        int pw = int(num(t[1])), ph = int(num(t[2]));
        if (pw <= 0 || ph <= 0) fail("pixel grid must be non-empty");
        if (t[3] == "uniform" && t.size() == 5) {
          cur->pixels = uniform_grid(pw, ph, parse_hex(t[4]));
        } else if (t[3] == "halves" && t.size() == 6) {
          cur->pixels = halves_grid(pw, ph, parse_hex(t[4]), parse_hex(t[5]));
        } else if (t[3] == "bands" && (t.size() == 7 || t.size() == 8)) {
          bool vertical = t.size() == 7 || t[7] == "vertical";
          if (t.size() == 8 && t[7] != "vertical" && t[7] != "horizontal") fail("band direction");
          cur->pixels = band_grid(pw, ph, int(num(t[4])), parse_hex(t[5]), parse_hex(t[6]), vertical);
        } else {
          fail("unknown pixel form");
        }
      } else {
        fail("unexpected '" + line + "' inside object");
      }
    } catch (const ConfigError& e) {
      std::string m = e.what();
      if (m.rfind("line ", 0) == 0) throw;
      fail(m);
    }
  }
  if (cur != nullptr) fail("object " + cur->name + " not closed with 'end'");
  return w;
}

inline World load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path.parent_path());
}

}  // namespace alia
