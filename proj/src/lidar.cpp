// Copyright 2026 The lflh Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lflh/lidar.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "lflh/common.hpp"
#include "lflh/grid.hpp"

namespace lflh {

std::vector<Vec2> LidarScan::hit_points() const {
  std::vector<Vec2> pts;
  pts.reserve(ranges.size());
  for (int i = 0; i < beams(); ++i) {
    if (ranges[i] >= max_range) continue;
    const double a = beam_angle(i);
    pts.push_back({ranges[i] * std::cos(a), ranges[i] * std::sin(a)});
  }
  return pts;
}

LidarScan raycast_circles(const Pose2& sensor,
                          const std::vector<CircleObstacle>& obstacles,
                          const SensorConfig& cfg) {
  LFLH_REQUIRE(cfg.beams >= 2, "raycast: need at least two beams");
  LidarScan scan;
  scan.fov = cfg.fov;
  scan.max_range = cfg.max_range;
  scan.ranges.assign(cfg.beams, cfg.max_range);
  for (int i = 0; i < cfg.beams; ++i) {
    const double a = sensor.phi + cfg.beam_angle(i);
    const double dx = std::cos(a), dy = std::sin(a);
    double best = cfg.max_range;
    for (const auto& ob : obstacles) {
      const double ox = ob.x - sensor.x, oy = ob.y - sensor.y;
      const double b = dx * ox + dy * oy;                // ray-frame center x
      const double c2 = ox * ox + oy * oy - ob.radius * ob.radius;
      const double disc = b * b - c2;
      if (disc < 0.0) continue;
      const double root = std::sqrt(disc);
      double t = b - root;
      if (t < 0.0) t = b + root;  // sensor inside the circle
      if (t >= 0.0 && t < best) best = t;
    }
    scan.ranges[i] = best;
  }
  return scan;
}

LidarScan raycast_grid(const Pose2& sensor, const OccupancyGrid& grid,
                       const SensorConfig& cfg) {
  LFLH_REQUIRE(cfg.beams >= 2, "raycast: need at least two beams");
  const int scx = grid.cell_x(sensor.x), scy = grid.cell_y(sensor.y);
  if (grid.in_bounds(scx, scy))
    LFLH_REQUIRE(!grid.occupied(scx, scy),
                 "raycast_grid: sensor inside an occupied cell");

  LidarScan scan;
  scan.fov = cfg.fov;
  scan.max_range = cfg.max_range;
  scan.ranges.assign(cfg.beams, cfg.max_range);
  const double inf = std::numeric_limits<double>::infinity();

  for (int i = 0; i < cfg.beams; ++i) {
    const double a = sensor.phi + cfg.beam_angle(i);
    const double dx = std::cos(a), dy = std::sin(a);
    int cx = scx, cy = scy;
    const int step_x = dx > 0 ? 1 : -1;
    const int step_y = dy > 0 ? 1 : -1;
    double t_max_x = inf, t_max_y = inf, t_delta_x = inf, t_delta_y = inf;
    if (dx != 0.0) {
      const double next_bx =
          grid.origin.x + (dx > 0 ? (cx + 1) : cx) * grid.resolution;
      t_max_x = (next_bx - sensor.x) / dx;
      t_delta_x = grid.resolution / std::abs(dx);
    }
    if (dy != 0.0) {
      const double next_by =
          grid.origin.y + (dy > 0 ? (cy + 1) : cy) * grid.resolution;
      t_max_y = (next_by - sensor.y) / dy;
      t_delta_y = grid.resolution / std::abs(dy);
    }
    // Amanatides-Woo traversal; cells outside the grid are treated as free
    // so open maps report max_range.
    while (true) {
      double t_entry;
      if (t_max_x < t_max_y) {
        t_entry = t_max_x;
        t_max_x += t_delta_x;
        cx += step_x;
      } else {
        t_entry = t_max_y;
        t_max_y += t_delta_y;
        cy += step_y;
      }
      if (t_entry > cfg.max_range) break;
      if (grid.in_bounds(cx, cy) && grid.occupied(cx, cy)) {
        scan.ranges[i] = t_entry;
        break;
      }
      // left the grid moving away along either axis: nothing left to hit
      if ((step_x > 0 ? cx >= grid.width : cx < 0) ||
          (step_y > 0 ? cy >= grid.height : cy < 0))
        break;
    }
  }
  return scan;
}

void save_scans(const std::string& path, const std::vector<LidarScan>& scans) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write scans: " + path);
  out << "# lflh-scans 1\n";
  const int beams = scans.empty() ? 0 : scans[0].beams();
  const double fov = scans.empty() ? 0.0 : scans[0].fov;
  const double max_range = scans.empty() ? 0.0 : scans[0].max_range;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "# beams=%d fov=%.17g max_range=%.17g count=%zu\n",
                beams, fov, max_range, scans.size());
  out << buf;
  for (const auto& s : scans) {
    for (int i = 0; i < s.beams(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.9g", s.ranges[i]);
      out << buf << (i + 1 == s.beams() ? "" : ",");
    }
    out << "\n";
  }
  if (!out) throw std::runtime_error("failed writing scans: " + path);
}

std::vector<LidarScan> load_scans(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifact("missing scan file: " + path);
  std::string line;
  std::getline(in, line);
  if (line != "# lflh-scans 1")
    throw std::runtime_error("unrecognized scan header: " + path);
  std::getline(in, line);
  int beams = 0;
  double fov = 0.0, max_range = 0.0;
  std::size_t count = 0;
  if (std::sscanf(line.c_str(), "# beams=%d fov=%lg max_range=%lg count=%zu",
                  &beams, &fov, &max_range, &count) != 4)
    throw std::runtime_error("bad scan metadata: " + path);
  std::vector<LidarScan> scans;
  scans.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    if (!std::getline(in, line))
      throw std::runtime_error("truncated scan file: " + path);
    LidarScan s;
    s.fov = fov;
    s.max_range = max_range;
    s.ranges.reserve(beams);
    std::istringstream row(line);
    std::string tok;
    while (std::getline(row, tok, ','))
      s.ranges.push_back(std::strtod(tok.c_str(), nullptr));
    if (static_cast<int>(s.ranges.size()) != beams)
      throw std::runtime_error("bad scan row length in " + path);
    scans.push_back(std::move(s));
  }
  return scans;
}

}  // namespace lflh
