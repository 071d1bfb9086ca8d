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

#include "lflh/grid.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "lflh/common.hpp"

namespace lflh {

OccupancyGrid make_grid(int width, int height, double resolution,
                        bool occupied) {
  LFLH_REQUIRE(width > 0 && height > 0, "grid dims must be positive");
  LFLH_REQUIRE(resolution > 0.0, "grid resolution must be positive");
  OccupancyGrid g;
  g.width = width;
  g.height = height;
  g.resolution = resolution;
  g.cells.assign(static_cast<std::size_t>(width) * height, occupied ? 1 : 0);
  return g;
}

OccupancyGrid inflate(const OccupancyGrid& grid, double radius) {
  OccupancyGrid out = grid;
  const int r = static_cast<int>(std::ceil(radius / grid.resolution));
  if (r <= 0) return out;
  // offsets within the inflation disc (center-to-center distance)
  std::vector<std::pair<int, int>> disc;
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx)
      if (std::hypot(dx * grid.resolution, dy * grid.resolution) <= radius)
        disc.emplace_back(dx, dy);
  for (int cy = 0; cy < grid.height; ++cy) {
    for (int cx = 0; cx < grid.width; ++cx) {
      if (!grid.occupied(cx, cy)) continue;
      for (const auto& [dx, dy] : disc) {
        const int nx = cx + dx, ny = cy + dy;
        if (out.in_bounds(nx, ny)) out.set(nx, ny, true);
      }
    }
  }
  return out;
}

void save_grid(const std::string& path, const OccupancyGrid& grid,
               const std::string& header_comment) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write grid: " + path);
  out << "# lflh-grid 1\n";
  if (!header_comment.empty()) out << "# " << header_comment << "\n";
  out << grid.width << " " << grid.height << " " << grid.resolution << " "
      << grid.origin.x << " " << grid.origin.y << "\n";
  for (int cy = 0; cy < grid.height; ++cy) {
    for (int cx = 0; cx < grid.width; ++cx)
      out << (grid.occupied(cx, cy) ? '1' : '0');
    out << "\n";
  }
  if (!out) throw std::runtime_error("failed writing grid: " + path);
}

OccupancyGrid load_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifact("missing grid file: " + path);
  std::string line;
  std::getline(in, line);
  if (line != "# lflh-grid 1")
    throw std::runtime_error("unrecognized grid header: " + path);
  while (std::getline(in, line) && !line.empty() && line[0] == '#') {
  }
  OccupancyGrid g;
  std::istringstream meta(line);
  meta >> g.width >> g.height >> g.resolution >> g.origin.x >> g.origin.y;
  if (!meta || g.width <= 0 || g.height <= 0)
    throw std::runtime_error("bad grid metadata: " + path);
  g.cells.assign(static_cast<std::size_t>(g.width) * g.height, 0);
  for (int cy = 0; cy < g.height; ++cy) {
    if (!std::getline(in, line) ||
        static_cast<int>(line.size()) < g.width)
      throw std::runtime_error("truncated grid file: " + path);
    for (int cx = 0; cx < g.width; ++cx) g.set(cx, cy, line[cx] == '1');
  }
  return g;
}

}  // namespace lflh
