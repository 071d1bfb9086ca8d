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

#ifndef LFLH_GRID_HPP_
#define LFLH_GRID_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "lflh/geometry.hpp"

namespace lflh {

/// Boolean occupancy grid. Cell (cx, cy) covers the square
/// [origin + cx*res, origin + (cx+1)*res) x [...]; row-major storage with
/// index cy*width + cx. `origin` is the world pose of the grid's lower-left
/// corner (axis-aligned; origin.phi is kept 0 throughout this project).
struct OccupancyGrid {
  int width = 0;
  int height = 0;
  double resolution = 0.05;
  Pose2 origin;
  std::vector<std::uint8_t> cells;

  bool in_bounds(int cx, int cy) const {
    return cx >= 0 && cy >= 0 && cx < width && cy < height;
  }
  bool occupied(int cx, int cy) const {
    return !in_bounds(cx, cy) || cells[static_cast<std::size_t>(cy) * width + cx] != 0;
  }
  void set(int cx, int cy, bool occ) {
    cells[static_cast<std::size_t>(cy) * width + cx] = occ ? 1 : 0;
  }
  int cell_x(double wx) const {
    return static_cast<int>(std::floor((wx - origin.x) / resolution));
  }
  int cell_y(double wy) const {
    return static_cast<int>(std::floor((wy - origin.y) / resolution));
  }
  Vec2 cell_center(int cx, int cy) const {
    return {origin.x + (cx + 0.5) * resolution,
            origin.y + (cy + 0.5) * resolution};
  }
  double world_width() const { return width * resolution; }
  double world_height() const { return height * resolution; }
};

OccupancyGrid make_grid(int width, int height, double resolution,
                        bool occupied = false);

/// Dilate occupied cells by a disc of the given radius (meters); used for
/// footprint inflation before global planning.
OccupancyGrid inflate(const OccupancyGrid& grid, double radius);

// Environment file: header (dims, resolution, seed, params) plus row-major
// 0/1 cells, one row per line.
void save_grid(const std::string& path, const OccupancyGrid& grid,
               const std::string& header_comment = "");
OccupancyGrid load_grid(const std::string& path);

}  // namespace lflh

#endif  // LFLH_GRID_HPP_
