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

#ifndef LFLH_LIDAR_HPP_
#define LFLH_LIDAR_HPP_

#include <string>
#include <vector>

#include "lflh/geometry.hpp"

namespace lflh {

struct OccupancyGrid;

/// Circular obstacle in the plane.
struct CircleObstacle {
  double x = 0.0;
  double y = 0.0;
  double radius = 0.1;
};

/// Sensor geometry: `beams` evenly spaced rays spanning `fov` radians,
/// beam 0 at -fov/2 relative to the sensor heading, last beam at +fov/2.
struct SensorConfig {
  int beams = 720;
  double fov = 270.0 * kPi / 180.0;
  double max_range = 10.0;

  double beam_angle(int i) const {
    return -0.5 * fov + fov * static_cast<double>(i) /
                            static_cast<double>(beams - 1);
  }
};

/// One range scan. No-hit beams report max_range.
struct LidarScan {
  std::vector<double> ranges;
  double fov = 270.0 * kPi / 180.0;
  double max_range = 10.0;

  int beams() const { return static_cast<int>(ranges.size()); }
  double beam_angle(int i) const {
    return -0.5 * fov + fov * static_cast<double>(i) /
                            static_cast<double>(beams() - 1);
  }
  /// Hit points in the sensor frame (beams at max_range are skipped).
  std::vector<Vec2> hit_points() const;
};

/// Analytic ray casting against circles: per beam the nearest positive
/// ray-circle intersection, else max_range.
LidarScan raycast_circles(const Pose2& sensor,
                          const std::vector<CircleObstacle>& obstacles,
                          const SensorConfig& cfg);

/// Grid ray casting: per beam the DDA traversal distance to the first
/// occupied cell boundary, else max_range. The sensor must be in a free
/// cell.
LidarScan raycast_grid(const Pose2& sensor, const OccupancyGrid& grid,
                       const SensorConfig& cfg);

// Scan files: one scan per line, comma-separated ranges; header records
// beam count, fov and max_range.
void save_scans(const std::string& path, const std::vector<LidarScan>& scans);
std::vector<LidarScan> load_scans(const std::string& path);

}  // namespace lflh

#endif  // LFLH_LIDAR_HPP_
