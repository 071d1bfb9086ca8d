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

#ifndef LFLH_ENVGEN_HPP_
#define LFLH_ENVGEN_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lflh/grid.hpp"

namespace lflh {

/// Cellular automata parameters for constrained navigation environments.
struct CaParams {
  int width = 30;
  int height = 30;
  double resolution = 0.15;
  double fill_probability = 0.25;
  int smoothing_iterations = 3;
};

/// Generate an environment: border cells always occupied, interior seeded
/// with fill_probability, then smoothed with the cave rule (a cell becomes
/// occupied iff at least 5 of its 8 neighbors are occupied; out-of-bounds
/// neighbors count as occupied). Deterministic per (seed, params).
OccupancyGrid generate_ca_env(std::uint64_t seed, const CaParams& params);

/// A navigation task: environment, endpoints and a global path.
struct NavTask {
  OccupancyGrid grid;
  Pose2 start;
  Pose2 goal;
  std::vector<Pose2> global_path;
  std::uint64_t seed = 0;
};

/// Pick footprint-clear start and goal cells at least `min_separation`
/// apart that are connected on the inflated grid. Returns nullopt when no
/// valid placement is found within the retry budget (caller should draw a
/// new environment seed).
std::optional<std::pair<Pose2, Pose2>> place_start_goal(
    const OccupancyGrid& grid, std::uint64_t seed, double min_separation,
    double footprint_radius, int max_tries = 200);

/// 8-connected A* on the footprint-inflated grid, densified to at most one
/// resolution step between consecutive points. Returns nullopt when the
/// goal is unreachable.
std::optional<std::vector<Pose2>> plan_global_path(const OccupancyGrid& grid,
                                                   const Pose2& start,
                                                   const Pose2& goal,
                                                   double footprint_radius);

/// The first path point at arc distance >= lookahead beyond the path point
/// nearest the robot, expressed in the robot frame; the final goal when the
/// remaining path is shorter.
Pose2 local_goal(const std::vector<Pose2>& global_path, const Pose2& robot,
                 double lookahead = 1.5);

/// Generate a full task, retrying environment seeds (seed, seed+1, ...)
/// until placement and planning succeed. `attempts_out`, when non-null,
/// receives the number of seeds tried.
NavTask generate_task(std::uint64_t seed, const CaParams& params,
                      double min_separation, double footprint_radius,
                      int* attempts_out = nullptr);

// Task file: grid plus start/goal/path rows.
void save_task(const std::string& path, const NavTask& task);
NavTask load_task(const std::string& path);

}  // namespace lflh

#endif  // LFLH_ENVGEN_HPP_
