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

#ifndef LFLH_SIM_HPP_
#define LFLH_SIM_HPP_

#include <string>
#include <vector>

#include "lflh/geometry.hpp"
#include "lflh/grid.hpp"
#include "lflh/lidar.hpp"

namespace lflh {

/// Kinematic and geometric limits of the robot.
struct RobotLimits {
  double v_max = 1.0;             // m/s
  double omega_max = 2.0;         // rad/s
  double a_lin = 2.0;             // m/s^2
  double a_ang = 4.0;             // rad/s^2
  double footprint_radius = 0.25; // m
};

/// One odometry sample: pose, velocity and timestamp.
struct OdomPoint {
  Pose2 pose;
  Twist twist;
  double t = 0.0;
};

/// A timed motion plan: N odometry points between a start configuration c_c
/// and a goal configuration c_g, expressed in the start frame (c_c at the
/// origin with zero heading).
struct Plan {
  std::vector<OdomPoint> points;
  Pose2 start;  // c_c == points.front().pose
  Pose2 goal;   // c_g == points.back().pose

  std::vector<Vec2> positions() const;
  /// Chord speeds ||x_{i+1} - x_i|| / dt, one per segment (N-1 values).
  std::vector<double> chord_speeds(double dt) const;
};

/// Validate the Plan invariants; throws ContractViolation on failure.
/// Consecutive poses must be reproduced by one unicycle step with the
/// arriving point's twist, within `tol` meters.
void validate_plan(const Plan& plan, int expected_len, double dt,
                   double tol = 1e-6);

/// Exact unicycle step: constant (v, omega) over dt, closed-form arc; the
/// straight-line limit is used below |omega| = 1e-9.
Pose2 step_unicycle(const Pose2& pose, const Twist& twist, double dt);

/// Move each velocity component toward its target by at most a*dt,
/// clamping at the target.
Twist policy_step(const Twist& current, const Twist& target,
                  const RobotLimits& limits, double dt);

/// True iff the footprint disc at `pose` intersects an occupied cell.
bool check_collision(const Pose2& pose, double footprint_radius,
                     const OccupancyGrid& grid);
/// True iff the footprint disc intersects any listed obstacle.
bool check_collision(const Pose2& pose, double footprint_radius,
                     const std::vector<CircleObstacle>& obstacles);

/// Configuration for random open-space exploration.
struct CollectConfig {
  RobotLimits limits;
  double dt = 0.02;              // odometry period, s
  int plan_len = 125;            // N points per plan
  int stride = 125;              // window stride in points
  double resample_period = 1.0;  // s between new velocity targets
  bool hold_v = false;           // 0.4 m/s variant: fixed linear target
};

/// Run the random exploration policy for `duration` seconds of simulated
/// time and slice the stream into plans re-expressed in their own start
/// frames. Throws ContractViolation if the duration is shorter than one
/// plan.
std::vector<Plan> collect_open_space(const CollectConfig& cfg, double duration,
                                     std::uint64_t seed);

// Plan dataset file: per plan, `plan_len` rows of (t x y phi v omega).
void save_plans(const std::string& path, const std::vector<Plan>& plans,
                const CollectConfig& cfg, std::uint64_t seed);
std::vector<Plan> load_plans(const std::string& path, CollectConfig* cfg_out,
                             std::uint64_t* seed_out);

}  // namespace lflh

#endif  // LFLH_SIM_HPP_
