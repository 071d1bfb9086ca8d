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

#ifndef LFLH_DECODER_HPP_
#define LFLH_DECODER_HPP_

#include <string>
#include <vector>

#include "lflh/geometry.hpp"
#include "lflh/lidar.hpp"
#include "lflh/sim.hpp"
#include "lflh/tape.hpp"

namespace lflh {

/// Waypoint trajectory matching a Plan's length; velocities are the chord
/// speeds ||w_{i+1} - w_i|| / dt.
struct TrajSpec {
  std::vector<Vec2> waypoints;
  double dt = 0.02;

  std::vector<double> speeds() const;
  static TrajSpec from_plan(const Plan& plan, double dt);
  static TrajSpec straight_line(const Vec2& a, const Vec2& b, int n,
                                double dt);
};

/// Unrolled-optimizer decoder settings.
///
/// The decoder runs exactly `inner_iterations` gradient steps on
///   J(traj) = w_smooth * sum_i ||x_{i-1} - 2 x_i + x_{i+1}||^2
///           + w_coll   * sum_{i,j} max(clearance - dist(x_i, obs_j), 0)^2
///           + w_fit    * sum_i ||x_i - init_i||^2
/// with dist = center distance minus radius and both endpoints held fixed.
/// w_fit defaults to zero, leaving the smoothness + collision objective.
struct DecoderConfig {
  int inner_iterations = 50;
  double inner_step = 0.05;
  double w_smooth = 1.0;
  double w_coll = 10.0;
  double w_fit = 0.0;
  double clearance = 0.5;  // meters
};

/// Decoded trajectory still on the tape: x and y coordinate vectors [N].
struct DecodedTraj {
  Var x;
  Var y;
};

/// Unroll the decoder on a tape. Obstacle parameters (cx, cy, r: [K] each)
/// may be tape variables with gradients; pass invalid Vars (default) for
/// the obstacle-free case. The whole computation is differentiable w.r.t.
/// the obstacle parameters.
DecodedTraj decode_on_tape(Tape& tape, const TrajSpec& init,
                           const DecoderConfig& cfg, Var obs_x = {},
                           Var obs_y = {}, Var obs_r = {},
                           std::vector<double>* objective_trace = nullptr);

/// Plain decode: fixed obstacles, returns the optimized trajectory.
/// init's endpoints must equal c_c and c_g (the pinned configurations).
TrajSpec decode(const std::vector<CircleObstacle>& obstacles, const Pose2& c_c,
                const Pose2& c_g, const TrajSpec& init,
                const DecoderConfig& cfg,
                std::vector<double>* objective_trace = nullptr);

/// Reconstruction loss between a decoded trajectory (on tape) and a plan:
/// mean squared position error plus mean squared chord-speed error.
Var reconstruction_loss_on_tape(Tape& tape, const DecodedTraj& traj,
                                const Plan& plan, double dt);

/// Gradient-check instance: reconstruct `plan` through the decoder from
/// the given obstacles.
struct DecodeInstance {
  Plan plan;
  std::vector<CircleObstacle> obstacles;
  DecoderConfig cfg;
};

/// Max relative error between the tape gradient and central finite
/// differences of the reconstruction loss w.r.t. every obstacle parameter.
double decode_jacobian_check(const DecodeInstance& instance, double h = 1e-5);

/// Write a per-iteration objective trace as delimited text (debug aid).
void dump_objective_trace(const std::string& path,
                          const std::vector<double>& trace);

}  // namespace lflh

#endif  // LFLH_DECODER_HPP_
