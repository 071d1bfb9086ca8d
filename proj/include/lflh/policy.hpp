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

#ifndef LFLH_POLICY_HPP_
#define LFLH_POLICY_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "lflh/hallucination.hpp"
#include "lflh/lidar.hpp"
#include "lflh/nn.hpp"
#include "lflh/sim.hpp"

namespace lflh {

/// One behavior-cloning sample: rendered scan, local goal and current twist
/// in the robot frame, labeled with the source plan's first action.
struct TrainSample {
  std::vector<double> ranges;
  Vec2 goal;
  Twist current;
  Twist label;
};

/// Settings for building the training set from a trained hallucination
/// model.
struct BuildConfig {
  int sampling_count = 10;
  int extra_obstacles = 5;
  double kappa = 1.0;      // s; clearance band grows with mean plan speed
  double clearance = 0.5;  // m
  double min_radius = 0.05;
  double size_mean = 0.3;
  double size_var = 0.0025;
  SensorConfig sensor;
};

struct BuildStats {
  std::size_t attempted = 0;
  std::size_t kept = 0;
};

/// Alg.-style dataset construction: per plan, `sampling_count` hallucinated
/// obstacle sets, each augmented with `extra_obstacles` random obstacles
/// whose clearance to the plan polyline is clearance + U[0, kappa * mean
/// speed]; sets with plan clearance < `clearance` are discarded; survivors
/// are rendered to scans from the plan's start pose.
std::vector<TrainSample> build_training_set(HallucinationModel& model,
                                            const std::vector<Plan>& dataset,
                                            const BuildConfig& cfg,
                                            std::uint64_t seed,
                                            BuildStats* stats = nullptr);

/// Minimum clearance between an obstacle set and a plan's position
/// polyline (center-to-polyline distance minus radius, min over obstacles).
double plan_clearance(const std::vector<CircleObstacle>& obstacles,
                      const Plan& plan);

// Training-set file: one sample per line (720 ranges, goal x/y, current v
// and omega, label v and omega).
void save_training_set(const std::string& path,
                       const std::vector<TrainSample>& samples,
                       const SensorConfig& sensor);
std::vector<TrainSample> load_training_set(const std::string& path,
                                           SensorConfig* sensor_out = nullptr);

/// Reactive local planner: 720 + 2 + 2 inputs, two hidden layers of 256
/// units, two outputs scaled into the velocity limits with tanh.
struct PlannerModel {
  DenseLayer l1, l2, out;
  RobotLimits limits;
  SensorConfig sensor;

  static PlannerModel init(const RobotLimits& limits,
                           const SensorConfig& sensor, std::uint64_t seed,
                           int hidden = 256);
  std::vector<Tensor*> parameters();
  std::vector<NamedParam> named_parameters();
};

void save_planner_model(const std::string& path, PlannerModel& m);
PlannerModel load_planner_model(const std::string& path,
                                const RobotLimits& limits,
                                const SensorConfig& sensor, int hidden = 256);

struct PlannerTrainConfig {
  int epochs = 30;
  int batch = 64;
  double lr = 1e-3;
  double val_split = 0.1;
  std::uint64_t seed = 7;
};

/// Behavior cloning: minimize the mean squared action error on the train
/// split; returns the held-out MSE after each epoch.
std::vector<double> train_planner(PlannerModel& model,
                                  const std::vector<TrainSample>& samples,
                                  const PlannerTrainConfig& cfg);

/// Deterministic single-action inference in the robot frame.
Twist infer_action(const PlannerModel& model, const LidarScan& scan,
                   const Vec2& goal, const Twist& current);

/// Forward-simulation safety guard settings.
struct GuardConfig {
  double horizon = 1.0;  // s
  double dt = 0.05;      // s
  double margin = 0.1;   // m beyond the footprint radius

  enum class Fallback { kHalfSpeed, kQuarterSpeed, kRotateTowardGoal, kStop };
  std::vector<Fallback> fallbacks = {
      Fallback::kHalfSpeed, Fallback::kQuarterSpeed,
      Fallback::kRotateTowardGoal, Fallback::kStop};
};

/// True iff holding `action` for the horizon brings the footprint within
/// the safety margin of any scan hit point (robot frame).
bool rollout_collides(const Twist& action, const std::vector<Vec2>& points,
                      const RobotLimits& limits, const GuardConfig& cfg);

/// Forward-simulate the candidate action; when it collides, try the
/// fallback actions in order and return the first safe one (stop is the
/// terminal fallback). `goal_bearing` orients the rotate-in-place fallback.
Twist mpc_guard(const Twist& action, const LidarScan& scan,
                const RobotLimits& limits, const GuardConfig& cfg,
                double goal_bearing = 0.0);

/// Dynamic-window sampling planner settings.
struct DwaConfig {
  int v_samples = 24;
  int w_samples = 80;
  double horizon = 1.5;           // s
  double sim_dt = 0.1;            // s
  double window_dt = 0.05;        // s; one control period
  double heading_weight = 0.8;
  double clearance_weight = 0.1;
  double velocity_weight = 0.1;
  double clearance_cap = 1.0;     // m
  double collision_margin = 0.05; // m beyond the footprint radius
};

/// The (v, omega) sample grid over the one-step dynamic window
/// (v_samples x w_samples entries, both endpoints included).
std::vector<Twist> dwa_window_samples(const Twist& current,
                                      const RobotLimits& limits,
                                      const DwaConfig& cfg);

/// Sample the dynamic window, simulate each candidate, discard colliding
/// rollouts and return the best-scoring survivor; a recovery rotation
/// (still inside the window) when every rollout collides.
Twist dwa_plan(const LidarScan& scan, const Vec2& goal, const Twist& current,
               const RobotLimits& limits, const DwaConfig& cfg);

}  // namespace lflh

#endif  // LFLH_POLICY_HPP_
