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

#ifndef LFLH_BENCH_HPP_
#define LFLH_BENCH_HPP_

#include <functional>
#include <string>
#include <vector>

#include "lflh/envgen.hpp"
#include "lflh/policy.hpp"

namespace lflh {

enum class FailureCause { kNone, kTimeout, kCollision };
std::string to_string(FailureCause cause);

/// Outcome of one navigation trial.
struct TrialResult {
  int env_index = 0;
  std::uint64_t env_seed = 0;
  std::string planner;
  int trial = 0;
  bool success = false;
  double time_s = 0.0;         // simulated seconds, capped at the timeout
  double path_length = 0.0;    // m; includes the final gap to the goal
  double straight_dist = 0.0;  // m
  FailureCause cause = FailureCause::kNone;
};

/// A local planner under test: scan + local goal (robot frame) + current
/// twist -> action.
using PlannerFn =
    std::function<Twist(const LidarScan&, const Vec2&, const Twist&)>;

struct TrialParams {
  RobotLimits limits;
  SensorConfig sensor;
  GuardConfig guard;
  double timeout = 50.0;
  double control_rate = 20.0;
  double goal_tolerance = 0.5;
  double lookahead = 1.5;
};

/// Closed-loop trial: sense -> local goal -> planner -> guard -> integrate
/// at the control rate until the goal is reached, a collision occurs or the
/// timeout expires.
TrialResult run_trial(const NavTask& task, const PlannerFn& planner,
                      const std::string& planner_name, int trial_index,
                      const TrialParams& params);

/// Success weighted by path length: (1/K) sum S_i * l_i / p_i.
double compute_spl(const std::vector<TrialResult>& results);

struct PlannerSummary {
  std::string planner;
  int trials = 0;
  int successes = 0;
  double success_rate = 0.0;
  double mean_time = 0.0;  // over successes; infinity when none
  double std_time = 0.0;   // population std over successes
  double spl = 0.0;
};

std::vector<PlannerSummary> aggregate(const std::vector<TrialResult>& results);

/// Relative desk-scale comparison on the most-constrained tercile: envs
/// both planners solve (majority of trials), ranked by the baseline's mean
/// success time.
struct DirectionalCheck {
  bool applicable = false;
  bool passed = false;
  int tercile_envs = 0;
  double subject_mean = 0.0;
  double baseline_mean = 0.0;
};

DirectionalCheck directional_tercile_check(
    const std::vector<TrialResult>& results, const std::string& subject,
    const std::string& baseline);

/// Run every (env, planner, trial) combination; trials execute in parallel
/// workers but the returned order is deterministic.
std::vector<TrialResult> run_benchmark(
    const std::vector<NavTask>& tasks,
    const std::vector<std::pair<std::string, PlannerFn>>& planners,
    int trials_per_env, const TrialParams& params, int workers = 0);

// ---- reports ----
void write_results_csv(const std::string& path,
                       const std::vector<TrialResult>& results);
std::vector<TrialResult> read_results_csv(const std::string& path);
void write_summary_csv(const std::string& path,
                       const std::vector<PlannerSummary>& summaries);
/// Per-environment mean traversal times (failures at the cap), ordered by
/// the baseline planner's mean time.
void write_scatter_svg(const std::string& path,
                       const std::vector<TrialResult>& results,
                       const std::string& baseline);
void write_bars_svg(const std::string& path,
                    const std::vector<PlannerSummary>& summaries);

}  // namespace lflh

#endif  // LFLH_BENCH_HPP_
