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

#ifndef LFLH_CONFIG_HPP_
#define LFLH_CONFIG_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "lflh/bench.hpp"
#include "lflh/envgen.hpp"
#include "lflh/hallucination.hpp"
#include "lflh/policy.hpp"
#include "lflh/sim.hpp"

namespace lflh {

/// One declarative configuration for the whole pipeline. Every module
/// default lives here; the CLI loads a JSON file and applies
/// `--set key.path=value` overrides on top.
struct PipelineConfig {
  std::uint64_t seed = 7;
  std::string out_dir = "runs/out";

  RobotLimits robot;
  SensorConfig sensor;

  // data collection
  double collect_duration = 500.0;
  CollectConfig collect;

  // hallucination training
  HalTrainConfig hal;

  // training-set construction
  BuildConfig build;

  // behavior cloning
  int planner_hidden = 256;
  PlannerTrainConfig planner_train;

  // environments + benchmark
  CaParams env;
  double min_separation = 4.0;
  int bench_envs = 30;
  int bench_trials = 3;
  double bench_timeout = 50.0;
  double control_rate = 20.0;
  double goal_tolerance = 0.5;
  double lookahead = 1.5;
  int workers = 0;
  std::vector<std::string> planners = {"lflh", "dwa"};
  GuardConfig guard;
  DwaConfig dwa;

  // derived artifact paths
  std::string plans_path() const { return out_dir + "/plans.txt"; }
  std::string hal_model_path() const { return out_dir + "/hal_model.ckpt"; }
  std::string hal_log_path() const { return out_dir + "/hal_train_log.txt"; }
  std::string dtrain_path() const { return out_dir + "/dtrain.txt"; }
  std::string planner_model_path() const {
    return out_dir + "/planner_model.ckpt";
  }
  std::string planner_log_path() const {
    return out_dir + "/planner_train_log.txt";
  }
  std::string results_path() const { return out_dir + "/results.csv"; }
  std::string summary_path() const { return out_dir + "/summary.csv"; }
  std::string scatter_path() const { return out_dir + "/scatter.svg"; }
  std::string bars_path() const { return out_dir + "/bars.svg"; }
};

/// Load a config file (JSON; missing keys keep their defaults) and apply
/// `key.path=value` overrides.
PipelineConfig load_config(const std::string& path,
                           const std::vector<std::string>& overrides);
PipelineConfig default_config();
/// The config re-serialized (full schema, current values).
std::string config_to_json(const PipelineConfig& cfg);

/// FNV-1a 64-bit over a file's bytes, hex-encoded.
std::string hash_file(const std::string& path);

/// Write runs/<cmd> manifest: command, full config, input/output hashes.
void write_manifest(const std::string& path, const std::string& command,
                    const PipelineConfig& cfg,
                    const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs);

void ensure_dir(const std::string& path);
bool file_exists(const std::string& path);

}  // namespace lflh

#endif  // LFLH_CONFIG_HPP_
