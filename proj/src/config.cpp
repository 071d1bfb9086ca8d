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

#include "lflh/config.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "lflh/common.hpp"

namespace lflh {

using nlohmann::json;

namespace {

json config_defaults(const PipelineConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["out_dir"] = c.out_dir;
  j["robot"] = {{"v_max", c.robot.v_max},
                {"omega_max", c.robot.omega_max},
                {"a_lin", c.robot.a_lin},
                {"a_ang", c.robot.a_ang},
                {"footprint_radius", c.robot.footprint_radius}};
  j["sensor"] = {{"beams", c.sensor.beams},
                 {"fov_deg", c.sensor.fov * 180.0 / kPi},
                 {"max_range", c.sensor.max_range}};
  j["collect"] = {{"duration", c.collect_duration},
                  {"dt", c.collect.dt},
                  {"plan_len", c.collect.plan_len},
                  {"stride", c.collect.stride},
                  {"resample_period", c.collect.resample_period},
                  {"hold_v", c.collect.hold_v}};
  j["hallucination"] = {{"slots", 10},
                        {"lambda_prior", c.hal.lambda_prior},
                        {"lambda_coll", c.hal.lambda_coll},
                        {"epochs", c.hal.epochs},
                        {"batch", c.hal.batch},
                        {"lr", c.hal.lr},
                        {"mc_samples", c.hal.mc_samples},
                        {"clearance", c.hal.clearance},
                        {"size_prior_mean", c.hal.size_prior_mean},
                        {"size_prior_var", c.hal.size_prior_var},
                        {"min_radius", c.hal.min_radius}};
  j["decoder"] = {{"iterations", c.hal.decoder.inner_iterations},
                  {"step_size", c.hal.decoder.inner_step},
                  {"w_smooth", c.hal.decoder.w_smooth},
                  {"w_coll", c.hal.decoder.w_coll},
                  {"w_fit", c.hal.decoder.w_fit},
                  {"clearance", c.hal.decoder.clearance}};
  j["build"] = {{"sampling_count", c.build.sampling_count},
                {"extra_obstacles", c.build.extra_obstacles},
                {"kappa", c.build.kappa},
                {"clearance", c.build.clearance}};
  j["planner"] = {{"hidden", c.planner_hidden},
                  {"epochs", c.planner_train.epochs},
                  {"batch", c.planner_train.batch},
                  {"lr", c.planner_train.lr},
                  {"val_split", c.planner_train.val_split}};
  j["env"] = {{"width", c.env.width},
              {"height", c.env.height},
              {"resolution", c.env.resolution},
              {"fill", c.env.fill_probability},
              {"iterations", c.env.smoothing_iterations},
              {"min_separation", c.min_separation}};
  j["bench"] = {{"envs", c.bench_envs},
                {"trials", c.bench_trials},
                {"timeout", c.bench_timeout},
                {"control_rate", c.control_rate},
                {"goal_tolerance", c.goal_tolerance},
                {"lookahead", c.lookahead},
                {"workers", c.workers},
                {"planners", c.planners}};
  j["guard"] = {{"horizon", c.guard.horizon},
                {"dt", c.guard.dt},
                {"margin", c.guard.margin}};
  j["dwa"] = {{"v_samples", c.dwa.v_samples},
              {"w_samples", c.dwa.w_samples},
              {"horizon", c.dwa.horizon},
              {"sim_dt", c.dwa.sim_dt},
              {"window_dt", c.dwa.window_dt},
              {"heading_weight", c.dwa.heading_weight},
              {"clearance_weight", c.dwa.clearance_weight},
              {"velocity_weight", c.dwa.velocity_weight}};
  return j;
}

void merge_into(json& base, const json& patch) {
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    if (!base.contains(it.key()))
      throw ContractViolation("unknown config key: " + it.key());
    if (it->is_object()) {
      merge_into(base[it.key()], *it);
    } else {
      base[it.key()] = *it;
    }
  }
}

PipelineConfig from_json(const json& j) {
  PipelineConfig c;
  c.seed = j.at("seed").get<std::uint64_t>();
  c.out_dir = j.at("out_dir").get<std::string>();
  const auto& r = j.at("robot");
  c.robot.v_max = r.at("v_max");
  c.robot.omega_max = r.at("omega_max");
  c.robot.a_lin = r.at("a_lin");
  c.robot.a_ang = r.at("a_ang");
  c.robot.footprint_radius = r.at("footprint_radius");
  const auto& s = j.at("sensor");
  c.sensor.beams = s.at("beams");
  c.sensor.fov = s.at("fov_deg").get<double>() * kPi / 180.0;
  c.sensor.max_range = s.at("max_range");
  const auto& co = j.at("collect");
  c.collect_duration = co.at("duration");
  c.collect.dt = co.at("dt");
  c.collect.plan_len = co.at("plan_len");
  c.collect.stride = co.at("stride");
  c.collect.resample_period = co.at("resample_period");
  c.collect.hold_v = co.at("hold_v");
  c.collect.limits = c.robot;
  const auto& hl = j.at("hallucination");
  c.hal.lambda_prior = hl.at("lambda_prior");
  c.hal.lambda_coll = hl.at("lambda_coll");
  c.hal.epochs = hl.at("epochs");
  c.hal.batch = hl.at("batch");
  c.hal.lr = hl.at("lr");
  c.hal.mc_samples = hl.at("mc_samples");
  c.hal.clearance = hl.at("clearance");
  c.hal.size_prior_mean = hl.at("size_prior_mean");
  c.hal.size_prior_var = hl.at("size_prior_var");
  c.hal.min_radius = hl.at("min_radius");
  c.hal.seed = c.seed;
  const auto& de = j.at("decoder");
  c.hal.decoder.inner_iterations = de.at("iterations");
  c.hal.decoder.inner_step = de.at("step_size");
  c.hal.decoder.w_smooth = de.at("w_smooth");
  c.hal.decoder.w_coll = de.at("w_coll");
  c.hal.decoder.w_fit = de.at("w_fit");
  c.hal.decoder.clearance = de.at("clearance");
  const auto& b = j.at("build");
  c.build.sampling_count = b.at("sampling_count");
  c.build.extra_obstacles = b.at("extra_obstacles");
  c.build.kappa = b.at("kappa");
  c.build.clearance = b.at("clearance");
  c.build.size_mean = c.hal.size_prior_mean;
  c.build.size_var = c.hal.size_prior_var;
  c.build.min_radius = c.hal.min_radius;
  c.build.sensor = c.sensor;
  const auto& p = j.at("planner");
  c.planner_hidden = p.at("hidden");
  c.planner_train.epochs = p.at("epochs");
  c.planner_train.batch = p.at("batch");
  c.planner_train.lr = p.at("lr");
  c.planner_train.val_split = p.at("val_split");
  c.planner_train.seed = c.seed;
  const auto& e = j.at("env");
  c.env.width = e.at("width");
  c.env.height = e.at("height");
  c.env.resolution = e.at("resolution");
  c.env.fill_probability = e.at("fill");
  c.env.smoothing_iterations = e.at("iterations");
  c.min_separation = e.at("min_separation");
  const auto& be = j.at("bench");
  c.bench_envs = be.at("envs");
  c.bench_trials = be.at("trials");
  c.bench_timeout = be.at("timeout");
  c.control_rate = be.at("control_rate");
  c.goal_tolerance = be.at("goal_tolerance");
  c.lookahead = be.at("lookahead");
  c.workers = be.at("workers");
  c.planners = be.at("planners").get<std::vector<std::string>>();
  const auto& g = j.at("guard");
  c.guard.horizon = g.at("horizon");
  c.guard.dt = g.at("dt");
  c.guard.margin = g.at("margin");
  const auto& d = j.at("dwa");
  c.dwa.v_samples = d.at("v_samples");
  c.dwa.w_samples = d.at("w_samples");
  c.dwa.horizon = d.at("horizon");
  c.dwa.sim_dt = d.at("sim_dt");
  c.dwa.window_dt = d.at("window_dt");
  c.dwa.heading_weight = d.at("heading_weight");
  c.dwa.clearance_weight = d.at("clearance_weight");
  c.dwa.velocity_weight = d.at("velocity_weight");
  return c;
}

json parse_scalar(const std::string& value) {
  // try in order: bool, number, string
  if (value == "true") return true;
  if (value == "false") return false;
  try {
    return json::parse(value);
  } catch (...) {
    return value;
  }
}

}  // namespace

PipelineConfig default_config() { return PipelineConfig{}; }

PipelineConfig load_config(const std::string& path,
                           const std::vector<std::string>& overrides) {
  json j = config_defaults(PipelineConfig{});
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw MissingArtifact("missing config file: " + path);
    json user;
    try {
      in >> user;
    } catch (const std::exception& e) {
      throw ContractViolation(std::string("config parse error: ") + e.what());
    }
    merge_into(j, user);
  }
  for (const auto& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos)
      throw ContractViolation("override must be key.path=value: " + ov);
    const std::string key = ov.substr(0, eq);
    json* cursor = &j;
    std::size_t begin = 0;
    while (true) {
      const auto dot = key.find('.', begin);
      const std::string part =
          key.substr(begin, dot == std::string::npos ? dot : dot - begin);
      if (!cursor->contains(part))
        throw ContractViolation("unknown config key: " + key);
      cursor = &(*cursor)[part];
      if (dot == std::string::npos) break;
      begin = dot + 1;
    }
    *cursor = parse_scalar(ov.substr(eq + 1));
  }
  return from_json(j);
}

std::string config_to_json(const PipelineConfig& cfg) {
  return config_defaults(cfg).dump(2);
}

std::string hash_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingArtifact("cannot hash missing file: " + path);
  std::uint64_t h = 1469598103934665603ULL;
  char buf[65536];
  while (in) {
    in.read(buf, sizeof(buf));
    const std::streamsize n = in.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ULL;
    }
  }
  char hex[32];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(h));
  return hex;
}

void write_manifest(const std::string& path, const std::string& command,
                    const PipelineConfig& cfg,
                    const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs) {
  json j;
  j["command"] = command;
  j["seed"] = cfg.seed;
  j["config"] = json::parse(config_to_json(cfg));
  json jin = json::object();
  for (const auto& f : inputs) jin[f] = hash_file(f);
  json jout = json::object();
  for (const auto& f : outputs) jout[f] = hash_file(f);
  j["inputs"] = jin;
  j["outputs"] = jout;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write manifest: " + path);
  out << j.dump(2) << "\n";
}

void ensure_dir(const std::string& path) {
  std::filesystem::create_directories(path);
}

bool file_exists(const std::string& path) {
  return std::filesystem::exists(path);
}

}  // namespace lflh
