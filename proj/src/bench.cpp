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

#include "lflh/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include "lflh/common.hpp"
#include "lflh/svg.hpp"

namespace lflh {

std::string to_string(FailureCause cause) {
  switch (cause) {
    case FailureCause::kNone:
      return "none";
    case FailureCause::kTimeout:
      return "timeout";
    case FailureCause::kCollision:
      return "collision";
  }
  return "none";
}

TrialResult run_trial(const NavTask& task, const PlannerFn& planner,
                      const std::string& planner_name, int trial_index,
                      const TrialParams& params) {
  TrialResult res;
  res.env_seed = task.seed;
  res.planner = planner_name;
  res.trial = trial_index;
  res.straight_dist = std::hypot(task.goal.x - task.start.x,
                                 task.goal.y - task.start.y);

  const double dt = 1.0 / params.control_rate;
  const int max_steps = static_cast<int>(std::ceil(params.timeout / dt));
  Pose2 pose = task.start;
  Twist twist;
  double path_len = 0.0;
  double t = 0.0;

  for (int step = 0; step < max_steps; ++step) {
    const LidarScan scan = raycast_grid(pose, task.grid, params.sensor);
    const Pose2 lg = local_goal(task.global_path, pose, params.lookahead);
    Twist action;
    bool planner_failed = false;
    try {
      action = planner(scan, {lg.x, lg.y}, twist);
    } catch (const std::exception&) {
      planner_failed = true;
    }
    if (planner_failed) {
      res.success = false;
      res.cause = FailureCause::kTimeout;
      res.time_s = params.timeout;
      res.path_length = path_len;
      return res;
    }
    const double bearing = std::atan2(lg.y, lg.x);
    const Twist safe =
        mpc_guard(action, scan, params.limits, params.guard, bearing);
    twist = policy_step(twist, safe, params.limits, dt);
    const Pose2 next = step_unicycle(pose, twist, dt);
    path_len += std::hypot(next.x - pose.x, next.y - pose.y);
    pose = next;
    t += dt;
    if (check_collision(pose, params.limits.footprint_radius, task.grid)) {
      res.success = false;
      res.cause = FailureCause::kCollision;
      res.time_s = std::min(t, params.timeout);
      res.path_length = path_len;
      return res;
    }
    const double goal_gap =
        std::hypot(task.goal.x - pose.x, task.goal.y - pose.y);
    if (goal_gap <= params.goal_tolerance) {
      res.success = true;
      res.cause = FailureCause::kNone;
      res.time_s = t;
      // close the books on the remaining gap so p_i >= l_i holds
      res.path_length = path_len + goal_gap;
      return res;
    }
  }
  res.success = false;
  res.cause = FailureCause::kTimeout;
  res.time_s = params.timeout;
  res.path_length = path_len;
  return res;
}

double compute_spl(const std::vector<TrialResult>& results) {
  LFLH_REQUIRE(!results.empty(), "compute_spl: empty result list");
  double acc = 0.0;
  for (const auto& r : results) {
    if (!r.success) continue;
    LFLH_REQUIRE(r.path_length > 0.0,
                 "compute_spl: zero path length on a success");
    acc += r.straight_dist / r.path_length;
  }
  return acc / static_cast<double>(results.size());
}

std::vector<PlannerSummary> aggregate(const std::vector<TrialResult>& results) {
  LFLH_REQUIRE(!results.empty(), "aggregate: empty result list");
  std::map<std::string, std::vector<const TrialResult*>> by_planner;
  for (const auto& r : results) by_planner[r.planner].push_back(&r);
  std::vector<PlannerSummary> out;
  for (const auto& [name, rs] : by_planner) {
    PlannerSummary s;
    s.planner = name;
    s.trials = static_cast<int>(rs.size());
    std::vector<double> times;
    std::vector<TrialResult> own;
    for (const auto* r : rs) {
      own.push_back(*r);
      if (r->success) times.push_back(r->time_s);
    }
    s.successes = static_cast<int>(times.size());
    s.success_rate = static_cast<double>(s.successes) / s.trials;
    if (times.empty()) {
      s.mean_time = std::numeric_limits<double>::infinity();
      s.std_time = std::numeric_limits<double>::infinity();
    } else {
      double mean = 0.0;
      for (double x : times) mean += x;
      mean /= static_cast<double>(times.size());
      double var = 0.0;
      for (double x : times) var += (x - mean) * (x - mean);
      var /= static_cast<double>(times.size());
      s.mean_time = mean;
      s.std_time = std::sqrt(var);
    }
    s.spl = compute_spl(own);
    out.push_back(std::move(s));
  }
  return out;
}

namespace {

struct EnvStats {
  int trials = 0;
  int successes = 0;
  double success_time_sum = 0.0;
  double capped_time_sum = 0.0;

  bool solved() const { return 2 * successes > trials; }
  double mean_success_time() const {
    return successes ? success_time_sum / successes
                     : std::numeric_limits<double>::infinity();
  }
  double mean_capped_time() const {
    return trials ? capped_time_sum / trials
                  : std::numeric_limits<double>::infinity();
  }
};

std::map<int, std::map<std::string, EnvStats>> group_by_env(
    const std::vector<TrialResult>& results) {
  std::map<int, std::map<std::string, EnvStats>> envs;
  for (const auto& r : results) {
    EnvStats& s = envs[r.env_index][r.planner];
    s.trials += 1;
    s.capped_time_sum += r.time_s;
    if (r.success) {
      s.successes += 1;
      s.success_time_sum += r.time_s;
    }
  }
  return envs;
}

}  // namespace

DirectionalCheck directional_tercile_check(
    const std::vector<TrialResult>& results, const std::string& subject,
    const std::string& baseline) {
  DirectionalCheck check;
  const auto envs = group_by_env(results);
  // envs both planners solve (majority of trials), keyed by baseline time
  std::vector<std::pair<double, int>> solved;  // (baseline mean time, env)
  for (const auto& [env, per_planner] : envs) {
    const auto is = per_planner.find(subject);
    const auto ib = per_planner.find(baseline);
    if (is == per_planner.end() || ib == per_planner.end()) continue;
    if (!is->second.solved() || !ib->second.solved()) continue;
    solved.push_back({ib->second.mean_success_time(), env});
  }
  if (solved.size() < 3) return check;
  std::sort(solved.begin(), solved.end());
  const std::size_t tercile = (solved.size() + 2) / 3;
  double subj_sum = 0.0, base_sum = 0.0;
  int n = 0;
  for (std::size_t i = solved.size() - tercile; i < solved.size(); ++i) {
    const int env = solved[i].second;
    subj_sum += envs.at(env).at(subject).mean_success_time();
    base_sum += envs.at(env).at(baseline).mean_success_time();
    ++n;
  }
  check.applicable = true;
  check.tercile_envs = n;
  check.subject_mean = subj_sum / n;
  check.baseline_mean = base_sum / n;
  check.passed = check.subject_mean <= check.baseline_mean;
  return check;
}

std::vector<TrialResult> run_benchmark(
    const std::vector<NavTask>& tasks,
    const std::vector<std::pair<std::string, PlannerFn>>& planners,
    int trials_per_env, const TrialParams& params, int workers) {
  struct Job {
    int env;
    int planner;
    int trial;
  };
  std::vector<Job> jobs;
  for (int e = 0; e < static_cast<int>(tasks.size()); ++e)
    for (int p = 0; p < static_cast<int>(planners.size()); ++p)
      for (int t = 0; t < trials_per_env; ++t) jobs.push_back({e, p, t});

  std::vector<TrialResult> results(jobs.size());
  std::atomic<std::size_t> next{0};
  const unsigned hw = std::thread::hardware_concurrency();
  const int nthreads =
      workers > 0 ? workers : std::max(1u, hw ? hw : 1u);
  const auto worker = [&]() {
    while (true) {
      const std::size_t j = next.fetch_add(1);
      if (j >= jobs.size()) return;
      const Job& job = jobs[j];
      TrialResult r = run_trial(tasks[job.env], planners[job.planner].second,
                                planners[job.planner].first, job.trial,
                                params);
      r.env_index = job.env;
      results[j] = std::move(r);
    }
  };
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return results;
}

namespace {

std::string fmt_double(double x) {
  if (std::isinf(x)) return "inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", x);
  return buf;
}

}  // namespace

void write_results_csv(const std::string& path,
                       const std::vector<TrialResult>& results) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write results csv: " + path);
  out << "env_index,env_seed,planner,trial,success,cause,time_s,"
         "path_length_m,straight_dist_m\n";
  for (const auto& r : results) {
    out << r.env_index << "," << r.env_seed << "," << r.planner << ","
        << r.trial << "," << (r.success ? 1 : 0) << "," << to_string(r.cause)
        << "," << fmt_double(r.time_s) << "," << fmt_double(r.path_length)
        << "," << fmt_double(r.straight_dist) << "\n";
  }
  if (!out) throw std::runtime_error("failed writing results csv: " + path);
}

std::vector<TrialResult> read_results_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifact("missing results csv: " + path);
  std::string line;
  std::getline(in, line);  // header
  std::vector<TrialResult> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string tok;
    TrialResult r;
    std::getline(row, tok, ',');
    r.env_index = std::stoi(tok);
    std::getline(row, tok, ',');
    r.env_seed = std::stoull(tok);
    std::getline(row, r.planner, ',');
    std::getline(row, tok, ',');
    r.trial = std::stoi(tok);
    std::getline(row, tok, ',');
    r.success = tok == "1";
    std::getline(row, tok, ',');
    r.cause = tok == "collision"
                  ? FailureCause::kCollision
                  : (tok == "timeout" ? FailureCause::kTimeout
                                      : FailureCause::kNone);
    std::getline(row, tok, ',');
    r.time_s = std::strtod(tok.c_str(), nullptr);
    std::getline(row, tok, ',');
    r.path_length = std::strtod(tok.c_str(), nullptr);
    std::getline(row, tok, ',');
    r.straight_dist = std::strtod(tok.c_str(), nullptr);
    out.push_back(std::move(r));
  }
  return out;
}

void write_summary_csv(const std::string& path,
                       const std::vector<PlannerSummary>& summaries) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write summary csv: " + path);
  out << "planner,trials,successes,success_rate,mean_time_s,std_time_s,spl\n";
  for (const auto& s : summaries) {
    out << s.planner << "," << s.trials << "," << s.successes << ","
        << fmt_double(s.success_rate) << "," << fmt_double(s.mean_time) << ","
        << fmt_double(s.std_time) << "," << fmt_double(s.spl) << "\n";
  }
  if (!out) throw std::runtime_error("failed writing summary csv: " + path);
}

void write_scatter_svg(const std::string& path,
                       const std::vector<TrialResult>& results,
                       const std::string& baseline) {
  const auto envs = group_by_env(results);
  std::vector<std::pair<double, int>> order;  // (baseline capped mean, env)
  double t_max = 1.0;
  for (const auto& [env, per_planner] : envs) {
    const auto ib = per_planner.find(baseline);
    const double key = ib == per_planner.end()
                           ? std::numeric_limits<double>::infinity()
                           : ib->second.mean_capped_time();
    order.push_back({key, env});
    for (const auto& [_, st] : per_planner)
      if (std::isfinite(st.mean_capped_time()))
        t_max = std::max(t_max, st.mean_capped_time());
  }
  std::sort(order.begin(), order.end());

  const double w = 640, h = 360, ml = 50, mb = 40, mt = 30, mr = 120;
  SvgWriter svg(w, h);
  svg.rect(0, 0, w, h, "#ffffff");
  svg.line(ml, h - mb, w - mr, h - mb, "#000");
  svg.line(ml, h - mb, ml, mt, "#000");
  svg.text(ml, mt - 10, "per-environment mean traversal time (s), ordered by "
                        + baseline + " difficulty");
  const std::vector<std::string> palette = {"#c02020", "#20a020", "#2060c0",
                                            "#c0a020"};
  std::map<std::string, std::string> color;
  std::vector<std::string> names;
  for (const auto& [env, per_planner] : envs)
    for (const auto& [name, _] : per_planner)
      if (!color.count(name)) {
        color[name] = palette[color.size() % palette.size()];
        names.push_back(name);
      }
  const double plot_w = w - ml - mr, plot_h = h - mt - mb;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const double x =
        ml + plot_w * (order.size() > 1
                           ? static_cast<double>(i) / (order.size() - 1)
                           : 0.5);
    for (const auto& [name, st] : envs.at(order[i].second)) {
      const double t = st.mean_capped_time();
      if (!std::isfinite(t)) continue;
      const double y = h - mb - plot_h * (t / t_max);
      svg.circle(x, y, 3.0, color[name]);
    }
  }
  double ly = mt + 10;
  for (const auto& name : names) {
    svg.circle(w - mr + 12, ly - 4, 4.0, color[name]);
    svg.text(w - mr + 22, ly, name);
    ly += 16;
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.0f s", t_max);
  svg.text(4, mt + 8, buf, 10);
  svg.text(4, h - mb, "0", 10);
  svg.save(path);
}

void write_bars_svg(const std::string& path,
                    const std::vector<PlannerSummary>& summaries) {
  const double w = 420, h = 300, mb = 60, mt = 30, ml = 50;
  SvgWriter svg(w, h);
  svg.rect(0, 0, w, h, "#ffffff");
  svg.text(ml, mt - 10, "mean traversal time over successes (s)");
  double t_max = 1.0;
  for (const auto& s : summaries)
    if (std::isfinite(s.mean_time)) t_max = std::max(t_max, s.mean_time);
  const double bar_w = (w - ml - 20) / std::max<std::size_t>(1, summaries.size());
  double x = ml;
  for (const auto& s : summaries) {
    if (std::isfinite(s.mean_time)) {
      const double bh = (h - mt - mb) * (s.mean_time / t_max);
      svg.rect(x + 8, h - mb - bh, bar_w - 16, bh, "#2060c0");
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.1f", s.mean_time);
      svg.text(x + 12, h - mb - bh - 4, buf, 10);
    } else {
      svg.text(x + 12, h - mb - 8, "inf", 12, "#c02020");
    }
    svg.text(x + 8, h - mb + 16, s.planner, 12);
    char rate[64];
    std::snprintf(rate, sizeof(rate), "%.0f%%", 100.0 * s.success_rate);
    svg.text(x + 8, h - mb + 32, rate, 10);
    x += bar_w;
  }
  svg.save(path);
}

}  // namespace lflh
