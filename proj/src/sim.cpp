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

#include "lflh/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "lflh/common.hpp"
#include "lflh/rng.hpp"

namespace lflh {

std::vector<Vec2> Plan::positions() const {
  std::vector<Vec2> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back({p.pose.x, p.pose.y});
  return out;
}

std::vector<double> Plan::chord_speeds(double dt) const {
  std::vector<double> out;
  out.reserve(points.size() > 0 ? points.size() - 1 : 0);
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const double dx = points[i + 1].pose.x - points[i].pose.x;
    const double dy = points[i + 1].pose.y - points[i].pose.y;
    out.push_back(std::hypot(dx, dy) / dt);
  }
  return out;
}

void validate_plan(const Plan& plan, int expected_len, double dt, double tol) {
  LFLH_REQUIRE(static_cast<int>(plan.points.size()) == expected_len,
               "plan length mismatch");
  const auto near = [](const Pose2& a, const Pose2& b, double eps) {
    return std::abs(a.x - b.x) <= eps && std::abs(a.y - b.y) <= eps &&
           std::abs(wrap_angle(a.phi - b.phi)) <= eps;
  };
  LFLH_REQUIRE(near(plan.start, plan.points.front().pose, 1e-12),
               "plan start must equal first pose");
  LFLH_REQUIRE(near(plan.goal, plan.points.back().pose, 1e-12),
               "plan goal must equal last pose");
  double prev_t = -1.0;
  for (const auto& p : plan.points) {
    LFLH_REQUIRE(p.t >= 0.0 && p.t > prev_t, "plan times must increase");
    prev_t = p.t;
  }
  for (std::size_t i = 0; i + 1 < plan.points.size(); ++i) {
    const Pose2 pred = step_unicycle(plan.points[i].pose,
                                     plan.points[i + 1].twist, dt);
    LFLH_REQUIRE(near(pred, plan.points[i + 1].pose, tol),
                 "plan poses inconsistent with twists");
  }
}

Pose2 step_unicycle(const Pose2& pose, const Twist& twist, double dt) {
  LFLH_REQUIRE(dt > 0.0, "step_unicycle: dt must be positive");
  const double v = twist.v, w = twist.omega;
  Pose2 out;
  if (std::abs(w) > 1e-9) {
    const double phi1 = pose.phi + w * dt;
    out.x = pose.x + (v / w) * (std::sin(phi1) - std::sin(pose.phi));
    out.y = pose.y - (v / w) * (std::cos(phi1) - std::cos(pose.phi));
    out.phi = wrap_angle(phi1);
  } else {
    out.x = pose.x + v * dt * std::cos(pose.phi);
    out.y = pose.y + v * dt * std::sin(pose.phi);
    out.phi = wrap_angle(pose.phi + w * dt);
  }
  return out;
}

Twist policy_step(const Twist& current, const Twist& target,
                  const RobotLimits& limits, double dt) {
  const auto approach = [](double cur, double tgt, double rate) {
    const double dv = tgt - cur;
    if (std::abs(dv) <= rate) return tgt;
    return cur + (dv > 0 ? rate : -rate);
  };
  Twist out;
  out.v = approach(current.v, target.v, limits.a_lin * dt);
  out.omega = approach(current.omega, target.omega, limits.a_ang * dt);
  return out;
}

bool check_collision(const Pose2& pose, double footprint_radius,
                     const OccupancyGrid& grid) {
  const double r = footprint_radius;
  const int x0 = grid.cell_x(pose.x - r), x1 = grid.cell_x(pose.x + r);
  const int y0 = grid.cell_y(pose.y - r), y1 = grid.cell_y(pose.y + r);
  for (int cy = y0; cy <= y1; ++cy) {
    for (int cx = x0; cx <= x1; ++cx) {
      if (!grid.occupied(cx, cy)) continue;
      // exact disc vs cell rectangle test
      const double rx0 = grid.origin.x + cx * grid.resolution;
      const double ry0 = grid.origin.y + cy * grid.resolution;
      const double qx = std::clamp(pose.x, rx0, rx0 + grid.resolution);
      const double qy = std::clamp(pose.y, ry0, ry0 + grid.resolution);
      const double dx = pose.x - qx, dy = pose.y - qy;
      if (dx * dx + dy * dy <= r * r) return true;
    }
  }
  return false;
}

bool check_collision(const Pose2& pose, double footprint_radius,
                     const std::vector<CircleObstacle>& obstacles) {
  for (const auto& ob : obstacles) {
    const double d = std::hypot(pose.x - ob.x, pose.y - ob.y);
    if (d <= footprint_radius + ob.radius) return true;
  }
  return false;
}

namespace {

// Re-express a window of stream samples in the frame of its first pose.
Plan reframe_window(const std::vector<OdomPoint>& stream, std::size_t begin,
                    int len, double dt) {
  Plan plan;
  plan.points.reserve(len);
  const Pose2 ref = stream[begin].pose;
  for (int i = 0; i < len; ++i) {
    const OdomPoint& src = stream[begin + i];
    OdomPoint dst;
    dst.pose = pose_in_frame(ref, src.pose);
    dst.twist = src.twist;
    dst.t = i * dt;
    plan.points.push_back(dst);
  }
  plan.start = plan.points.front().pose;
  plan.goal = plan.points.back().pose;
  return plan;
}

}  // namespace

std::vector<Plan> collect_open_space(const CollectConfig& cfg, double duration,
                                     std::uint64_t seed) {
  LFLH_REQUIRE(cfg.plan_len >= 2, "collect: plan_len must be >= 2");
  LFLH_REQUIRE(cfg.stride >= 1, "collect: stride must be >= 1");
  LFLH_REQUIRE(cfg.dt > 0.0, "collect: dt must be positive");
  const int steps = static_cast<int>(std::floor(duration / cfg.dt + 1e-9));
  if (steps + 1 < cfg.plan_len)
    throw ContractViolation(
        "collect: duration too short for a single plan window");

  Rng rng(mix_seed(seed, 0x636f6c6cULL));
  const int resample_steps =
      std::max(1, static_cast<int>(std::round(cfg.resample_period / cfg.dt)));

  std::vector<OdomPoint> stream;
  stream.reserve(steps + 1);
  Pose2 pose;
  Twist twist;
  stream.push_back({pose, twist, 0.0});
  Twist target{cfg.hold_v ? cfg.limits.v_max : 0.0, 0.0};
  for (int g = 1; g <= steps; ++g) {
    if ((g - 1) % resample_steps == 0) {
      target.v = cfg.hold_v ? cfg.limits.v_max
                            : rng.uniform(0.0, cfg.limits.v_max);
      target.omega = rng.uniform(-cfg.limits.omega_max, cfg.limits.omega_max);
    }
    twist = policy_step(twist, target, cfg.limits, cfg.dt);
    pose = step_unicycle(pose, twist, cfg.dt);
    stream.push_back({pose, twist, g * cfg.dt});
  }

  std::vector<Plan> plans;
  for (std::size_t begin = 0; begin + cfg.plan_len <= stream.size();
       begin += cfg.stride) {
    plans.push_back(reframe_window(stream, begin, cfg.plan_len, cfg.dt));
  }
  return plans;
}

void save_plans(const std::string& path, const std::vector<Plan>& plans,
                const CollectConfig& cfg, std::uint64_t seed) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write plan dataset: " + path);
  out << "# lflh-plans 1\n";
  out << "# columns: t x y phi v omega\n";
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "# v_max=%.17g seed=%llu dt=%.17g plan_len=%d count=%zu\n",
                cfg.limits.v_max, static_cast<unsigned long long>(seed),
                cfg.dt, cfg.plan_len, plans.size());
  out << buf;
  for (std::size_t k = 0; k < plans.size(); ++k) {
    out << "plan " << k << "\n";
    for (const auto& p : plans[k].points) {
      std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g %.17g %.17g %.17g\n",
                    p.t, p.pose.x, p.pose.y, p.pose.phi, p.twist.v,
                    p.twist.omega);
      out << buf;
    }
  }
  if (!out) throw std::runtime_error("failed writing plan dataset: " + path);
}

std::vector<Plan> load_plans(const std::string& path, CollectConfig* cfg_out,
                             std::uint64_t* seed_out) {
  std::ifstream in(path);
  if (!in) throw MissingArtifact("missing plan dataset: " + path);
  std::string line;
  std::getline(in, line);
  if (line != "# lflh-plans 1")
    throw std::runtime_error("unrecognized plan dataset header: " + path);
  std::getline(in, line);  // column comment
  std::getline(in, line);  // metadata
  double v_max = 0.0, dt = 0.0;
  unsigned long long seed = 0;
  int plan_len = 0;
  std::size_t count = 0;
  if (std::sscanf(line.c_str(),
                  "# v_max=%lg seed=%llu dt=%lg plan_len=%d count=%zu",
                  &v_max, &seed, &dt, &plan_len, &count) != 5)
    throw std::runtime_error("bad plan dataset metadata: " + path);
  if (cfg_out) {
    cfg_out->limits.v_max = v_max;
    cfg_out->dt = dt;
    cfg_out->plan_len = plan_len;
  }
  if (seed_out) *seed_out = seed;

  std::vector<Plan> plans;
  plans.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    std::getline(in, line);
    std::size_t idx = 0;
    if (std::sscanf(line.c_str(), "plan %zu", &idx) != 1 || idx != k)
      throw std::runtime_error("bad plan marker in " + path);
    Plan plan;
    plan.points.reserve(plan_len);
    for (int i = 0; i < plan_len; ++i) {
      if (!std::getline(in, line))
        throw std::runtime_error("truncated plan dataset: " + path);
      OdomPoint p;
      if (std::sscanf(line.c_str(), "%lg %lg %lg %lg %lg %lg", &p.t, &p.pose.x,
                      &p.pose.y, &p.pose.phi, &p.twist.v,
                      &p.twist.omega) != 6)
        throw std::runtime_error("bad plan row in " + path);
      plan.points.push_back(p);
    }
    plan.start = plan.points.front().pose;
    plan.goal = plan.points.back().pose;
    plans.push_back(std::move(plan));
  }
  return plans;
}

}  // namespace lflh
