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

#include "lflh/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "lflh/common.hpp"

namespace lflh {

namespace {
constexpr double kDistEps = 1e-12;  // keeps sqrt/div smooth at zero distance
}

std::vector<double> TrajSpec::speeds() const {
  std::vector<double> out;
  out.reserve(waypoints.size() > 0 ? waypoints.size() - 1 : 0);
  for (std::size_t i = 0; i + 1 < waypoints.size(); ++i)
    out.push_back((waypoints[i + 1] - waypoints[i]).norm() / dt);
  return out;
}

TrajSpec TrajSpec::from_plan(const Plan& plan, double dt) {
  TrajSpec t;
  t.dt = dt;
  t.waypoints = plan.positions();
  return t;
}

TrajSpec TrajSpec::straight_line(const Vec2& a, const Vec2& b, int n,
                                 double dt) {
  LFLH_REQUIRE(n >= 2, "straight_line: need at least two waypoints");
  TrajSpec t;
  t.dt = dt;
  t.waypoints.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double s = static_cast<double>(i) / (n - 1);
    t.waypoints.push_back({a.x + s * (b.x - a.x), a.y + s * (b.y - a.y)});
  }
  return t;
}

namespace {

// Gradient of the smoothness term w.r.t. one coordinate vector:
// 2*w*(scatter of the second differences with the [1, -2, 1] stencil).
Var smoothness_gradient(Tape& tape, Var coords, int n, double w) {
  Var s = tape.add(
      tape.sub(tape.slice_rows(coords, 0, n - 2),
               tape.scale(tape.slice_rows(coords, 1, n - 2), 2.0)),
      tape.slice_rows(coords, 2, n - 2));
  Var z1 = tape.constant({1}, {0.0});
  Var z2 = tape.constant({2}, {0.0, 0.0});
  Var a = tape.concat_rows({s, z2});
  Var b = tape.concat_rows({z1, s, z1});
  Var c = tape.concat_rows({z2, s});
  return tape.scale(tape.add(tape.sub(a, tape.scale(b, 2.0)), c), 2.0 * w);
}

struct CollisionGrads {
  Var gx;
  Var gy;
};

// Gradient of w_coll * sum_ij max(c - d_ij, 0)^2 w.r.t. the waypoints,
// with d_ij = ||x_i - obs_j|| - r_j.
CollisionGrads collision_gradient(Tape& tape, Var x, Var y, int n, Var obs_x,
                                  Var obs_y, Var obs_r,
                                  const DecoderConfig& cfg) {
  const int k = tape.shape(obs_x)[0];
  Var ones_1k = tape.constant({1, k}, std::vector<double>(k, 1.0));
  Var ones_n1 = tape.constant({n, 1}, std::vector<double>(n, 1.0));
  Var ones_k1 = tape.constant({k, 1}, std::vector<double>(k, 1.0));

  Var dx = tape.sub(tape.matmul(tape.reshape(x, {n, 1}), ones_1k),
                    tape.matmul(ones_n1, tape.reshape(obs_x, {1, k})));
  Var dy = tape.sub(tape.matmul(tape.reshape(y, {n, 1}), ones_1k),
                    tape.matmul(ones_n1, tape.reshape(obs_y, {1, k})));
  Var dist = tape.sqrt(tape.add_scalar(
      tape.add(tape.square(dx), tape.square(dy)), kDistEps));
  Var d = tape.sub(dist, tape.matmul(ones_n1, tape.reshape(obs_r, {1, k})));
  Var hinge = tape.relu(tape.add_scalar(tape.scale(d, -1.0), cfg.clearance));
  Var coef = tape.scale(tape.div(hinge, dist), -2.0 * cfg.w_coll);
  Var gx = tape.reshape(tape.matmul(tape.mul(coef, dx), ones_k1), {n});
  Var gy = tape.reshape(tape.matmul(tape.mul(coef, dy), ones_k1), {n});
  return {gx, gy};
}

// Objective value (for traces and monotonicity checks).
Var objective_on_tape(Tape& tape, Var x, Var y, int n, Var obs_x, Var obs_y,
                      Var obs_r, bool has_obstacles, Var init_x, Var init_y,
                      const DecoderConfig& cfg) {
  const auto second_diff = [&](Var c) {
    return tape.add(
        tape.sub(tape.slice_rows(c, 0, n - 2),
                 tape.scale(tape.slice_rows(c, 1, n - 2), 2.0)),
        tape.slice_rows(c, 2, n - 2));
  };
  Var j = tape.scale(tape.add(tape.sum(tape.square(second_diff(x))),
                              tape.sum(tape.square(second_diff(y)))),
                     cfg.w_smooth);
  if (has_obstacles) {
    const int k = tape.shape(obs_x)[0];
    Var ones_1k = tape.constant({1, k}, std::vector<double>(k, 1.0));
    Var ones_n1 = tape.constant({n, 1}, std::vector<double>(n, 1.0));
    Var dx = tape.sub(tape.matmul(tape.reshape(x, {n, 1}), ones_1k),
                      tape.matmul(ones_n1, tape.reshape(obs_x, {1, k})));
    Var dy = tape.sub(tape.matmul(tape.reshape(y, {n, 1}), ones_1k),
                      tape.matmul(ones_n1, tape.reshape(obs_y, {1, k})));
    Var dist = tape.sqrt(tape.add_scalar(
        tape.add(tape.square(dx), tape.square(dy)), kDistEps));
    Var d = tape.sub(dist, tape.matmul(ones_n1, tape.reshape(obs_r, {1, k})));
    Var hinge =
        tape.relu(tape.add_scalar(tape.scale(d, -1.0), cfg.clearance));
    j = tape.add(j, tape.scale(tape.sum(tape.square(hinge)), cfg.w_coll));
  }
  if (cfg.w_fit > 0.0) {
    Var fx = tape.sum(tape.square(tape.sub(x, init_x)));
    Var fy = tape.sum(tape.square(tape.sub(y, init_y)));
    j = tape.add(j, tape.scale(tape.add(fx, fy), cfg.w_fit));
  }
  return j;
}

}  // namespace

DecodedTraj decode_on_tape(Tape& tape, const TrajSpec& init,
                           const DecoderConfig& cfg, Var obs_x, Var obs_y,
                           Var obs_r, std::vector<double>* objective_trace) {
  const int n = static_cast<int>(init.waypoints.size());
  LFLH_REQUIRE(n >= 3, "decode: need at least three waypoints");
  LFLH_REQUIRE(cfg.inner_iterations >= 0 && cfg.inner_step > 0.0,
               "decode: bad optimizer settings");
  const bool has_obstacles = obs_x.tape != nullptr;
  if (has_obstacles) {
    LFLH_REQUIRE(obs_y.tape == &tape && obs_r.tape == &tape &&
                     obs_x.tape == &tape,
                 "decode: obstacle vars must live on this tape");
    LFLH_REQUIRE(tape.shape(obs_x) == tape.shape(obs_y) &&
                     tape.shape(obs_x) == tape.shape(obs_r) &&
                     tape.shape(obs_x).size() == 1,
                 "decode: obstacle vars must be congruent 1-D vectors");
  }

  std::vector<double> xs(n), ys(n);
  for (int i = 0; i < n; ++i) {
    xs[i] = init.waypoints[i].x;
    ys[i] = init.waypoints[i].y;
  }
  Var x = tape.constant({n}, xs);
  Var y = tape.constant({n}, ys);
  Var init_x = x, init_y = y;
  Var x_first = tape.constant({1}, {xs.front()});
  Var x_last = tape.constant({1}, {xs.back()});
  Var y_first = tape.constant({1}, {ys.front()});
  Var y_last = tape.constant({1}, {ys.back()});

  if (objective_trace) {
    objective_trace->clear();
    objective_trace->push_back(tape.value(objective_on_tape(
        tape, x, y, n, obs_x, obs_y, obs_r, has_obstacles, init_x, init_y,
        cfg)));
  }

  for (int it = 0; it < cfg.inner_iterations; ++it) {
    Var gx = smoothness_gradient(tape, x, n, cfg.w_smooth);
    Var gy = smoothness_gradient(tape, y, n, cfg.w_smooth);
    if (has_obstacles) {
      const CollisionGrads cg =
          collision_gradient(tape, x, y, n, obs_x, obs_y, obs_r, cfg);
      gx = tape.add(gx, cg.gx);
      gy = tape.add(gy, cg.gy);
    }
    if (cfg.w_fit > 0.0) {
      gx = tape.add(gx, tape.scale(tape.sub(x, init_x), 2.0 * cfg.w_fit));
      gy = tape.add(gy, tape.scale(tape.sub(y, init_y), 2.0 * cfg.w_fit));
    }
    Var xi = tape.sub(tape.slice_rows(x, 1, n - 2),
                      tape.scale(tape.slice_rows(gx, 1, n - 2),
                                 cfg.inner_step));
    Var yi = tape.sub(tape.slice_rows(y, 1, n - 2),
                      tape.scale(tape.slice_rows(gy, 1, n - 2),
                                 cfg.inner_step));
    x = tape.concat_rows({x_first, xi, x_last});
    y = tape.concat_rows({y_first, yi, y_last});
    if (objective_trace) {
      objective_trace->push_back(tape.value(objective_on_tape(
          tape, x, y, n, obs_x, obs_y, obs_r, has_obstacles, init_x, init_y,
          cfg)));
    }
  }
  return {x, y};
}

TrajSpec decode(const std::vector<CircleObstacle>& obstacles, const Pose2& c_c,
                const Pose2& c_g, const TrajSpec& init,
                const DecoderConfig& cfg,
                std::vector<double>* objective_trace) {
  LFLH_REQUIRE(!init.waypoints.empty(), "decode: empty init");
  LFLH_REQUIRE(std::abs(init.waypoints.front().x - c_c.x) < 1e-9 &&
                   std::abs(init.waypoints.front().y - c_c.y) < 1e-9,
               "decode: init must start at c_c");
  LFLH_REQUIRE(std::abs(init.waypoints.back().x - c_g.x) < 1e-9 &&
                   std::abs(init.waypoints.back().y - c_g.y) < 1e-9,
               "decode: init must end at c_g");
  Tape tape;
  Var ox{}, oy{}, orr{};
  if (!obstacles.empty()) {
    const int k = static_cast<int>(obstacles.size());
    std::vector<double> cx(k), cy(k), cr(k);
    for (int j = 0; j < k; ++j) {
      cx[j] = obstacles[j].x;
      cy[j] = obstacles[j].y;
      cr[j] = obstacles[j].radius;
    }
    ox = tape.constant({k}, cx);
    oy = tape.constant({k}, cy);
    orr = tape.constant({k}, cr);
  }
  const DecodedTraj d =
      decode_on_tape(tape, init, cfg, ox, oy, orr, objective_trace);
  TrajSpec out;
  out.dt = init.dt;
  const auto& xv = tape.values(d.x);
  const auto& yv = tape.values(d.y);
  out.waypoints.reserve(xv.size());
  for (std::size_t i = 0; i < xv.size(); ++i)
    out.waypoints.push_back({xv[i], yv[i]});
  return out;
}

Var reconstruction_loss_on_tape(Tape& tape, const DecodedTraj& traj,
                                const Plan& plan, double dt) {
  const int n = static_cast<int>(plan.points.size());
  LFLH_REQUIRE(tape.shape(traj.x)[0] == n,
               "reconstruction loss: length mismatch");
  std::vector<double> px(n), py(n);
  for (int i = 0; i < n; ++i) {
    px[i] = plan.points[i].pose.x;
    py[i] = plan.points[i].pose.y;
  }
  Var cx = tape.constant({n}, px);
  Var cy = tape.constant({n}, py);
  Var ex = tape.square(tape.sub(traj.x, cx));
  Var ey = tape.square(tape.sub(traj.y, cy));
  Var pos_term = tape.mean(tape.add(ex, ey));

  // chord speeds of both trajectories
  const auto chord = [&](Var x, Var y) {
    Var ddx = tape.sub(tape.slice_rows(x, 1, n - 1),
                       tape.slice_rows(x, 0, n - 1));
    Var ddy = tape.sub(tape.slice_rows(y, 1, n - 1),
                       tape.slice_rows(y, 0, n - 1));
    return tape.scale(
        tape.sqrt(tape.add_scalar(tape.add(tape.square(ddx), tape.square(ddy)),
                                  kDistEps)),
        1.0 / dt);
  };
  Var v_hat = chord(traj.x, traj.y);
  Var v_ref = chord(cx, cy);
  Var vel_term = tape.mean(tape.square(tape.sub(v_hat, v_ref)));
  return tape.add(pos_term, vel_term);
}

double decode_jacobian_check(const DecodeInstance& instance, double h) {
  const int k = static_cast<int>(instance.obstacles.size());
  LFLH_REQUIRE(k >= 1, "jacobian check: need at least one obstacle");
  const double dt = 0.02;
  const TrajSpec init = TrajSpec::from_plan(instance.plan, dt);

  std::vector<double> cx(k), cy(k), cr(k);
  for (int j = 0; j < k; ++j) {
    cx[j] = instance.obstacles[j].x;
    cy[j] = instance.obstacles[j].y;
    cr[j] = instance.obstacles[j].radius;
  }

  // autodiff gradient, all parameters at once
  Tensor tx({k}, cx), ty({k}, cy), tr({k}, cr);
  {
    Tape tape;
    Var vx = tape.param(tx), vy = tape.param(ty), vr = tape.param(tr);
    const DecodedTraj d = decode_on_tape(tape, init, instance.cfg, vx, vy, vr);
    Var loss = reconstruction_loss_on_tape(tape, d, instance.plan, dt);
    tape.backward(loss);
  }

  // forward evaluation of the loss for finite differences
  const auto eval = [&](const std::vector<double>& ox,
                        const std::vector<double>& oy,
                        const std::vector<double>& orr) {
    Tape tape;
    Var vx = tape.constant({k}, ox);
    Var vy = tape.constant({k}, oy);
    Var vr = tape.constant({k}, orr);
    const DecodedTraj d = decode_on_tape(tape, init, instance.cfg, vx, vy, vr);
    return tape.value(
        reconstruction_loss_on_tape(tape, d, instance.plan, dt));
  };

  double max_rel = 0.0;
  const auto check_param = [&](std::vector<double>& vec, int j, double ad) {
    const double saved = vec[j];
    vec[j] = saved + h;
    const double fp = eval(cx, cy, cr);
    vec[j] = saved - h;
    const double fm = eval(cx, cy, cr);
    vec[j] = saved;
    const double fd = (fp - fm) / (2.0 * h);
    const double denom = std::max({std::abs(ad), std::abs(fd), 1e-8});
    const double rel = std::abs(ad - fd) / denom;
    max_rel = std::max(max_rel, rel);
  };
  for (int j = 0; j < k; ++j) {
    check_param(cx, j, tx.grad[j]);
    check_param(cy, j, ty.grad[j]);
    check_param(cr, j, tr.grad[j]);
  }
  return max_rel;
}

void dump_objective_trace(const std::string& path,
                          const std::vector<double>& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trace: " + path);
  out << "iter objective\n";
  char buf[64];
  for (std::size_t i = 0; i < trace.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu %.17g\n", i, trace[i]);
    out << buf;
  }
}

}  // namespace lflh
