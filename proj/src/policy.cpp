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

#include "lflh/policy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "lflh/common.hpp"

namespace lflh {

double plan_clearance(const std::vector<CircleObstacle>& obstacles,
                      const Plan& plan) {
  const auto pts = plan.positions();
  double best = std::numeric_limits<double>::infinity();
  for (const auto& ob : obstacles)
    best = std::min(best,
                    point_polyline_distance({ob.x, ob.y}, pts) - ob.radius);
  return best;
}

std::vector<TrainSample> build_training_set(HallucinationModel& model,
                                            const std::vector<Plan>& dataset,
                                            const BuildConfig& cfg,
                                            std::uint64_t seed,
                                            BuildStats* stats) {
  LFLH_REQUIRE(!dataset.empty(), "build_training_set: empty dataset");
  LFLH_REQUIRE(cfg.sampling_count >= 1, "build_training_set: bad config");
  Rng rng(mix_seed(seed, 0x62756964ULL));
  std::vector<TrainSample> out;
  BuildStats local;
  const Pose2 origin{};  // plans are expressed in their own start frame

  for (const Plan& plan : dataset) {
    LFLH_REQUIRE(static_cast<int>(plan.points.size()) == model.plan_len,
                 "build_training_set: plan length does not match the model");
    const ObstacleDistribution dist = encode(model, plan);
    const auto pts = plan.positions();
    double mean_speed = 0.0;
    for (const auto& p : plan.points) mean_speed += std::abs(p.twist.v);
    mean_speed /= static_cast<double>(plan.points.size());

    for (int s = 0; s < cfg.sampling_count; ++s) {
      std::vector<CircleObstacle> set =
          sample_obstacles(dist, rng, cfg.min_radius);
      for (int e = 0; e < cfg.extra_obstacles; ++e) {
        // anchor on a random polyline point, push out perpendicular-free:
        // surface clearance in [clearance, clearance + kappa * mean speed]
        const std::size_t seg = rng.uniform_index(pts.size() - 1);
        const double t = rng.uniform();
        const Vec2 anchor = pts[seg] + (pts[seg + 1] - pts[seg]) * t;
        const double ang = rng.uniform(0.0, 2.0 * kPi);
        const double radius = std::max(
            rng.normal(cfg.size_mean, std::sqrt(cfg.size_var)),
            cfg.min_radius);
        const double gap =
            cfg.clearance + rng.uniform() * cfg.kappa * mean_speed;
        set.push_back({anchor.x + (gap + radius) * std::cos(ang),
                       anchor.y + (gap + radius) * std::sin(ang), radius});
      }
      ++local.attempted;
      if (plan_clearance(set, plan) < cfg.clearance) continue;
      ++local.kept;
      TrainSample sample;
      sample.ranges = raycast_circles(origin, set, cfg.sensor).ranges;
      sample.goal = {plan.goal.x, plan.goal.y};
      sample.current = plan.points.front().twist;
      sample.label = plan.points[1].twist;
      out.push_back(std::move(sample));
    }
  }
  if (stats) *stats = local;
  return out;
}

void save_training_set(const std::string& path,
                       const std::vector<TrainSample>& samples,
                       const SensorConfig& sensor) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write training set: " + path);
  out << "# lflh-dtrain 1\n";
  out << "# columns: ranges[beams] goal_x goal_y cur_v cur_omega label_v "
         "label_omega\n";
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "# beams=%d fov=%.17g max_range=%.17g count=%zu\n",
                sensor.beams, sensor.fov, sensor.max_range, samples.size());
  out << buf;
  for (const auto& s : samples) {
    for (double r : s.ranges) {
      std::snprintf(buf, sizeof(buf), "%.9g ", r);
      out << buf;
    }
    std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g %.17g %.17g %.17g\n",
                  s.goal.x, s.goal.y, s.current.v, s.current.omega, s.label.v,
                  s.label.omega);
    out << buf;
  }
  if (!out) throw std::runtime_error("failed writing training set: " + path);
}

std::vector<TrainSample> load_training_set(const std::string& path,
                                           SensorConfig* sensor_out) {
  std::ifstream in(path);
  if (!in) throw MissingArtifact("missing training set: " + path);
  std::string line;
  std::getline(in, line);
  if (line != "# lflh-dtrain 1")
    throw std::runtime_error("unrecognized training set header: " + path);
  std::getline(in, line);  // column comment
  std::getline(in, line);
  int beams = 0;
  double fov = 0.0, max_range = 0.0;
  std::size_t count = 0;
  if (std::sscanf(line.c_str(), "# beams=%d fov=%lg max_range=%lg count=%zu",
                  &beams, &fov, &max_range, &count) != 4)
    throw std::runtime_error("bad training set metadata: " + path);
  if (sensor_out) {
    sensor_out->beams = beams;
    sensor_out->fov = fov;
    sensor_out->max_range = max_range;
  }
  std::vector<TrainSample> samples;
  samples.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    if (!std::getline(in, line))
      throw std::runtime_error("truncated training set: " + path);
    std::istringstream row(line);
    TrainSample s;
    s.ranges.resize(beams);
    for (double& r : s.ranges) row >> r;
    row >> s.goal.x >> s.goal.y >> s.current.v >> s.current.omega >>
        s.label.v >> s.label.omega;
    if (!row) throw std::runtime_error("bad training set row in " + path);
    samples.push_back(std::move(s));
  }
  return samples;
}

PlannerModel PlannerModel::init(const RobotLimits& limits,
                                const SensorConfig& sensor,
                                std::uint64_t seed, int hidden) {
  Rng rng(mix_seed(seed, 0x706c6e72ULL));
  PlannerModel m;
  m.limits = limits;
  m.sensor = sensor;
  m.l1 = make_dense(sensor.beams + 4, hidden, rng);
  m.l2 = make_dense(hidden, hidden, rng);
  m.out = make_dense(hidden, 2, rng);
  return m;
}

std::vector<Tensor*> PlannerModel::parameters() {
  return {&l1.weights, &l1.bias, &l2.weights,
          &l2.bias,    &out.weights, &out.bias};
}

std::vector<NamedParam> PlannerModel::named_parameters() {
  return {{"l1.weights", &l1.weights},   {"l1.bias", &l1.bias},
          {"l2.weights", &l2.weights},   {"l2.bias", &l2.bias},
          {"out.weights", &out.weights}, {"out.bias", &out.bias}};
}

void save_planner_model(const std::string& path, PlannerModel& m) {
  save_checkpoint(path, "local-planner", m.named_parameters());
}

PlannerModel load_planner_model(const std::string& path,
                                const RobotLimits& limits,
                                const SensorConfig& sensor, int hidden) {
  PlannerModel m = PlannerModel::init(limits, sensor, 0, hidden);
  load_checkpoint(path, "local-planner", m.named_parameters());
  return m;
}

namespace {

// feature vector: normalized ranges, goal, current twist
std::vector<double> planner_features(const PlannerModel& m,
                                     const std::vector<double>& ranges,
                                     const Vec2& goal, const Twist& current) {
  std::vector<double> f;
  f.reserve(ranges.size() + 4);
  for (double r : ranges) f.push_back(r / m.sensor.max_range);
  f.push_back(goal.x);
  f.push_back(goal.y);
  f.push_back(current.v);
  f.push_back(current.omega);
  return f;
}

}  // namespace

std::vector<double> train_planner(PlannerModel& model,
                                  const std::vector<TrainSample>& samples,
                                  const PlannerTrainConfig& cfg) {
  LFLH_REQUIRE(samples.size() >= 100,
               "train_planner: need at least 100 samples");
  LFLH_REQUIRE(cfg.batch >= 1 && cfg.epochs >= 1, "train_planner: bad config");
  const int in_dim = model.sensor.beams + 4;
  for (const auto& s : samples)
    LFLH_REQUIRE(static_cast<int>(s.ranges.size()) == model.sensor.beams,
                 "train_planner: scan length mismatch");

  Rng rng(mix_seed(cfg.seed, 0x74726e70ULL));
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1], order[rng.uniform_index(i)]);
  const std::size_t val_n = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::round(cfg.val_split * samples.size())));
  std::vector<std::size_t> val_idx(order.begin(), order.begin() + val_n);
  std::vector<std::size_t> train_idx(order.begin() + val_n, order.end());
  LFLH_REQUIRE(!train_idx.empty(), "train_planner: empty train split");

  const auto params = model.parameters();
  AdamState adam = make_adam(params, cfg.lr);

  // batched forward: rows of features -> [B x 2] bounded actions
  const auto forward_batch = [&](Tape& tape,
                                 const std::vector<std::size_t>& idx,
                                 bool with_grad) {
    const int b = static_cast<int>(idx.size());
    std::vector<double> feats;
    feats.reserve(static_cast<std::size_t>(b) * in_dim);
    std::vector<double> labels;
    labels.reserve(static_cast<std::size_t>(b) * 2);
    for (std::size_t i : idx) {
      const auto f = planner_features(model, samples[i].ranges,
                                      samples[i].goal, samples[i].current);
      feats.insert(feats.end(), f.begin(), f.end());
      labels.push_back(samples[i].label.v);
      labels.push_back(samples[i].label.omega);
    }
    Var x = tape.constant({b, in_dim}, std::move(feats));
    const auto layer = [&](DenseLayer& l, Var in) {
      Var w = with_grad ? tape.param(l.weights) : tape.constant(l.weights);
      Var bb = with_grad ? tape.param(l.bias) : tape.constant(l.bias);
      return dense_forward(tape, w, bb, in);
    };
    Var h1 = tape.relu(layer(model.l1, x));
    Var h2 = tape.relu(layer(model.l2, h1));
    Var raw = tape.tanh(layer(model.out, h2));
    std::vector<double> scales;
    scales.reserve(static_cast<std::size_t>(b) * 2);
    for (int i = 0; i < b; ++i) {
      scales.push_back(model.limits.v_max);
      scales.push_back(model.limits.omega_max);
    }
    Var pred = tape.mul(raw, tape.constant({b, 2}, std::move(scales)));
    Var err = tape.sub(pred, tape.constant({b, 2}, std::move(labels)));
    return tape.mean(tape.square(err));
  };

  std::vector<double> val_curve;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = train_idx.size(); i > 1; --i)
      std::swap(train_idx[i - 1], train_idx[rng.uniform_index(i)]);
    for (std::size_t off = 0; off < train_idx.size();
         off += static_cast<std::size_t>(cfg.batch)) {
      const std::size_t end =
          std::min(train_idx.size(), off + static_cast<std::size_t>(cfg.batch));
      std::vector<std::size_t> batch(train_idx.begin() + off,
                                     train_idx.begin() + end);
      Tape tape;
      Var loss = forward_batch(tape, batch, true);
      zero_grads(params);
      tape.backward(loss);
      adam_step(params, adam);
    }
    Tape tape;
    val_curve.push_back(tape.value(forward_batch(tape, val_idx, false)));
  }
  zero_grads(params);
  return val_curve;
}

Twist infer_action(const PlannerModel& model, const LidarScan& scan,
                   const Vec2& goal, const Twist& current) {
  LFLH_REQUIRE(scan.beams() == model.sensor.beams,
               "infer_action: scan length mismatch");
  Tape tape;
  Var x = tape.constant(
      {model.sensor.beams + 4},
      planner_features(model, scan.ranges, goal, current));
  const auto layer = [&](const DenseLayer& l, Var in) {
    return dense_forward(tape, tape.constant(l.weights),
                         tape.constant(l.bias), in);
  };
  Var h1 = tape.relu(layer(model.l1, x));
  Var h2 = tape.relu(layer(model.l2, h1));
  Var raw = tape.tanh(layer(model.out, h2));
  const auto& o = tape.values(raw);
  return {model.limits.v_max * o[0], model.limits.omega_max * o[1]};
}

bool rollout_collides(const Twist& action, const std::vector<Vec2>& points,
                      const RobotLimits& limits, const GuardConfig& cfg) {
  if (points.empty()) return false;
  const double hit2 = (limits.footprint_radius + cfg.margin) *
                      (limits.footprint_radius + cfg.margin);
  Pose2 pose;
  const int steps =
      std::max(1, static_cast<int>(std::round(cfg.horizon / cfg.dt)));
  for (int s = 0; s < steps; ++s) {
    pose = step_unicycle(pose, action, cfg.dt);
    for (const auto& p : points) {
      const double dx = pose.x - p.x, dy = pose.y - p.y;
      if (dx * dx + dy * dy < hit2) return true;
    }
  }
  return false;
}

Twist mpc_guard(const Twist& action, const LidarScan& scan,
                const RobotLimits& limits, const GuardConfig& cfg,
                double goal_bearing) {
  LFLH_REQUIRE(cfg.horizon > cfg.dt && cfg.dt > 0.0, "guard: bad horizon/dt");
  const auto points = scan.hit_points();
  if (!rollout_collides(action, points, limits, cfg)) return action;
  double rot_sign = goal_bearing > 0.0 ? 1.0 : (goal_bearing < 0.0 ? -1.0 : 0);
  if (rot_sign == 0.0) rot_sign = action.omega >= 0.0 ? 1.0 : -1.0;
  for (const auto fb : cfg.fallbacks) {
    Twist cand;
    switch (fb) {
      case GuardConfig::Fallback::kHalfSpeed:
        cand = {action.v * 0.5, action.omega};
        break;
      case GuardConfig::Fallback::kQuarterSpeed:
        cand = {action.v * 0.25, action.omega};
        break;
      case GuardConfig::Fallback::kRotateTowardGoal:
        cand = {0.0, rot_sign * 0.5 * limits.omega_max};
        break;
      case GuardConfig::Fallback::kStop:
        return {0.0, 0.0};
    }
    if (!rollout_collides(cand, points, limits, cfg)) return cand;
  }
  return {0.0, 0.0};
}

std::vector<Twist> dwa_window_samples(const Twist& current,
                                      const RobotLimits& limits,
                                      const DwaConfig& cfg) {
  LFLH_REQUIRE(cfg.v_samples >= 2 && cfg.w_samples >= 2,
               "dwa: need at least 2 samples per axis");
  const double v_lo = std::max(0.0, current.v - limits.a_lin * cfg.window_dt);
  const double v_hi =
      std::min(limits.v_max, current.v + limits.a_lin * cfg.window_dt);
  const double w_lo =
      std::max(-limits.omega_max, current.omega - limits.a_ang * cfg.window_dt);
  const double w_hi =
      std::min(limits.omega_max, current.omega + limits.a_ang * cfg.window_dt);
  std::vector<Twist> samples;
  samples.reserve(static_cast<std::size_t>(cfg.v_samples) * cfg.w_samples);
  for (int i = 0; i < cfg.v_samples; ++i) {
    const double v =
        v_lo + (v_hi - v_lo) * static_cast<double>(i) / (cfg.v_samples - 1);
    for (int j = 0; j < cfg.w_samples; ++j) {
      const double w =
          w_lo + (w_hi - w_lo) * static_cast<double>(j) / (cfg.w_samples - 1);
      samples.push_back({v, w});
    }
  }
  return samples;
}

namespace {

// Coarse local grid marking cells within the collision radius of any scan
// point; one lookup per rollout pose.
class ScanCollisionGrid {
 public:
  ScanCollisionGrid(const std::vector<Vec2>& points, double radius,
                    double extent)
      : res_(0.1),
        half_cells_(static_cast<int>(std::ceil(extent / res_)) + 1),
        side_(2 * half_cells_ + 1),
        cells_(static_cast<std::size_t>(side_) * side_, 0) {
    const int r = static_cast<int>(std::ceil(radius / res_));
    for (const auto& p : points) {
      const int cx = half_cells_ + static_cast<int>(std::floor(p.x / res_));
      const int cy = half_cells_ + static_cast<int>(std::floor(p.y / res_));
      for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
          const int nx = cx + dx, ny = cy + dy;
          if (nx < 0 || ny < 0 || nx >= side_ || ny >= side_) continue;
          // conservative: mark when the cell center could be within radius
          if (std::hypot(dx * res_, dy * res_) <= radius + res_)
            cells_[static_cast<std::size_t>(ny) * side_ + nx] = 1;
        }
      }
    }
  }

  bool blocked(double x, double y) const {
    const int cx = half_cells_ + static_cast<int>(std::floor(x / res_));
    const int cy = half_cells_ + static_cast<int>(std::floor(y / res_));
    if (cx < 0 || cy < 0 || cx >= side_ || cy >= side_) return false;
    return cells_[static_cast<std::size_t>(cy) * side_ + cx] != 0;
  }

 private:
  double res_;
  int half_cells_;
  int side_;
  std::vector<std::uint8_t> cells_;
};

}  // namespace

Twist dwa_plan(const LidarScan& scan, const Vec2& goal, const Twist& current,
               const RobotLimits& limits, const DwaConfig& cfg) {
  const auto samples = dwa_window_samples(current, limits, cfg);
  const auto points = scan.hit_points();
  const ScanCollisionGrid grid(points, limits.footprint_radius +
                                           cfg.collision_margin,
                               scan.max_range + 1.0);
  // sparse points for the clearance score
  std::vector<Vec2> sparse;
  for (std::size_t i = 0; i < points.size(); i += 8) sparse.push_back(points[i]);

  const int steps =
      std::max(1, static_cast<int>(std::round(cfg.horizon / cfg.sim_dt)));
  double best_score = -std::numeric_limits<double>::infinity();
  Twist best{};
  bool any_safe = false;

  for (const auto& cand : samples) {
    Pose2 pose;
    bool collides = false;
    for (int s = 0; s < steps; ++s) {
      pose = step_unicycle(pose, cand, cfg.sim_dt);
      if (grid.blocked(pose.x, pose.y)) {
        collides = true;
        break;
      }
    }
    if (collides) continue;

    const double gdx = goal.x - pose.x, gdy = goal.y - pose.y;
    const double gdist = std::hypot(gdx, gdy);
    const double err =
        gdist < 1e-6 ? 0.0
                     : std::abs(wrap_angle(std::atan2(gdy, gdx) - pose.phi));
    const double heading = 1.0 - err / kPi;
    double clearance = cfg.clearance_cap;
    for (const auto& p : sparse) {
      clearance = std::min(
          clearance, std::hypot(pose.x - p.x, pose.y - p.y) -
                         limits.footprint_radius);
      if (clearance <= 0.0) break;
    }
    clearance = std::clamp(clearance / cfg.clearance_cap, 0.0, 1.0);
    const double velocity = limits.v_max > 0.0 ? cand.v / limits.v_max : 0.0;
    const double score = cfg.heading_weight * heading +
                         cfg.clearance_weight * clearance +
                         cfg.velocity_weight * velocity;
    if (score > best_score) {
      best_score = score;
      best = cand;
      any_safe = true;
    }
  }
  if (any_safe) return best;

  // recovery: slow down and rotate toward the goal, staying in the window
  const double v_rec = std::max(0.0, current.v - limits.a_lin * cfg.window_dt);
  const double bearing = std::atan2(goal.y, goal.x);
  const double w_tgt = bearing >= 0.0 ? limits.omega_max : -limits.omega_max;
  const double w_lo =
      std::max(-limits.omega_max, current.omega - limits.a_ang * cfg.window_dt);
  const double w_hi =
      std::min(limits.omega_max, current.omega + limits.a_ang * cfg.window_dt);
  return {v_rec, std::clamp(w_tgt, w_lo, w_hi)};
}

}  // namespace lflh
