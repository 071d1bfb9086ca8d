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

#include "lflh/hallucination.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "lflh/common.hpp"

namespace lflh {

namespace {
constexpr double kVarEps = 1e-6;     // variance head floor
constexpr double kDistEps = 1e-12;   // smoothing inside sqrt
constexpr double kPriorVarFloor = 1e-6;

double softplus_plain(double x) {
  if (x > 30.0) return x;
  if (x < -30.0) return std::exp(x);
  return std::log1p(std::exp(x));
}
}  // namespace

PriorSpec fit_prior(const Plan& plan, double size_mean, double size_var) {
  PriorSpec prior;
  prior.size_mean = size_mean;
  prior.size_var = size_var;
  const auto pts = plan.positions();
  const double n = static_cast<double>(pts.size());
  double mx = 0.0, my = 0.0;
  for (const auto& p : pts) {
    mx += p.x;
    my += p.y;
  }
  mx /= n;
  my /= n;
  double vx = 0.0, vy = 0.0;
  for (const auto& p : pts) {
    vx += (p.x - mx) * (p.x - mx);
    vy += (p.y - my) * (p.y - my);
  }
  prior.loc_mean_x = mx;
  prior.loc_mean_y = my;
  prior.loc_var_x = std::max(vx / n, kPriorVarFloor);
  prior.loc_var_y = std::max(vy / n, kPriorVarFloor);
  return prior;
}

double gaussian_kl(double mu, double var, double mu0, double var0) {
  return 0.5 * std::log(var0 / var) +
         (var + (mu - mu0) * (mu - mu0)) / (2.0 * var0) - 0.5;
}

HallucinationModel HallucinationModel::init(int plan_len, int slots,
                                            std::uint64_t seed) {
  LFLH_REQUIRE(plan_len >= 21, "encoder: plan too short for three convs");
  LFLH_REQUIRE(slots >= 1, "encoder: need at least one slot");
  Rng rng(mix_seed(seed, 0x656e6372ULL));
  HallucinationModel m;
  m.slots = slots;
  m.plan_len = plan_len;
  m.conv1 = make_conv1d(4, 32, 5, 2, rng);
  m.conv2 = make_conv1d(32, 64, 5, 2, rng);
  m.conv3 = make_conv1d(64, 64, 5, 2, rng);
  const auto out_len = [](int t) { return (t - 5) / 2 + 1; };
  const int feat = 64 * out_len(out_len(out_len(plan_len)));
  m.fc = make_dense(feat, 6 * slots, rng);
  return m;
}

std::vector<Tensor*> HallucinationModel::parameters() {
  return {&conv1.kernels, &conv1.bias, &conv2.kernels, &conv2.bias,
          &conv3.kernels, &conv3.bias, &fc.weights,    &fc.bias};
}

std::vector<NamedParam> HallucinationModel::named_parameters() {
  return {{"conv1.kernels", &conv1.kernels}, {"conv1.bias", &conv1.bias},
          {"conv2.kernels", &conv2.kernels}, {"conv2.bias", &conv2.bias},
          {"conv3.kernels", &conv3.kernels}, {"conv3.bias", &conv3.bias},
          {"fc.weights", &fc.weights},       {"fc.bias", &fc.bias}};
}

void save_hallucination_model(const std::string& path,
                              HallucinationModel& m) {
  save_checkpoint(path, "hallucination-encoder", m.named_parameters());
}

HallucinationModel load_hallucination_model(const std::string& path,
                                            int plan_len, int slots) {
  HallucinationModel m = HallucinationModel::init(plan_len, slots, 0);
  load_checkpoint(path, "hallucination-encoder", m.named_parameters());
  return m;
}

EncoderOut encode_on_tape(Tape& tape, HallucinationModel& model,
                          const Plan& plan) {
  const int n = model.plan_len;
  LFLH_REQUIRE(static_cast<int>(plan.points.size()) == n,
               "encode: plan length does not match the model");
  std::vector<double> channels(static_cast<std::size_t>(4) * n);
  for (int i = 0; i < n; ++i) {
    channels[0 * n + i] = plan.points[i].pose.x;
    channels[1 * n + i] = plan.points[i].pose.y;
    channels[2 * n + i] = plan.points[i].twist.v;
    channels[3 * n + i] = plan.points[i].twist.omega;
  }
  Var input = tape.constant({4, n}, std::move(channels));
  Var h1 = tape.relu(conv1d_forward(tape, model.conv1, input));
  Var h2 = tape.relu(conv1d_forward(tape, model.conv2, h1));
  Var h3 = tape.relu(conv1d_forward(tape, model.conv3, h2));
  const auto& s3 = tape.shape(h3);
  Var flat = tape.reshape(h3, {s3[0] * s3[1]});
  Var out = dense_forward(tape, model.fc, flat);

  const int k = model.slots;
  EncoderOut eo;
  eo.mean_x = tape.slice_rows(out, 0 * k, k);
  eo.mean_y = tape.slice_rows(out, 1 * k, k);
  eo.mean_r = tape.softplus(tape.slice_rows(out, 2 * k, k));
  eo.var_x = tape.add_scalar(tape.softplus(tape.slice_rows(out, 3 * k, k)),
                             kVarEps);
  eo.var_y = tape.add_scalar(tape.softplus(tape.slice_rows(out, 4 * k, k)),
                             kVarEps);
  eo.var_r = tape.add_scalar(tape.softplus(tape.slice_rows(out, 5 * k, k)),
                             kVarEps);
  return eo;
}

ObstacleDistribution encode(HallucinationModel& model, const Plan& plan) {
  Tape tape;
  const EncoderOut eo = encode_on_tape(tape, model, plan);
  ObstacleDistribution d;
  d.mean_x = tape.values(eo.mean_x);
  d.mean_y = tape.values(eo.mean_y);
  d.mean_r = tape.values(eo.mean_r);
  d.var_x = tape.values(eo.var_x);
  d.var_y = tape.values(eo.var_y);
  d.var_r = tape.values(eo.var_r);
  return d;
}

SampleNoise draw_noise(int slots, Rng& rng) {
  SampleNoise n;
  n.nx.resize(slots);
  n.ny.resize(slots);
  n.nr.resize(slots);
  for (int i = 0; i < slots; ++i) n.nx[i] = rng.normal();
  for (int i = 0; i < slots; ++i) n.ny[i] = rng.normal();
  for (int i = 0; i < slots; ++i) n.nr[i] = rng.normal();
  return n;
}

SampledObstacles sample_on_tape(Tape& tape, const EncoderOut& out,
                                const SampleNoise& noise, double min_radius) {
  const int k = tape.shape(out.mean_x)[0];
  LFLH_REQUIRE(static_cast<int>(noise.nx.size()) == k,
               "sample: noise size mismatch");
  Var nx = tape.constant({k}, noise.nx);
  Var ny = tape.constant({k}, noise.ny);
  Var nr = tape.constant({k}, noise.nr);
  SampledObstacles s;
  s.x = tape.add(out.mean_x, tape.mul(tape.sqrt(out.var_x), nx));
  s.y = tape.add(out.mean_y, tape.mul(tape.sqrt(out.var_y), ny));
  s.r = tape.max_scalar(
      tape.add(out.mean_r, tape.mul(tape.sqrt(out.var_r), nr)), min_radius);
  return s;
}

std::vector<CircleObstacle> sample_obstacles(const ObstacleDistribution& dist,
                                             Rng& rng, double min_radius) {
  std::vector<CircleObstacle> out;
  const int k = dist.slots();
  out.reserve(k);
  SampleNoise n = draw_noise(k, rng);
  for (int i = 0; i < k; ++i) {
    CircleObstacle ob;
    ob.x = dist.mean_x[i] + std::sqrt(dist.var_x[i]) * n.nx[i];
    ob.y = dist.mean_y[i] + std::sqrt(dist.var_y[i]) * n.ny[i];
    ob.radius = std::max(dist.mean_r[i] + std::sqrt(dist.var_r[i]) * n.nr[i],
                         min_radius);
    out.push_back(ob);
  }
  return out;
}

double loss_reconstruction(const Plan& plan, const TrajSpec& decoded) {
  const std::size_t n = plan.points.size();
  LFLH_REQUIRE(decoded.waypoints.size() == n,
               "loss_reconstruction: length mismatch");
  LFLH_REQUIRE(n >= 2, "loss_reconstruction: need at least two points");
  double pos = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = plan.points[i].pose.x - decoded.waypoints[i].x;
    const double dy = plan.points[i].pose.y - decoded.waypoints[i].y;
    pos += dx * dx + dy * dy;
  }
  pos /= static_cast<double>(n);

  // chord speeds on both sides, with the same smoothing epsilon as the
  // tape implementation so the two routes agree to machine precision
  const double dt = decoded.dt;
  double vel = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double px = plan.points[i + 1].pose.x - plan.points[i].pose.x;
    const double py = plan.points[i + 1].pose.y - plan.points[i].pose.y;
    const double qx = decoded.waypoints[i + 1].x - decoded.waypoints[i].x;
    const double qy = decoded.waypoints[i + 1].y - decoded.waypoints[i].y;
    const double vp = std::sqrt(px * px + py * py + kDistEps) / dt;
    const double vq = std::sqrt(qx * qx + qy * qy + kDistEps) / dt;
    vel += (vp - vq) * (vp - vq);
  }
  vel /= static_cast<double>(n - 1);
  return pos + vel;
}

double loss_prior(const ObstacleDistribution& dist, const PriorSpec& prior) {
  double total = 0.0;
  for (int i = 0; i < dist.slots(); ++i) {
    total += gaussian_kl(dist.mean_x[i], dist.var_x[i], prior.loc_mean_x,
                         prior.loc_var_x);
    total += gaussian_kl(dist.mean_y[i], dist.var_y[i], prior.loc_mean_y,
                         prior.loc_var_y);
    total += gaussian_kl(dist.mean_r[i], dist.var_r[i], prior.size_mean,
                         prior.size_var);
  }
  return total;
}

double loss_collision(const std::vector<CircleObstacle>& obstacles,
                      const Plan& plan, double clearance) {
  const auto pts = plan.positions();
  double total = 0.0;
  for (std::size_t i = 0; i < obstacles.size(); ++i) {
    for (std::size_t j = i + 1; j < obstacles.size(); ++j) {
      const double d = std::hypot(obstacles[i].x - obstacles[j].x,
                                  obstacles[i].y - obstacles[j].y) -
                       obstacles[i].radius - obstacles[j].radius;
      const double h = std::max(clearance - d, 0.0);
      total += h * h;
    }
  }
  for (const auto& ob : obstacles) {
    const double d =
        point_polyline_distance({ob.x, ob.y}, pts) - ob.radius;
    const double h = std::max(clearance - d, 0.0);
    total += h * h;
  }
  return total;
}

Var prior_loss_on_tape(Tape& tape, const EncoderOut& out,
                       const PriorSpec& prior) {
  const int k = tape.shape(out.mean_x)[0];
  const auto kl_dim = [&](Var mu, Var var, double mu0, double var0) {
    // 0.5*log(var0/var) + (var + (mu-mu0)^2) / (2*var0) - 0.5
    Var log_term = tape.scale(
        tape.add_scalar(tape.scale(tape.log(var), -1.0), std::log(var0)),
        0.5);
    Var quad = tape.scale(
        tape.add(var, tape.square(tape.add_scalar(mu, -mu0))),
        1.0 / (2.0 * var0));
    return tape.sum(
        tape.add_scalar(tape.add(log_term, quad), -0.5));
  };
  (void)k;
  Var total = kl_dim(out.mean_x, out.var_x, prior.loc_mean_x, prior.loc_var_x);
  total = tape.add(total, kl_dim(out.mean_y, out.var_y, prior.loc_mean_y,
                                 prior.loc_var_y));
  total = tape.add(total, kl_dim(out.mean_r, out.var_r, prior.size_mean,
                                 prior.size_var));
  return total;
}

Var collision_loss_on_tape(Tape& tape, const SampledObstacles& obs,
                           const Plan& plan, double clearance) {
  const int k = tape.shape(obs.x)[0];
  Var total = tape.scalar(0.0);

  if (k >= 2) {
    // pairwise obstacle separation, each unordered pair once
    Var ones_1k = tape.constant({1, k}, std::vector<double>(k, 1.0));
    Var ones_k1 = tape.constant({k, 1}, std::vector<double>(k, 1.0));
    Var cx_col = tape.reshape(obs.x, {k, 1});
    Var cy_col = tape.reshape(obs.y, {k, 1});
    Var r_col = tape.reshape(obs.r, {k, 1});
    Var dx = tape.sub(tape.matmul(cx_col, ones_1k),
                      tape.matmul(ones_k1, tape.reshape(obs.x, {1, k})));
    Var dy = tape.sub(tape.matmul(cy_col, ones_1k),
                      tape.matmul(ones_k1, tape.reshape(obs.y, {1, k})));
    Var dist = tape.sqrt(tape.add_scalar(
        tape.add(tape.square(dx), tape.square(dy)), kDistEps));
    Var rsum = tape.add(tape.matmul(r_col, ones_1k),
                        tape.matmul(ones_k1, tape.reshape(obs.r, {1, k})));
    Var d = tape.sub(dist, rsum);
    Var hinge =
        tape.relu(tape.add_scalar(tape.scale(d, -1.0), clearance));
    std::vector<double> mask(static_cast<std::size_t>(k) * k, 0.0);
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j) mask[static_cast<std::size_t>(i) * k + j] = 1.0;
    Var masked = tape.mul(tape.square(hinge), tape.constant({k, k}, mask));
    total = tape.add(total, tape.sum(masked));
  }

  // obstacle-to-polyline clearance: distance to every segment, row min
  const auto pts = plan.positions();
  const int m = static_cast<int>(pts.size()) - 1;
  LFLH_REQUIRE(m >= 1, "collision loss: degenerate plan");
  std::vector<double> ax(m), ay(m), dxs(m), dys(m), inv_len2(m);
  for (int i = 0; i < m; ++i) {
    ax[i] = pts[i].x;
    ay[i] = pts[i].y;
    dxs[i] = pts[i + 1].x - pts[i].x;
    dys[i] = pts[i + 1].y - pts[i].y;
    const double l2 = dxs[i] * dxs[i] + dys[i] * dys[i];
    inv_len2[i] = l2 > 0.0 ? 1.0 / l2 : 0.0;
  }
  Var ones_1m = tape.constant({1, m}, std::vector<double>(m, 1.0));
  Var ones_k1 = tape.constant({k, 1}, std::vector<double>(k, 1.0));
  Var a_x = tape.matmul(ones_k1, tape.constant({1, m}, ax));
  Var a_y = tape.matmul(ones_k1, tape.constant({1, m}, ay));
  Var d_x = tape.matmul(ones_k1, tape.constant({1, m}, dxs));
  Var d_y = tape.matmul(ones_k1, tape.constant({1, m}, dys));
  Var il2 = tape.matmul(ones_k1, tape.constant({1, m}, inv_len2));
  Var px = tape.sub(tape.matmul(tape.reshape(obs.x, {k, 1}), ones_1m), a_x);
  Var py = tape.sub(tape.matmul(tape.reshape(obs.y, {k, 1}), ones_1m), a_y);
  Var t = tape.min_scalar(
      tape.max_scalar(
          tape.mul(tape.add(tape.mul(px, d_x), tape.mul(py, d_y)), il2), 0.0),
      1.0);
  Var ex = tape.sub(px, tape.mul(t, d_x));
  Var ey = tape.sub(py, tape.mul(t, d_y));
  Var seg_dist = tape.sqrt(tape.add_scalar(
      tape.add(tape.square(ex), tape.square(ey)), kDistEps));
  Var min_dist = tape.row_min(seg_dist);           // [k]
  Var d_plan = tape.sub(min_dist, obs.r);
  Var hinge =
      tape.relu(tape.add_scalar(tape.scale(d_plan, -1.0), clearance));
  total = tape.add(total, tape.sum(tape.square(hinge)));
  return total;
}

std::vector<EpochStats> train_hallucination(HallucinationModel& model,
                                            const std::vector<Plan>& dataset,
                                            const HalTrainConfig& cfg) {
  LFLH_REQUIRE(!dataset.empty(), "train_hallucination: empty dataset");
  LFLH_REQUIRE(cfg.batch >= 1 && cfg.epochs >= 1 && cfg.mc_samples >= 1,
               "train_hallucination: bad config");

  // decoder gradient check before spending time on training; a shortened
  // iteration budget keeps the finite-difference probe well conditioned
  {
    DecodeInstance inst;
    inst.plan = dataset.front();
    inst.cfg = cfg.decoder;
    inst.cfg.inner_iterations = std::min(cfg.decoder.inner_iterations, 15);
    Rng rng(mix_seed(cfg.seed, 0x67636b31ULL));
    const auto pts = inst.plan.positions();
    for (int j = 0; j < 4; ++j) {
      const Vec2 p = pts[rng.uniform_index(pts.size())];
      const double ang = rng.uniform(0.0, 2.0 * kPi);
      const double off = rng.uniform(0.3, 0.8);
      inst.obstacles.push_back(
          {p.x + off * std::cos(ang), p.y + off * std::sin(ang),
           rng.uniform(0.15, 0.35)});
    }
    const double err = decode_jacobian_check(inst);
    if (err > cfg.startup_gradcheck_tol)
      throw std::runtime_error(
          "train_hallucination: decoder gradient check failed (max relative "
          "error " +
          std::to_string(err) + " > " +
          std::to_string(cfg.startup_gradcheck_tol) + ")");
  }

  const auto params = model.parameters();
  AdamState adam = make_adam(params, cfg.lr);
  Rng rng(mix_seed(cfg.seed, 0x68616c74ULL));
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);

  std::vector<EpochStats> curve;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    // deterministic shuffle
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[rng.uniform_index(i)]);

    EpochStats stats;
    std::size_t processed = 0;
    zero_grads(params);
    int in_batch = 0;
    for (std::size_t oi = 0; oi < order.size(); ++oi) {
      const Plan& plan = dataset[order[oi]];
      const PriorSpec prior =
          fit_prior(plan, cfg.size_prior_mean, cfg.size_prior_var);
      const TrajSpec init = TrajSpec::from_plan(plan, plan.points[1].t -
                                                          plan.points[0].t);
      for (int s = 0; s < cfg.mc_samples; ++s) {
        Tape tape;
        const EncoderOut eo = encode_on_tape(tape, model, plan);
        const SampleNoise noise = draw_noise(model.slots, rng);
        const SampledObstacles obs =
            sample_on_tape(tape, eo, noise, cfg.min_radius);
        const DecodedTraj decoded =
            decode_on_tape(tape, init, cfg.decoder, obs.x, obs.y, obs.r);
        Var recon = reconstruction_loss_on_tape(tape, decoded, plan, init.dt);
        Var prior_term = prior_loss_on_tape(tape, eo, prior);
        Var coll_term =
            collision_loss_on_tape(tape, obs, plan, cfg.clearance);
        Var total = tape.add(
            recon, tape.add(tape.scale(prior_term, cfg.lambda_prior),
                            tape.scale(coll_term, cfg.lambda_coll)));
        tape.backward(total);
        stats.recon += tape.value(recon);
        stats.prior += tape.value(prior_term);
        stats.coll += tape.value(coll_term);
        stats.total += tape.value(total);
        ++processed;
        ++in_batch;
      }
      const bool flush = in_batch >= cfg.batch || oi + 1 == order.size();
      if (flush) {
        for (Tensor* p : params) {
          p->ensure_grad();
          for (double& g : p->grad) g /= static_cast<double>(in_batch);
        }
        adam_step(params, adam);
        zero_grads(params);
        in_batch = 0;
      }
    }
    stats.recon /= static_cast<double>(processed);
    stats.prior /= static_cast<double>(processed);
    stats.coll /= static_cast<double>(processed);
    stats.total /= static_cast<double>(processed);
    curve.push_back(stats);
  }
  return curve;
}

void save_training_log(const std::string& path,
                       const std::vector<EpochStats>& curve) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write training log: " + path);
  out << "epoch recon prior coll total\n";
  char buf[160];
  for (std::size_t e = 0; e < curve.size(); ++e) {
    std::snprintf(buf, sizeof(buf), "%zu %.9g %.9g %.9g %.9g\n", e + 1,
                  curve[e].recon, curve[e].prior, curve[e].coll,
                  curve[e].total);
    out << buf;
  }
}

}  // namespace lflh
