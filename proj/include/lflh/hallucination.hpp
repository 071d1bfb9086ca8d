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

#ifndef LFLH_HALLUCINATION_HPP_
#define LFLH_HALLUCINATION_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "lflh/decoder.hpp"
#include "lflh/nn.hpp"
#include "lflh/rng.hpp"
#include "lflh/sim.hpp"

namespace lflh {

/// Per-slot diagonal Gaussians over obstacle position and radius.
struct ObstacleDistribution {
  std::vector<double> mean_x, mean_y, mean_r;
  std::vector<double> var_x, var_y, var_r;

  int slots() const { return static_cast<int>(mean_x.size()); }
};

/// Priors for the regularization loss: a location Gaussian fitted on the
/// plan's positions (per axis, diagonal) and a fixed size Gaussian.
struct PriorSpec {
  double loc_mean_x = 0.0, loc_mean_y = 0.0;
  double loc_var_x = 1.0, loc_var_y = 1.0;  // floored at 1e-6
  double size_mean = 0.3;
  double size_var = 0.0025;
};

PriorSpec fit_prior(const Plan& plan, double size_mean = 0.3,
                    double size_var = 0.0025);

/// KL(N(mu, var) || N(mu0, var0)) for scalar Gaussians.
double gaussian_kl(double mu, double var, double mu0, double var0);

/// Encoder mapping a plan's (x, y, v, omega) channel sequence to K slots of
/// obstacle location/size means and variances. Three conv layers extract
/// temporal features; one dense layer maps them to the 6K outputs, with a
/// softplus head on the radius mean and all variances.
struct HallucinationModel {
  Conv1dLayer conv1, conv2, conv3;
  DenseLayer fc;
  int slots = 10;
  int plan_len = 125;

  static HallucinationModel init(int plan_len, int slots, std::uint64_t seed);
  std::vector<Tensor*> parameters();
  std::vector<NamedParam> named_parameters();
};

void save_hallucination_model(const std::string& path, HallucinationModel& m);
HallucinationModel load_hallucination_model(const std::string& path,
                                            int plan_len, int slots);

/// Encoder outputs on a tape; all vectors are [K].
struct EncoderOut {
  Var mean_x, mean_y, mean_r;
  Var var_x, var_y, var_r;
};

EncoderOut encode_on_tape(Tape& tape, HallucinationModel& model,
                          const Plan& plan);
ObstacleDistribution encode(HallucinationModel& model, const Plan& plan);

/// Standard-normal draws for reparameterized sampling.
struct SampleNoise {
  std::vector<double> nx, ny, nr;
};
SampleNoise draw_noise(int slots, Rng& rng);

/// Sampled obstacle parameters on a tape: value = mean + sqrt(var) * noise,
/// radius clamped at min_radius. Gradients flow to means and variances.
struct SampledObstacles {
  Var x, y, r;
};
SampledObstacles sample_on_tape(Tape& tape, const EncoderOut& out,
                                const SampleNoise& noise,
                                double min_radius = 0.05);

/// Plain reparameterized sampling from a distribution.
std::vector<CircleObstacle> sample_obstacles(const ObstacleDistribution& dist,
                                             Rng& rng,
                                             double min_radius = 0.05);

// ---- loss terms (plain evaluation) ----

/// Mean squared position error plus mean squared chord-speed error.
double loss_reconstruction(const Plan& plan, const TrajSpec& decoded);

/// Sum of closed-form KL divergences between each slot Gaussian and the
/// prior, over slots and the x/y/r dimensions.
double loss_prior(const ObstacleDistribution& dist, const PriorSpec& prior);

/// Squared-hinge clearance penalty between obstacle pairs and between each
/// obstacle and the plan's position polyline.
double loss_collision(const std::vector<CircleObstacle>& obstacles,
                      const Plan& plan, double clearance = 0.5);

// ---- loss terms on a tape (for training) ----
Var prior_loss_on_tape(Tape& tape, const EncoderOut& out,
                       const PriorSpec& prior);
Var collision_loss_on_tape(Tape& tape, const SampledObstacles& obs,
                           const Plan& plan, double clearance);

/// Training settings for the self-supervised hallucination objective.
struct HalTrainConfig {
  double lambda_prior = 0.3;
  double lambda_coll = 2.0;
  int epochs = 40;
  int batch = 16;
  double lr = 1e-3;
  int mc_samples = 1;
  double clearance = 0.5;
  double size_prior_mean = 0.3;
  double size_prior_var = 0.0025;
  double min_radius = 0.05;
  std::uint64_t seed = 7;
  DecoderConfig decoder;
  double startup_gradcheck_tol = 1e-3;
};

struct EpochStats {
  double recon = 0.0;
  double prior = 0.0;
  double coll = 0.0;
  double total = 0.0;
};

/// Minimize E[recon + lambda1 * prior + lambda2 * coll] over the dataset by
/// Adam with reparameterized sampling through the decoder. Runs a decoder
/// gradient check first and aborts with a diagnostic if it fails. Returns
/// per-epoch mean losses.
std::vector<EpochStats> train_hallucination(HallucinationModel& model,
                                            const std::vector<Plan>& dataset,
                                            const HalTrainConfig& cfg);

void save_training_log(const std::string& path,
                       const std::vector<EpochStats>& curve);

}  // namespace lflh

#endif  // LFLH_HALLUCINATION_HPP_
