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

#ifndef LFLH_NN_HPP_
#define LFLH_NN_HPP_

#include <string>
#include <vector>

#include "lflh/rng.hpp"
#include "lflh/tape.hpp"
#include "lflh/tensor.hpp"

namespace lflh {

/// Fully-connected layer: weights [out x in], bias [out].
struct DenseLayer {
  Tensor weights;
  Tensor bias;

  int in_features() const { return weights.shape[1]; }
  int out_features() const { return weights.shape[0]; }
};

/// 1-D convolution layer: kernels [out_ch x in_ch x k], bias [out_ch].
struct Conv1dLayer {
  Tensor kernels;
  Tensor bias;
  int stride = 1;
};

// Uniform fan-in initialization (U[-1/sqrt(fan_in), 1/sqrt(fan_in)]), zero
// bias.
DenseLayer make_dense(int in, int out, Rng& rng);
Conv1dLayer make_conv1d(int in_ch, int out_ch, int k, int stride, Rng& rng);

// Forward on a tape. Dense accepts [in] or a [B x in] batch.
Var dense_forward(Tape& tape, Var w, Var b, Var x);
Var conv1d_forward(Tape& tape, Var kernels, Var bias, int stride, Var input);

// Convenience: register the layer's tensors on the tape and run forward.
Var dense_forward(Tape& tape, DenseLayer& layer, Var x);
Var conv1d_forward(Tape& tape, Conv1dLayer& layer, Var input);

/// Adam optimizer state. Moment tensors are shape-congruent with the
/// parameters they track.
struct AdamState {
  long step = 0;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::vector<Tensor> m;
  std::vector<Tensor> v;
};

AdamState make_adam(const std::vector<Tensor*>& params, double lr);

/// One Adam update from each parameter's accumulated grad; increments the
/// step count and leaves grads untouched (caller zeroes them).
void adam_step(const std::vector<Tensor*>& params, AdamState& state);

void zero_grads(const std::vector<Tensor*>& params);

/// Named parameter for checkpointing.
struct NamedParam {
  std::string name;
  Tensor* tensor;
};

// Versioned text checkpoint; values stored as hex floats so save/load
// round-trips bit-exactly.
void save_checkpoint(const std::string& path, const std::string& kind,
                     const std::vector<NamedParam>& params);
void load_checkpoint(const std::string& path, const std::string& kind,
                     const std::vector<NamedParam>& params);

}  // namespace lflh

#endif  // LFLH_NN_HPP_
