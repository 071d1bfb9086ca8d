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

#include "lflh/nn.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace lflh {

DenseLayer make_dense(int in, int out, Rng& rng) {
  LFLH_REQUIRE(in > 0 && out > 0, "make_dense: positive dims required");
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  Tensor w = Tensor::zeros({out, in});
  for (double& x : w.values) x = rng.uniform(-bound, bound);
  return DenseLayer{std::move(w), Tensor::zeros({out})};
}

Conv1dLayer make_conv1d(int in_ch, int out_ch, int k, int stride, Rng& rng) {
  LFLH_REQUIRE(in_ch > 0 && out_ch > 0, "make_conv1d: positive channels");
  LFLH_REQUIRE(k >= 1, "make_conv1d: kernel width must be >= 1");
  LFLH_REQUIRE(stride >= 1, "make_conv1d: stride must be >= 1");
  const double bound = 1.0 / std::sqrt(static_cast<double>(in_ch) * k);
  Tensor kern = Tensor::zeros({out_ch, in_ch, k});
  for (double& x : kern.values) x = rng.uniform(-bound, bound);
  return Conv1dLayer{std::move(kern), Tensor::zeros({out_ch}), stride};
}

Var dense_forward(Tape& tape, Var w, Var b, Var x) {
  const auto& sx = tape.shape(x);
  if (sx.size() == 1) {
    return tape.add(tape.matmul(w, x), b);
  }
  LFLH_REQUIRE(sx.size() == 2, "dense_forward: input must be 1-D or 2-D");
  return tape.add_rowvec(tape.matmul(x, tape.transpose(w)), b);
}

Var conv1d_forward(Tape& tape, Var kernels, Var bias, int stride, Var input) {
  return tape.conv1d(input, kernels, bias, stride);
}

Var dense_forward(Tape& tape, DenseLayer& layer, Var x) {
  return dense_forward(tape, tape.param(layer.weights), tape.param(layer.bias),
                       x);
}

Var conv1d_forward(Tape& tape, Conv1dLayer& layer, Var input) {
  return tape.conv1d(input, tape.param(layer.kernels), tape.param(layer.bias),
                     layer.stride);
}

AdamState make_adam(const std::vector<Tensor*>& params, double lr) {
  AdamState st;
  st.lr = lr;
  for (const Tensor* p : params) {
    st.m.push_back(Tensor::zeros(p->shape));
    st.v.push_back(Tensor::zeros(p->shape));
  }
  return st;
}

void adam_step(const std::vector<Tensor*>& params, AdamState& state) {
  LFLH_REQUIRE(params.size() == state.m.size(),
               "adam_step: parameter count changed");
  state.step += 1;
  const double b1t = 1.0 - std::pow(state.beta1, state.step);
  const double b2t = 1.0 - std::pow(state.beta2, state.step);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& p = *params[i];
    LFLH_REQUIRE(same_shape(p.shape, state.m[i].shape),
                 "adam_step: moment/parameter shape mismatch");
    p.ensure_grad();
    auto& m = state.m[i].values;
    auto& v = state.v[i].values;
    for (std::size_t j = 0; j < p.values.size(); ++j) {
      const double g = p.grad[j];
      m[j] = state.beta1 * m[j] + (1.0 - state.beta1) * g;
      v[j] = state.beta2 * v[j] + (1.0 - state.beta2) * g * g;
      const double mhat = m[j] / b1t;
      const double vhat = v[j] / b2t;
      p.values[j] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
    }
  }
}

void zero_grads(const std::vector<Tensor*>& params) {
  for (Tensor* p : params) p->zero_grad();
}

void save_checkpoint(const std::string& path, const std::string& kind,
                     const std::vector<NamedParam>& params) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out << "lflh-ckpt 1 " << kind << "\n";
  char buf[64];
  for (const auto& np : params) {
    out << "param " << np.name << " " << np.tensor->shape.size();
    for (int d : np.tensor->shape) out << " " << d;
    out << "\n";
    for (std::size_t i = 0; i < np.tensor->values.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%a", np.tensor->values[i]);
      out << buf << (i + 1 == np.tensor->values.size() ? "" : " ");
    }
    out << "\n";
  }
  out << "end\n";
  if (!out) throw std::runtime_error("failed writing checkpoint: " + path);
}

void load_checkpoint(const std::string& path, const std::string& kind,
                     const std::vector<NamedParam>& params) {
  std::ifstream in(path);
  if (!in) throw MissingArtifact("missing checkpoint file: " + path);
  std::string magic, k;
  int version = 0;
  in >> magic >> version >> k;
  if (magic != "lflh-ckpt" || version != 1)
    throw std::runtime_error("unrecognized checkpoint format: " + path);
  if (k != kind)
    throw std::runtime_error("checkpoint kind mismatch in " + path +
                             ": expected " + kind + ", found " + k);
  for (const auto& np : params) {
    std::string tag, name;
    std::size_t ndim = 0;
    in >> tag >> name >> ndim;
    if (!in || tag != "param" || name != np.name)
      throw std::runtime_error("checkpoint entry mismatch in " + path +
                               ": expected param " + np.name);
    std::vector<int> shape(ndim);
    for (auto& d : shape) in >> d;
    if (!same_shape(shape, np.tensor->shape))
      throw std::runtime_error("checkpoint shape mismatch for " + np.name +
                               ": file " + shape_str(shape) + " vs model " +
                               shape_str(np.tensor->shape));
    for (double& x : np.tensor->values) {
      std::string tok;
      in >> tok;
      if (!in) throw std::runtime_error("truncated checkpoint: " + path);
      x = std::strtod(tok.c_str(), nullptr);
    }
  }
  std::string tail;
  in >> tail;
  if (tail != "end")
    throw std::runtime_error("trailing data in checkpoint: " + path);
}

}  // namespace lflh
