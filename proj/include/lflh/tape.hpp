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

#ifndef LFLH_TAPE_HPP_
#define LFLH_TAPE_HPP_

#include <deque>
#include <functional>
#include <vector>

#include "lflh/tensor.hpp"

namespace lflh {

class Tape;

/// Handle to a node on a tape. Cheap to copy; valid for the tape's lifetime.
struct Var {
  Tape* tape = nullptr;
  int id = -1;
};

/// Reverse-mode automatic differentiation over dense tensors.
///
/// Ops append nodes in topological order; backward() walks the tape in
/// reverse and accumulates gradients of a scalar loss into every reachable
/// parameter's Tensor::grad. A tape is single-threaded; use one tape per
/// worker.
class Tape {
 public:
  // ---- leaves ----
  Var param(Tensor& t);  // gradient accumulates into t.grad on backward()
  Var constant(std::vector<int> shape, std::vector<double> values);
  Var constant(const Tensor& t);
  Var scalar(double v);

  // ---- elementwise (same shape) ----
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  Var div(Var a, Var b);

  // ---- elementwise with a constant ----
  Var scale(Var a, double c);
  Var add_scalar(Var a, double c);
  Var max_scalar(Var a, double c);
  Var min_scalar(Var a, double c);
  Var neg(Var a) { return scale(a, -1.0); }

  // ---- elementwise unary ----
  Var relu(Var a);
  Var tanh(Var a);
  Var softplus(Var a);
  Var exp(Var a);
  Var log(Var a);
  Var square(Var a);
  Var sqrt(Var a);

  // ---- structure ----
  Var matmul(Var a, Var b);  // [M,N]x[N,P] -> [M,P]; [M,N]x[N] -> [M]
  Var transpose(Var a);
  Var conv1d(Var input, Var kernels, Var bias, int stride);
  Var add_rowvec(Var m, Var v);  // [R,C] + [C] broadcast over rows
  Var broadcast(Var s, int n);   // scalar -> [n]
  Var slice_rows(Var a, int begin, int count);
  Var concat_rows(const std::vector<Var>& parts);
  Var reshape(Var a, std::vector<int> shape);

  // ---- reductions ----
  Var sum(Var a);
  Var mean(Var a);
  Var reduce_min(Var a);  // gradient routes to the first minimizer
  Var row_min(Var a);     // [R,C] -> [R]

  /// Accumulates d(loss)/d(param) into every parameter tensor's grad.
  /// loss must be scalar; repeated calls accumulate further (zero the
  /// parameter grads between steps).
  void backward(Var loss);

  const std::vector<double>& values(Var v) const;
  const std::vector<int>& shape(Var v) const;
  double value(Var v) const;  // scalar nodes
  std::size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    std::vector<int> shape;
    std::vector<double> val;
    std::vector<double> grad;
    std::function<void(Tape&)> backprop;  // empty for leaves/constants
    Tensor* bound = nullptr;              // parameter leaves only
    bool needs_grad = false;
    bool touched = false;
  };

  Node& node(int id) { return nodes_[id]; }
  const Node& node(int id) const { return nodes_[id]; }
  Var push(std::vector<int> shape, std::vector<double> val, bool needs_grad);
  void touch(int id) { nodes_[id].touched = true; }
  bool needs(Var v) const { return nodes_[v.id].needs_grad; }
  void check_same_tape(Var a) const;

  std::deque<Node> nodes_;

  friend struct Var;
};

}  // namespace lflh

#endif  // LFLH_TAPE_HPP_
