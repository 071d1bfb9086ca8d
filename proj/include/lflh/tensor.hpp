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

#ifndef LFLH_TENSOR_HPP_
#define LFLH_TENSOR_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "lflh/common.hpp"

namespace lflh {

/// Dense multi-dimensional array of 64-bit reals with an optional gradient
/// buffer of the same length. Value-semantic; safe to copy and move between
/// threads.
struct Tensor {
  std::vector<int> shape;
  std::vector<double> values;
  std::vector<double> grad;  // empty when absent

  Tensor() = default;
  Tensor(std::vector<int> s, std::vector<double> v);
  static Tensor zeros(std::vector<int> shape);

  std::size_t size() const { return values.size(); }
  int rows() const { return shape.empty() ? 0 : shape[0]; }
  int cols() const { return shape.size() < 2 ? 1 : shape[1]; }

  void ensure_grad();
  void zero_grad();
};

std::size_t shape_product(const std::vector<int>& shape);
std::string shape_str(const std::vector<int>& shape);
bool same_shape(const std::vector<int>& a, const std::vector<int>& b);

}  // namespace lflh

#endif  // LFLH_TENSOR_HPP_
