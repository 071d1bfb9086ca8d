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

#include "lflh/tensor.hpp"

#include <numeric>
#include <sstream>

namespace lflh {

std::size_t shape_product(const std::vector<int>& shape) {
  std::size_t n = 1;
  for (int d : shape) {
    LFLH_REQUIRE(d > 0, "tensor extents must be positive");
    n *= static_cast<std::size_t>(d);
  }
  return n;
}

std::string shape_str(const std::vector<int>& shape) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << "x";
    os << shape[i];
  }
  os << "]";
  return os.str();
}

bool same_shape(const std::vector<int>& a, const std::vector<int>& b) {
  return a == b;
}

Tensor::Tensor(std::vector<int> s, std::vector<double> v)
    : shape(std::move(s)), values(std::move(v)) {
  LFLH_REQUIRE(shape_product(shape) == values.size(),
               "shape does not match value count");
}

Tensor Tensor::zeros(std::vector<int> shape) {
  const std::size_t n = shape_product(shape);
  return Tensor(std::move(shape), std::vector<double>(n, 0.0));
}

void Tensor::ensure_grad() {
  if (grad.size() != values.size()) grad.assign(values.size(), 0.0);
}

void Tensor::zero_grad() { grad.assign(values.size(), 0.0); }

}  // namespace lflh
