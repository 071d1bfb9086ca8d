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

#ifndef LFLH_COMMON_HPP_
#define LFLH_COMMON_HPP_

#include <stdexcept>
#include <string>

namespace lflh {

// Thrown when an operation's preconditions are violated by the caller.
class ContractViolation : public std::invalid_argument {
 public:
  explicit ContractViolation(const std::string& what)
      : std::invalid_argument(what) {}
};

// Thrown when a required upstream artifact (file) is missing.
class MissingArtifact : public std::runtime_error {
 public:
  explicit MissingArtifact(const std::string& what)
      : std::runtime_error(what) {}
};

#define LFLH_REQUIRE(cond, msg)                 \
  do {                                          \
    if (!(cond)) {                              \
      throw ::lflh::ContractViolation(          \
          std::string(msg) + " [" #cond "]");   \
    }                                           \
  } while (0)

}  // namespace lflh

#endif  // LFLH_COMMON_HPP_
