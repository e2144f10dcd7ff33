// Copyright (c) 2026 The svkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SVKIT_TESTS_TEST_UTIL_HPP
#define SVKIT_TESTS_TEST_UTIL_HPP

#include <algorithm>
#include <cmath>

#include "svkit/nn/rng.hpp"
#include "svkit/nn/tensor.hpp"

namespace svkit::testing {

inline nn::TensorD random_tensor(nn::Shape shape, nn::Rng& rng,
                                 double scale = 1.0) {
  nn::TensorD t(std::move(shape));
  for (nn::Index i = 0; i < t.size(); ++i) t[i] = scale * rng.normal();
  return t;
}

// max |a - b| / max |b|, with a unit floor on the denominator.
inline double relative_error(const nn::TensorD& a, const nn::TensorD& b) {
  const double diff = (a.values() - b.values()).cwiseAbs().maxCoeff();
  const double scale = std::max(1e-300, b.values().cwiseAbs().maxCoeff());
  return diff / scale;
}

}  // namespace svkit::testing

#endif  // SVKIT_TESTS_TEST_UTIL_HPP
