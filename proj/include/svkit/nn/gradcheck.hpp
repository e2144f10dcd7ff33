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

#ifndef SVKIT_NN_GRADCHECK_HPP
#define SVKIT_NN_GRADCHECK_HPP

#include <string>

#include "svkit/nn/network.hpp"

namespace svkit::nn {

struct GradCheckReport {
  double max_param_error = 0.0;
  double max_input_error = 0.0;
  Index scalars_checked = 0;
  std::string worst;  // "<layer>.<param>[i]" or "input[b][i]"

  double max_error() const { return std::max(max_param_error, max_input_error); }
};

// |a - n| / max(1, |a|, |n|): relative for gradients of order one and
// above, absolute below that.
double gradient_error(double analytic, double numeric);

// Compares analytic gradients of L = sum_b <r_b, f(x_b)> against central
// differences, where r_b is a fixed random projection and f runs the
// network up to its logits in train mode. Every learnable scalar and every
// input scalar is perturbed by +/- eps.
GradCheckReport finite_diff_check(const Network& net, const Batch& inputs,
                                  double eps, Rng& rng);

}  // namespace svkit::nn

#endif  // SVKIT_NN_GRADCHECK_HPP
