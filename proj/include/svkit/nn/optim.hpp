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

#ifndef SVKIT_NN_OPTIM_HPP
#define SVKIT_NN_OPTIM_HPP

#include <vector>

#include "svkit/nn/network.hpp"

namespace svkit::nn {

// v <- momentum * v - lr * g;  p <- p + v
template <typename Derived1, typename Derived2, typename Derived3>
void sgd_momentum_step(Eigen::MatrixBase<Derived1>& params,
                       const Eigen::MatrixBase<Derived2>& grads, double lr,
                       double momentum, Eigen::MatrixBase<Derived3>& velocity) {
  if (params.size() != grads.size() || params.size() != velocity.size()) {
    throw DimensionError("sgd_momentum_step: parameter/gradient/velocity size mismatch");
  }
  velocity = momentum * velocity - lr * grads;
  params += velocity;
}

struct SgdConfig {
  double learning_rate = 0.01;
  double momentum = 0.9;
};

// Momentum SGD over every learnable parameter of one network. Velocity
// buffers are allocated lazily in parameter order.
class SgdMomentum {
 public:
  explicit SgdMomentum(SgdConfig config);

  // Applies one update using the accumulated gradients scaled by
  // grad_scale (typically 1 / batch size).
  void step(Network& net, double grad_scale = 1.0);

  const SgdConfig& config() const { return config_; }

 private:
  SgdConfig config_;
  std::vector<Eigen::VectorXd> velocity_;
};

}  // namespace svkit::nn

#endif  // SVKIT_NN_OPTIM_HPP
