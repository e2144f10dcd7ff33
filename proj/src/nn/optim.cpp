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

#include "svkit/nn/optim.hpp"

namespace svkit::nn {

SgdMomentum::SgdMomentum(SgdConfig config) : config_(config) {
  if (!(config_.learning_rate > 0.0)) {
    throw ConfigError("sgd: learning rate must be > 0");
  }
  if (config_.momentum < 0.0 || config_.momentum >= 1.0) {
    throw ConfigError("sgd: momentum must lie in [0, 1)");
  }
}

void SgdMomentum::step(Network& net, double grad_scale) {
  auto params = net.learnable_parameters();
  if (velocity_.empty()) {
    for (const auto* p : params) velocity_.push_back(Eigen::VectorXd::Zero(p->value.size()));
  }
  if (velocity_.size() != params.size()) {
    throw DimensionError("sgd: optimizer bound to a different network");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& value = params[i]->value.values();
    const Eigen::VectorXd g = params[i]->grad.values() * grad_scale;
    sgd_momentum_step(value, g, config_.learning_rate, config_.momentum,
                      velocity_[i]);
  }
}

}  // namespace svkit::nn
