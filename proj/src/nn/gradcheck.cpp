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

#include "svkit/nn/gradcheck.hpp"

#include <cmath>

namespace svkit::nn {

double gradient_error(double analytic, double numeric) {
  const double scale = std::max({1.0, std::abs(analytic), std::abs(numeric)});
  return std::abs(analytic - numeric) / scale;
}

namespace {

double projected_loss(Network& net, const Batch& inputs, const Batch& proj) {
  const Batch out = net.forward(inputs, Mode::train, net.logits_end());
  double loss = 0.0;
  for (std::size_t b = 0; b < out.size(); ++b) {
    loss += out[b].values().dot(proj[b].values());
  }
  return loss;
}

}  // namespace

GradCheckReport finite_diff_check(const Network& reference, const Batch& inputs,
                                  double eps, Rng& rng) {
  if (!(eps > 0.0 && eps <= 1e-3)) {
    throw ConfigError("finite_diff_check: eps must lie in (0, 1e-3]");
  }
  Network net = reference;
  Batch out = net.forward(inputs, Mode::train, net.logits_end());
  Batch proj;
  for (const auto& y : out) {
    TensorD r(y.shape());
    for (Index i = 0; i < r.size(); ++i) r[i] = rng.normal();
    proj.push_back(std::move(r));
  }
  net.zero_grad();
  const Batch grad_inputs = net.backward(proj, net.logits_end());

  GradCheckReport report;
  for (std::size_t li = 0; li < net.layer_count(); ++li) {
    auto& layer = net.layer(li);
    for (auto& p : layer.parameters()) {
      if (!p.learnable) continue;
      for (Index i = 0; i < p.value.size(); ++i) {
        const double saved = p.value[i];
        p.value[i] = saved + eps;
        const double up = projected_loss(net, inputs, proj);
        p.value[i] = saved - eps;
        const double down = projected_loss(net, inputs, proj);
        p.value[i] = saved;
        const double err = gradient_error(p.grad[i], (up - down) / (2.0 * eps));
        ++report.scalars_checked;
        if (err > report.max_param_error) {
          report.max_param_error = err;
          if (err >= report.max_input_error) {
            report.worst = layer.spec().name + "." + p.name + "[" +
                           std::to_string(i) + "]";
          }
        }
      }
    }
  }

  Batch probe = inputs;
  for (std::size_t b = 0; b < probe.size(); ++b) {
    for (Index i = 0; i < probe[b].size(); ++i) {
      const double saved = probe[b][i];
      probe[b][i] = saved + eps;
      const double up = projected_loss(net, probe, proj);
      probe[b][i] = saved - eps;
      const double down = projected_loss(net, probe, proj);
      probe[b][i] = saved;
      const double err =
          gradient_error(grad_inputs[b][i], (up - down) / (2.0 * eps));
      ++report.scalars_checked;
      if (err > report.max_input_error) {
        report.max_input_error = err;
        if (err >= report.max_param_error) {
          report.worst = "input[" + std::to_string(b) + "][" +
                         std::to_string(i) + "]";
        }
      }
    }
  }
  return report;
}

}  // namespace svkit::nn
