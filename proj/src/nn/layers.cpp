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

#include "svkit/nn/layers.hpp"

#include <span>

namespace svkit::nn {

const char* to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::conv3d: return "conv3d";
    case LayerKind::maxpool_freq: return "maxpool_freq";
    case LayerKind::prelu: return "prelu";
    case LayerKind::batchnorm: return "batchnorm";
    case LayerKind::fully_connected: return "fully_connected";
    case LayerKind::locally_connected: return "locally_connected";
    case LayerKind::softmax: return "softmax";
  }
  return "unknown";
}

Parameter& Layer::parameter(const std::string& name) {
  for (auto& p : params_) {
    if (p.name == name) return p;
  }
  throw ConfigError("layer " + spec_.name + " has no parameter " + name);
}

const Parameter& Layer::parameter(const std::string& name) const {
  for (const auto& p : params_) {
    if (p.name == name) return p;
  }
  throw ConfigError("layer " + spec_.name + " has no parameter " + name);
}

void Layer::zero_grad() {
  for (auto& p : params_) {
    if (p.learnable) p.grad.values().setZero();
  }
}

void Layer::check_inputs(const Batch& inputs) const {
  if (inputs.empty()) throw DimensionError(spec_.name + ": empty batch");
  for (const auto& x : inputs) {
    if (x.shape() != input_shape_) {
      throw DimensionError(spec_.name + ": expected input " +
                           shape_string(input_shape_) + ", got " +
                           shape_string(x.shape()));
    }
  }
}

Parameter& Layer::add_parameter(std::string name, TensorD value, bool learnable) {
  Parameter p{std::move(name), TensorD(value.shape()), TensorD(value.shape()),
              learnable};
  p.value = std::move(value);
  params_.push_back(std::move(p));
  return params_.back();
}

namespace {

class Conv3dLayer final : public Layer {
 public:
  Conv3dLayer(LayerSpec spec, Shape input_shape, Rng* rng)
      : Layer(std::move(spec), std::move(input_shape)) {
    if (input_shape_.size() != 4) {
      throw DimensionError(spec_.name + ": conv3d expects [D,H,W,C] input, got " +
                           shape_string(input_shape_));
    }
    const Shape wshape{spec_.kernel.depth, spec_.kernel.height,
                       spec_.kernel.width, input_shape_[3], spec_.units};
    output_shape_ =
        conv3d_output_shape(input_shape_, wshape, spec_.stride, spec_.pad_depth);
    const Index fan_in = shape_size(wshape) / spec_.units;
    add_parameter("weight", rng ? variance_scaling_init(wshape, fan_in, *rng)
                                : TensorD(wshape));
    add_parameter("bias", TensorD({spec_.units}));
  }

  Shape output_shape() const override { return output_shape_; }

  Batch infer(const Batch& inputs) const override {
    check_inputs(inputs);
    const auto& w = params_[0].value;
    const auto& b = params_[1].value;
    Batch out;
    out.reserve(inputs.size());
    for (const auto& x : inputs) {
      out.push_back(conv3d_forward(x, w, b, spec_.stride, spec_.pad_depth));
    }
    return out;
  }

  Batch train(const Batch& inputs) override {
    Batch out = infer(inputs);
    cached_ = inputs;
    return out;
  }

  Batch backward(const Batch& grad_outputs) override {
    Batch grads;
    grads.reserve(grad_outputs.size());
    for (std::size_t i = 0; i < grad_outputs.size(); ++i) {
      auto g = conv3d_backward(cached_.at(i), params_[0].value, spec_.stride,
                               spec_.pad_depth, grad_outputs[i]);
      params_[0].grad.values() += g.weights.values();
      params_[1].grad.values() += g.bias.values();
      grads.push_back(std::move(g.input));
    }
    return grads;
  }

  std::unique_ptr<Layer> clone() const override {
    return std::make_unique<Conv3dLayer>(*this);
  }

 private:
  Shape output_shape_;
  Batch cached_;
};

class MaxPoolFreqLayer final : public Layer {
 public:
  MaxPoolFreqLayer(LayerSpec spec, Shape input_shape)
      : Layer(std::move(spec), std::move(input_shape)) {
    if (input_shape_.size() != 4 || input_shape_[2] < 2) {
      throw DimensionError(spec_.name + ": maxpool_freq needs [D,H,W>=2,C], got " +
                           shape_string(input_shape_));
    }
  }

  Shape output_shape() const override {
    return {input_shape_[0], input_shape_[1], input_shape_[2] / 2,
            input_shape_[3]};
  }

  Batch infer(const Batch& inputs) const override {
    check_inputs(inputs);
    Batch out;
    for (const auto& x : inputs) out.push_back(maxpool_freq_forward(x).output);
    return out;
  }

  Batch train(const Batch& inputs) override {
    check_inputs(inputs);
    Batch out;
    argmax_.clear();
    for (const auto& x : inputs) {
      auto r = maxpool_freq_forward(x);
      out.push_back(std::move(r.output));
      argmax_.push_back(std::move(r.argmax));
    }
    return out;
  }

  Batch backward(const Batch& grad_outputs) override {
    Batch grads;
    for (std::size_t i = 0; i < grad_outputs.size(); ++i) {
      grads.push_back(
          maxpool_freq_backward(input_shape_, argmax_.at(i), grad_outputs[i]));
    }
    return grads;
  }

  std::unique_ptr<Layer> clone() const override {
    return std::make_unique<MaxPoolFreqLayer>(*this);
  }

 private:
  std::vector<std::vector<Index>> argmax_;
};

class PreluLayer final : public Layer {
 public:
  PreluLayer(LayerSpec spec, Shape input_shape, Rng* rng)
      : Layer(std::move(spec), std::move(input_shape)) {
    const Index c = input_shape_.back();
    add_parameter("slope", rng ? TensorD::constant({c}, kInitialPreluSlope)
                               : TensorD({c}));
  }

  Shape output_shape() const override { return input_shape_; }

  Batch infer(const Batch& inputs) const override {
    check_inputs(inputs);
    Batch out;
    for (const auto& x : inputs) out.push_back(prelu_forward(x, params_[0].value));
    return out;
  }

  Batch train(const Batch& inputs) override {
    Batch out = infer(inputs);
    cached_ = inputs;
    return out;
  }

  Batch backward(const Batch& grad_outputs) override {
    Batch grads;
    for (std::size_t i = 0; i < grad_outputs.size(); ++i) {
      auto g = prelu_backward(cached_.at(i), params_[0].value, grad_outputs[i]);
      params_[0].grad.values() += g.slope.values();
      grads.push_back(std::move(g.input));
    }
    return grads;
  }

  std::unique_ptr<Layer> clone() const override {
    return std::make_unique<PreluLayer>(*this);
  }

 private:
  Batch cached_;
};

class BatchNormLayer final : public Layer {
 public:
  BatchNormLayer(LayerSpec spec, Shape input_shape, Rng* rng,
                 const BatchNormConfig& config)
      : Layer(std::move(spec), std::move(input_shape)), config_(config) {
    const Index c = input_shape_.back();
    add_parameter("scale", rng ? TensorD::constant({c}, 1.0) : TensorD({c}));
    add_parameter("shift", TensorD({c}));
    add_parameter("running_mean", TensorD({c}), false);
    add_parameter("running_var", TensorD::constant({c}, 1.0), false);
    // 1 once running statistics hold at least one training batch.
    add_parameter("stats_ready", TensorD({1}), false);
  }

  Shape output_shape() const override { return input_shape_; }

  Batch infer(const Batch& inputs) const override {
    check_inputs(inputs);
    if (params_[4].value[0] == 0.0) {
      throw ConfigError(spec_.name +
                        ": batchnorm running statistics are uninitialized "
                        "(infer mode before any training step)");
    }
    Batch out;
    for (const auto& x : inputs) {
      out.push_back(batchnorm_forward_infer(x, params_[0].value, params_[1].value,
                                            params_[2].value, params_[3].value,
                                            config_.eps));
    }
    return out;
  }

  Batch train(const Batch& inputs) override {
    check_inputs(inputs);
    auto& scale = params_[0].value;
    auto& shift = params_[1].value;
    auto& rmean = params_[2].value;
    auto& rvar = params_[3].value;
    auto& ready = params_[4].value;
    auto r = batchnorm_forward_train(std::span<const TensorD>(inputs), scale,
                                     shift, config_.eps);
    if (ready[0] == 0.0) {
      rmean.values() = r.cache.mean;
      rvar.values() = r.cache.var;
      ready[0] = 1.0;
    } else {
      const double m = config_.momentum;
      rmean.values() = m * rmean.values() + (1.0 - m) * r.cache.mean;
      rvar.values() = m * rvar.values() + (1.0 - m) * r.cache.var;
    }
    cache_ = std::move(r.cache);
    return std::move(r.outputs);
  }

  Batch backward(const Batch& grad_outputs) override {
    auto g = batchnorm_backward_train(cache_, params_[0].value,
                                      std::span<const TensorD>(grad_outputs));
    params_[0].grad.values() += g.scale.values();
    params_[1].grad.values() += g.shift.values();
    return std::move(g.inputs);
  }

  std::unique_ptr<Layer> clone() const override {
    return std::make_unique<BatchNormLayer>(*this);
  }

 private:
  BatchNormConfig config_;
  BatchNormCache<double> cache_;
};

class DenseLayer final : public Layer {
 public:
  DenseLayer(LayerSpec spec, Shape input_shape, Rng* rng)
      : Layer(std::move(spec), std::move(input_shape)) {
    const Index fan_in = shape_size(input_shape_);
    const Shape wshape{spec_.units, fan_in};
    add_parameter("weight", rng ? variance_scaling_init(wshape, fan_in, *rng)
                                : TensorD(wshape));
    add_parameter("bias", TensorD({spec_.units}));
  }

  Shape output_shape() const override { return {spec_.units}; }

  Batch infer(const Batch& inputs) const override {
    check_inputs(inputs);
    Batch out;
    for (const auto& x : inputs) {
      out.push_back(
          fully_connected_forward(x, params_[0].value, params_[1].value));
    }
    return out;
  }

  Batch train(const Batch& inputs) override {
    Batch out = infer(inputs);
    cached_ = inputs;
    return out;
  }

  Batch backward(const Batch& grad_outputs) override {
    Batch grads;
    for (std::size_t i = 0; i < grad_outputs.size(); ++i) {
      auto g = fully_connected_backward(cached_.at(i), params_[0].value,
                                        grad_outputs[i]);
      params_[0].grad.values() += g.weights.values();
      params_[1].grad.values() += g.bias.values();
      grads.push_back(std::move(g.input));
    }
    return grads;
  }

  std::unique_ptr<Layer> clone() const override {
    return std::make_unique<DenseLayer>(*this);
  }

 private:
  Batch cached_;
};

class LocallyConnectedLayer final : public Layer {
 public:
  LocallyConnectedLayer(LayerSpec spec, Shape input_shape, Rng* rng)
      : Layer(std::move(spec), std::move(input_shape)),
        grid_(local_grid(input_shape_, spec_.patch)) {
    const Index area = spec_.patch * spec_.patch;
    const Shape wshape{grid_.patches(), spec_.units, area};
    add_parameter("weight", rng ? variance_scaling_init(wshape, area, *rng)
                                : TensorD(wshape));
    add_parameter("bias", TensorD({grid_.patches() * spec_.units}));
  }

  Shape output_shape() const override {
    return {grid_.rows, grid_.cols, spec_.units};
  }

  Batch infer(const Batch& inputs) const override {
    check_inputs(inputs);
    Batch out;
    for (const auto& x : inputs) {
      out.push_back(locally_connected_forward(x, params_[0].value,
                                              params_[1].value, spec_.patch));
    }
    return out;
  }

  Batch train(const Batch& inputs) override {
    Batch out = infer(inputs);
    cached_ = inputs;
    return out;
  }

  Batch backward(const Batch& grad_outputs) override {
    Batch grads;
    for (std::size_t i = 0; i < grad_outputs.size(); ++i) {
      auto g = locally_connected_backward(cached_.at(i), params_[0].value,
                                          spec_.patch, grad_outputs[i]);
      params_[0].grad.values() += g.weights.values();
      params_[1].grad.values() += g.bias.values();
      grads.push_back(std::move(g.input));
    }
    return grads;
  }

  std::unique_ptr<Layer> clone() const override {
    return std::make_unique<LocallyConnectedLayer>(*this);
  }

 private:
  LocalGrid grid_;
  Batch cached_;
};

// Terminal layer: turns logits into class probabilities. Training uses
// softmax_xent on the logits directly, so backward is never reached.
class SoftmaxLayer final : public Layer {
 public:
  SoftmaxLayer(LayerSpec spec, Shape input_shape)
      : Layer(std::move(spec), std::move(input_shape)) {
    if (input_shape_.size() != 1) {
      throw DimensionError(spec_.name + ": softmax expects a vector of logits");
    }
  }

  Shape output_shape() const override { return input_shape_; }

  Batch infer(const Batch& inputs) const override {
    check_inputs(inputs);
    Batch out;
    for (const auto& x : inputs) out.push_back(softmax(x));
    return out;
  }

  Batch train(const Batch& inputs) override { return infer(inputs); }

  Batch backward(const Batch&) override {
    throw ConfigError(spec_.name +
                      ": softmax backward is fused into softmax_xent");
  }

  std::unique_ptr<Layer> clone() const override {
    return std::make_unique<SoftmaxLayer>(*this);
  }
};

}  // namespace

std::unique_ptr<Layer> make_layer(const LayerSpec& spec, const Shape& input_shape,
                                  Rng* rng, const BatchNormConfig& bn) {
  switch (spec.kind) {
    case LayerKind::conv3d:
      return std::make_unique<Conv3dLayer>(spec, input_shape, rng);
    case LayerKind::maxpool_freq:
      return std::make_unique<MaxPoolFreqLayer>(spec, input_shape);
    case LayerKind::prelu:
      return std::make_unique<PreluLayer>(spec, input_shape, rng);
    case LayerKind::batchnorm:
      return std::make_unique<BatchNormLayer>(spec, input_shape, rng, bn);
    case LayerKind::fully_connected:
      return std::make_unique<DenseLayer>(spec, input_shape, rng);
    case LayerKind::locally_connected:
      return std::make_unique<LocallyConnectedLayer>(spec, input_shape, rng);
    case LayerKind::softmax:
      return std::make_unique<SoftmaxLayer>(spec, input_shape);
  }
  throw ConfigError("make_layer: unknown layer kind");
}

}  // namespace svkit::nn
