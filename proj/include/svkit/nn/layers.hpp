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

#ifndef SVKIT_NN_LAYERS_HPP
#define SVKIT_NN_LAYERS_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "svkit/nn/kernels.hpp"
#include "svkit/nn/rng.hpp"
#include "svkit/nn/tensor.hpp"

namespace svkit::nn {

using Batch = std::vector<TensorD>;

enum class LayerKind : std::uint32_t {
  conv3d = 0,
  maxpool_freq = 1,
  prelu = 2,
  batchnorm = 3,
  fully_connected = 4,
  locally_connected = 5,
  softmax = 6,
};

const char* to_string(LayerKind kind);

enum class Mode { train, infer };

struct BatchNormConfig {
  double eps = 1e-5;
  double momentum = 0.99;
};

// Descriptor of one layer. `units` is the output channel count for conv3d,
// the output width for fully_connected, and the per-patch unit count for
// locally_connected; prelu and batchnorm infer their channel count from the
// incoming shape.
struct LayerSpec {
  LayerKind kind = LayerKind::prelu;
  std::string name;
  Extent3 kernel;
  Extent3 stride;
  Index units = 0;
  bool pad_depth = false;
  Index patch = 8;

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

// A named tensor owned by a layer. Buffers (batchnorm running statistics)
// are serialized with the checkpoint but never touched by the optimizer.
struct Parameter {
  std::string name;
  TensorD value;
  TensorD grad;
  bool learnable = true;
};

class Layer {
 public:
  explicit Layer(LayerSpec spec, Shape input_shape)
      : spec_(std::move(spec)), input_shape_(std::move(input_shape)) {}
  virtual ~Layer() = default;

  const LayerSpec& spec() const { return spec_; }
  const Shape& input_shape() const { return input_shape_; }
  virtual Shape output_shape() const = 0;

  // Pure function of (parameters, inputs).
  virtual Batch infer(const Batch& inputs) const = 0;
  // Train-mode forward: caches what backward() needs and, for batchnorm,
  // uses batch statistics and updates the running averages.
  virtual Batch train(const Batch& inputs) = 0;
  Batch forward(const Batch& inputs, Mode mode) {
    return mode == Mode::infer ? infer(inputs) : train(inputs);
  }
  // Accumulates parameter gradients (+=) and returns input gradients.
  virtual Batch backward(const Batch& grad_outputs) = 0;

  virtual std::unique_ptr<Layer> clone() const = 0;

  std::vector<Parameter>& parameters() { return params_; }
  const std::vector<Parameter>& parameters() const { return params_; }
  Parameter& parameter(const std::string& name);
  const Parameter& parameter(const std::string& name) const;

  void zero_grad();

 protected:
  void check_inputs(const Batch& inputs) const;
  Parameter& add_parameter(std::string name, TensorD value, bool learnable = true);

  LayerSpec spec_;
  Shape input_shape_;
  std::vector<Parameter> params_;
};

// Builds a layer for the given input shape. Parameters are initialized from
// `rng` (variance scaling for weights, 0.25 PReLU slopes, unit batchnorm
// scale); passing nullptr leaves them zeroed for deserialization.
std::unique_ptr<Layer> make_layer(const LayerSpec& spec, const Shape& input_shape,
                                  Rng* rng, const BatchNormConfig& bn = {});

inline constexpr double kInitialPreluSlope = 0.25;

}  // namespace svkit::nn

#endif  // SVKIT_NN_LAYERS_HPP
