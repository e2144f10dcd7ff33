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

#ifndef SVKIT_NN_NETWORK_HPP
#define SVKIT_NN_NETWORK_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "svkit/nn/layers.hpp"

namespace svkit::nn {

enum class Architecture : std::uint32_t {
  fragment = 0,  // ad-hoc stack (tests, gradient checks)
  cnn3d = 1,
  lcn_dvector = 2,
};

const char* to_string(Architecture arch);

struct NetworkSpec {
  Architecture architecture = Architecture::fragment;
  Shape input_shape;
  Index n_classes = 0;
  Index zeta = 1;
  std::vector<LayerSpec> layers;
  // Number of leading layers whose output is the embedding.
  Index embedding_end = 0;
  BatchNormConfig batchnorm;
};

// Ordered layer stack with value semantics (copies are deep).
class Network {
 public:
  // Builds the stack and initializes parameters from rng.
  Network(NetworkSpec spec, Rng& rng);
  // Builds the stack with zeroed parameters (for deserialization).
  explicit Network(NetworkSpec spec);

  Network(const Network& other);
  Network& operator=(const Network& other);
  Network(Network&&) noexcept = default;
  Network& operator=(Network&&) noexcept = default;
  ~Network() = default;

  const NetworkSpec& spec() const { return spec_; }
  std::size_t layer_count() const { return layers_.size(); }
  Layer& layer(std::size_t i) { return *layers_.at(i); }
  const Layer& layer(std::size_t i) const { return *layers_.at(i); }

  // Output shape after every layer, in order.
  std::vector<Shape> shape_trace() const;

  // Runs layers [0, stop). stop defaults to the whole stack.
  Batch forward(Batch inputs, Mode mode, std::size_t stop = SIZE_MAX);
  // Infer-mode forward; safe to call concurrently on a shared network.
  Batch infer(Batch inputs, std::size_t stop = SIZE_MAX) const;
  // Backpropagates through layers [0, from) given gradients of the output of
  // layer from-1. Must follow a train-mode forward over the same range.
  Batch backward(Batch grad_outputs, std::size_t from = SIZE_MAX);

  // Index one past the last layer producing logits (the softmax layer for
  // complete models; the whole stack for fragments).
  std::size_t logits_end() const;

  TensorD logits(const TensorD& input) const;

  std::vector<Parameter*> learnable_parameters();
  Index learnable_count() const;
  void zero_grad();

 private:
  void build(Rng* rng);

  NetworkSpec spec_;
  std::vector<std::unique_ptr<Layer>> layers_;
};

}  // namespace svkit::nn

#endif  // SVKIT_NN_NETWORK_HPP
