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

#include "svkit/nn/network.hpp"

#include <algorithm>

namespace svkit::nn {

const char* to_string(Architecture arch) {
  switch (arch) {
    case Architecture::fragment: return "fragment";
    case Architecture::cnn3d: return "cnn3d";
    case Architecture::lcn_dvector: return "lcn_dvector";
  }
  return "unknown";
}

Network::Network(NetworkSpec spec, Rng& rng) : spec_(std::move(spec)) {
  build(&rng);
}

Network::Network(NetworkSpec spec) : spec_(std::move(spec)) { build(nullptr); }

Network::Network(const Network& other) : spec_(other.spec_) {
  layers_.reserve(other.layers_.size());
  for (const auto& l : other.layers_) layers_.push_back(l->clone());
}

Network& Network::operator=(const Network& other) {
  if (this != &other) {
    Network copy(other);
    *this = std::move(copy);
  }
  return *this;
}

void Network::build(Rng* rng) {
  if (spec_.input_shape.empty()) {
    throw ConfigError("network: input shape must be set");
  }
  Shape shape = spec_.input_shape;
  for (const auto& ls : spec_.layers) {
    layers_.push_back(make_layer(ls, shape, rng, spec_.batchnorm));
    shape = layers_.back()->output_shape();
  }
  if (spec_.embedding_end < 0 ||
      spec_.embedding_end > static_cast<Index>(layers_.size())) {
    throw ConfigError("network: embedding_end out of range");
  }
}

std::vector<Shape> Network::shape_trace() const {
  std::vector<Shape> out;
  for (const auto& l : layers_) out.push_back(l->output_shape());
  return out;
}

Batch Network::forward(Batch inputs, Mode mode, std::size_t stop) {
  stop = std::min(stop, layers_.size());
  for (std::size_t i = 0; i < stop; ++i) {
    inputs = layers_[i]->forward(inputs, mode);
  }
  return inputs;
}

Batch Network::infer(Batch inputs, std::size_t stop) const {
  stop = std::min(stop, layers_.size());
  for (std::size_t i = 0; i < stop; ++i) inputs = layers_[i]->infer(inputs);
  return inputs;
}

Batch Network::backward(Batch grad_outputs, std::size_t from) {
  from = std::min(from, layers_.size());
  for (std::size_t i = from; i-- > 0;) {
    grad_outputs = layers_[i]->backward(grad_outputs);
  }
  return grad_outputs;
}

std::size_t Network::logits_end() const {
  if (!layers_.empty() && layers_.back()->spec().kind == LayerKind::softmax) {
    return layers_.size() - 1;
  }
  return layers_.size();
}

TensorD Network::logits(const TensorD& input) const {
  return infer(Batch{input}, logits_end()).front();
}

std::vector<Parameter*> Network::learnable_parameters() {
  std::vector<Parameter*> out;
  for (auto& l : layers_) {
    for (auto& p : l->parameters()) {
      if (p.learnable) out.push_back(&p);
    }
  }
  return out;
}

Index Network::learnable_count() const {
  Index n = 0;
  for (const auto& l : layers_) {
    for (const auto& p : l->parameters()) {
      if (p.learnable) n += p.value.size();
    }
  }
  return n;
}

void Network::zero_grad() {
  for (auto& l : layers_) l->zero_grad();
}

}  // namespace svkit::nn
