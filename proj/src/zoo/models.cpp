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

#include "svkit/zoo/models.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace svkit::zoo {

using nn::Extent3;
using nn::LayerKind;
using nn::LayerSpec;
using nn::NetworkSpec;

const char* to_string(DepthMode mode) {
  switch (mode) {
    case DepthMode::automatic: return "auto";
    case DepthMode::valid: return "valid";
    case DepthMode::same: return "same";
  }
  return "unknown";
}

DepthMode parse_depth_mode(const std::string& text) {
  if (text == "auto") return DepthMode::automatic;
  if (text == "valid") return DepthMode::valid;
  if (text == "same") return DepthMode::same;
  throw ConfigError("depth mode must be auto, valid or same, got '" + text + "'");
}

bool pads_depth(Index zeta, DepthMode mode) {
  switch (mode) {
    case DepthMode::valid:
      if (zeta < kMinValidZeta) {
        throw ConfigError("valid depth convolution needs zeta >= " +
                          std::to_string(kMinValidZeta) + ", got " +
                          std::to_string(zeta));
      }
      return false;
    case DepthMode::same: return true;
    case DepthMode::automatic: return zeta < kMinValidZeta;
  }
  return true;
}

namespace {

void require_classes(Index n_classes) {
  if (n_classes < 2) {
    throw ConfigError("n_classes must be >= 2, got " + std::to_string(n_classes));
  }
}

LayerSpec conv(std::string name, Extent3 kernel, Extent3 stride, Index units,
               bool pad) {
  LayerSpec s;
  s.kind = LayerKind::conv3d;
  s.name = std::move(name);
  s.kernel = kernel;
  s.stride = stride;
  s.units = units;
  s.pad_depth = pad;
  return s;
}

LayerSpec simple(LayerKind kind, std::string name, Index units = 0) {
  LayerSpec s;
  s.kind = kind;
  s.name = std::move(name);
  s.units = units;
  return s;
}

void conv_block(std::vector<LayerSpec>& layers, const std::string& name,
                Extent3 kernel, Extent3 stride, Index units, bool pad) {
  layers.push_back(conv(name, kernel, stride, units, pad));
  layers.push_back(simple(LayerKind::batchnorm, name + "_bn"));
  layers.push_back(simple(LayerKind::prelu, name + "_prelu"));
}

}  // namespace

NetworkSpec cnn3d_spec(Index zeta, Index n_classes, const Cnn3dOptions& options) {
  if (zeta < 1) throw ConfigError("zeta must be >= 1, got " + std::to_string(zeta));
  require_classes(n_classes);
  const bool pad = pads_depth(zeta, options.depth);
  const auto& ch = options.channels;
  const Extent3 unit{1, 1, 1};
  const Extent3 time2{1, 2, 1};

  NetworkSpec spec;
  spec.architecture = nn::Architecture::cnn3d;
  spec.input_shape = {zeta, options.frames, options.bands, 1};
  spec.n_classes = n_classes;
  spec.zeta = zeta;
  spec.batchnorm = options.batchnorm;
  auto& L = spec.layers;
  conv_block(L, "conv1_1", {3, 1, 5}, unit, ch[0], pad);
  conv_block(L, "conv1_2", {3, 9, 1}, time2, ch[0], pad);
  L.push_back(simple(LayerKind::maxpool_freq, "pool1"));
  conv_block(L, "conv2_1", {3, 1, 4}, unit, ch[1], pad);
  conv_block(L, "conv2_2", {3, 8, 1}, time2, ch[1], pad);
  L.push_back(simple(LayerKind::maxpool_freq, "pool2"));
  conv_block(L, "conv3_1", {3, 1, 3}, unit, ch[2], pad);
  conv_block(L, "conv3_2", {3, 7, 1}, unit, ch[2], pad);
  conv_block(L, "conv4_1", {3, 1, 3}, unit, ch[3], pad);
  conv_block(L, "conv4_2", {3, 7, 1}, unit, ch[3], pad);
  L.push_back(simple(LayerKind::fully_connected, "fc5", options.embedding_dim));
  L.push_back(simple(LayerKind::prelu, "fc5_prelu"));
  spec.embedding_end = static_cast<Index>(L.size());
  L.push_back(simple(LayerKind::fully_connected, "fc_out", n_classes));
  L.push_back(simple(LayerKind::softmax, "softmax"));
  return spec;
}

nn::Network build_3dcnn(Index zeta, Index n_classes, nn::Rng& rng,
                        const Cnn3dOptions& options) {
  return nn::Network(cnn3d_spec(zeta, n_classes, options), rng);
}

NetworkSpec lcn_spec(Index n_classes, const LcnOptions& options) {
  require_classes(n_classes);
  if (options.hidden_layers < 1) throw ConfigError("lcn: hidden_layers must be >= 1");
  NetworkSpec spec;
  spec.architecture = nn::Architecture::lcn_dvector;
  spec.input_shape = {options.frames, options.bands};
  spec.n_classes = n_classes;
  spec.zeta = 1;
  auto& L = spec.layers;
  LayerSpec lc = simple(LayerKind::locally_connected, "lc1", options.units_per_patch);
  lc.patch = options.patch;
  L.push_back(lc);
  L.push_back(simple(LayerKind::prelu, "lc1_prelu"));
  for (Index i = 1; i <= options.hidden_layers; ++i) {
    const std::string name = "fc" + std::to_string(i);
    L.push_back(simple(LayerKind::fully_connected, name, options.hidden));
    L.push_back(simple(LayerKind::prelu, name + "_prelu"));
  }
  spec.embedding_end = static_cast<Index>(L.size());
  L.push_back(simple(LayerKind::fully_connected, "fc_out", n_classes));
  L.push_back(simple(LayerKind::softmax, "softmax"));
  return spec;
}

nn::Network build_lcn_baseline(Index n_classes, nn::Rng& rng, const LcnOptions& options) {
  return nn::Network(lcn_spec(n_classes, options), rng);
}

Eigen::VectorXd l2_normalize(const Eigen::VectorXd& v) {
  if (!v.allFinite()) throw NumericError("embedding has non-finite entries");
  const double n = v.norm();
  if (n == 0.0) throw NumericError("cannot normalize a zero embedding");
  return v / n;
}

bool is_unit_norm(const Eigen::VectorXd& v, double tol) {
  return std::abs(v.norm() - 1.0) <= tol;
}

Index embedding_dim(const nn::Network& network) {
  const auto end = static_cast<std::size_t>(network.spec().embedding_end);
  if (end == 0) throw ConfigError("network has no embedding layer");
  return nn::shape_size(network.layer(end - 1).output_shape());
}

Eigen::VectorXd embedding_activations(const nn::Network& network,
                                      const nn::TensorD& input) {
  const auto end = static_cast<std::size_t>(network.spec().embedding_end);
  if (end == 0) throw ConfigError("network has no embedding layer");
  return network.infer(nn::Batch{input}, end).front().values();
}

Embedding embed(const nn::Network& network, const nn::TensorD& input) {
  Embedding e;
  e.values = l2_normalize(embedding_activations(network, input));
  e.normalized = true;
  return e;
}

namespace {

nn::TensorD map_input(const dsp::FeatureMap& map, const nn::Shape& shape) {
  if (shape.size() != 2 || map.rows() != shape[0] || map.cols() != shape[1]) {
    throw DimensionError("feature map " + std::to_string(map.rows()) + "x" +
                         std::to_string(map.cols()) + " does not fit input " +
                         nn::shape_string(shape));
  }
  nn::TensorD t(shape);
  t.as_matrix(shape[0], shape[1]) = map;
  return t;
}

}  // namespace

nn::TensorD network_input(const nn::Network& network, const dsp::FeatureCube& cube) {
  const auto& spec = network.spec();
  if (spec.architecture == nn::Architecture::lcn_dvector) {
    throw ConfigError("the d-vector baseline takes single maps, not cubes");
  }
  if (cube.data.shape() != spec.input_shape) {
    throw ConfigError("cube " + nn::shape_string(cube.data.shape()) +
                      " does not match network input " +
                      nn::shape_string(spec.input_shape) +
                      " (zeta must equal the training zeta)");
  }
  return cube.data;
}

nn::TensorD network_input(const nn::Network& network, const dsp::FeatureMap& map) {
  const auto& shape = network.spec().input_shape;
  if (shape.size() == 2) return map_input(map, shape);
  if (shape.size() != 4 || shape[3] != 1) {
    throw DimensionError("network input " + nn::shape_string(shape) +
                         " is not a map or map cube");
  }
  const nn::TensorD one = map_input(map, {shape[1], shape[2]});
  nn::TensorD t(shape);
  for (Index d = 0; d < shape[0]; ++d) {
    t.values().segment(d * one.size(), one.size()) = one.values();
  }
  return t;
}

nn::TensorD forward(const nn::Network& network, const nn::TensorD& input) {
  return network.logits(input);
}

std::string model_summary(const nn::Network& network) {
  const auto& spec = network.spec();
  std::ostringstream out;
  out << "architecture: " << nn::to_string(spec.architecture)
      << "  zeta: " << spec.zeta << "  classes: " << spec.n_classes << "\n";
  out << "input: " << nn::shape_string(spec.input_shape) << "\n";
  char line[256];
  std::snprintf(line, sizeof line, "%-16s %-18s %-10s %-10s %-20s %12s\n", "layer",
                "kind", "kernel", "stride", "output", "params");
  out << line;
  Index total = 0;
  for (std::size_t i = 0; i < network.layer_count(); ++i) {
    const auto& l = network.layer(i);
    const auto& s = l.spec();
    std::string kernel = "-", stride = "-";
    if (s.kind == LayerKind::conv3d) {
      kernel = std::to_string(s.kernel.depth) + "x" + std::to_string(s.kernel.height) +
               "x" + std::to_string(s.kernel.width);
      stride = std::to_string(s.stride.depth) + "x" + std::to_string(s.stride.height) +
               "x" + std::to_string(s.stride.width);
    } else if (s.kind == LayerKind::maxpool_freq) {
      kernel = "1x1x2";
      stride = "1x1x2";
    } else if (s.kind == LayerKind::locally_connected) {
      kernel = std::to_string(s.patch) + "x" + std::to_string(s.patch);
      stride = kernel;
    }
    Index params = 0;
    for (const auto& p : l.parameters()) {
      if (p.learnable) params += p.value.size();
    }
    total += params;
    std::snprintf(line, sizeof line, "%-16s %-18s %-10s %-10s %-20s %12lld\n",
                  s.name.c_str(), nn::to_string(s.kind), kernel.c_str(),
                  stride.c_str(), nn::shape_string(l.output_shape()).c_str(),
                  static_cast<long long>(params));
    out << line;
  }
  out << "embedding: output of layer " << spec.embedding_end << " ("
      << embedding_dim(network) << " values)\n";
  out << "learnable parameters: " << total << "\n";
  return out.str();
}

}  // namespace svkit::zoo
