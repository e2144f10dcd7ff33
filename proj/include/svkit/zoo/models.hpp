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

#ifndef SVKIT_ZOO_MODELS_HPP
#define SVKIT_ZOO_MODELS_HPP

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "svkit/dsp/features.hpp"
#include "svkit/nn/network.hpp"

namespace svkit::zoo {

using nn::Index;

// How the eight depth-3 convolutions treat the utterance axis. `valid`
// shrinks depth by 2 per conv (needs zeta >= 17); `same` zero-pads one
// slice on each end. `automatic` picks valid whenever it is possible.
enum class DepthMode { automatic, valid, same };

const char* to_string(DepthMode mode);
DepthMode parse_depth_mode(const std::string& text);

inline constexpr Index kEmbeddingDim = 128;
inline constexpr Index kMinValidZeta = 17;

bool pads_depth(Index zeta, DepthMode mode);

struct Cnn3dOptions {
  DepthMode depth = DepthMode::automatic;
  // Channels of conv1, conv2, conv3, conv4 (both convs of a block share it).
  std::array<Index, 4> channels{16, 32, 64, 128};
  Index embedding_dim = kEmbeddingDim;
  Index frames = dsp::kMapFrames;
  Index bands = dsp::kMelBands;
  nn::BatchNormConfig batchnorm;
};

// conv -> batchnorm -> PReLU for each of the eight convs, frequency-only max
// pooling after conv1_2 and conv2_2, fc5 -> PReLU (the embedding), then a
// dense n_classes head and softmax.
nn::NetworkSpec cnn3d_spec(Index zeta, Index n_classes, const Cnn3dOptions& options = {});
nn::Network build_3dcnn(Index zeta, Index n_classes, nn::Rng& rng,
                        const Cnn3dOptions& options = {});

struct LcnOptions {
  Index patch = 8;
  Index units_per_patch = 16;
  Index hidden = 256;
  Index hidden_layers = 3;
  Index frames = dsp::kMapFrames;
  Index bands = dsp::kMelBands;
};

// Locally-connected layer over the stacked-frame map, PReLU, then
// `hidden_layers` dense+PReLU blocks; the last PReLU output is the d-vector.
nn::NetworkSpec lcn_spec(Index n_classes, const LcnOptions& options = {});
nn::Network build_lcn_baseline(Index n_classes, nn::Rng& rng,
                               const LcnOptions& options = {});

struct Embedding {
  Eigen::VectorXd values;
  std::string speaker_id;
  std::vector<std::string> utterance_ids;
  bool normalized = false;
};

// Unit L2 vector; NumericError on zero or non-finite input.
Eigen::VectorXd l2_normalize(const Eigen::VectorXd& v);
bool is_unit_norm(const Eigen::VectorXd& v, double tol = 1e-12);

Index embedding_dim(const nn::Network& network);

// Raw (unnormalized) output of the embedding layer.
Eigen::VectorXd embedding_activations(const nn::Network& network,
                                      const nn::TensorD& input);
Embedding embed(const nn::Network& network, const nn::TensorD& input);

// Input tensor for a network: the cube itself for the 3D-CNN (zeta must
// match), each map for the baseline. A single map fed to the 3D-CNN is
// replicated zeta times.
nn::TensorD network_input(const nn::Network& network, const dsp::FeatureCube& cube);
nn::TensorD network_input(const nn::Network& network, const dsp::FeatureMap& map);

// Infer-mode logits (pre-softmax scores), length n_classes.
nn::TensorD forward(const nn::Network& network, const nn::TensorD& input);

// Human-readable layer table: name, kernel, stride, output extent,
// parameter count.
std::string model_summary(const nn::Network& network);

}  // namespace svkit::zoo

#endif  // SVKIT_ZOO_MODELS_HPP
