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

#ifndef SVKIT_PROTOCOL_TRAINING_HPP
#define SVKIT_PROTOCOL_TRAINING_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "svkit/corpus/dataset.hpp"
#include "svkit/nn/network.hpp"
#include "svkit/zoo/checkpoint.hpp"

namespace svkit::protocol {

using nn::Index;

struct TrainConfig {
  double learning_rate = 0.01;
  double momentum = 0.9;
  Index batch_size = 8;
  int epochs = 20;
  std::uint64_t seed = 0;
};

struct EpochStats {
  double loss = 0.0;      // mean cross-entropy over the epoch's examples
  double accuracy = 0.0;  // train-mode top-1 accuracy
  Index examples = 0;
};

struct TrainResult {
  zoo::Checkpoint checkpoint;
  std::vector<EpochStats> history;
};

using EpochCallback = std::function<void(int epoch, const EpochStats& stats)>;

// Softmax cross-entropy over speaker labels (index into `speakers`) with
// momentum SGD. Each 3D-CNN example is a cube of zeta distinct maps of one
// speaker: every epoch reshuffles each speaker's maps and cuts them into
// floor(n / zeta) cubes. Baseline examples are single maps. ConfigError when
// the network's class count differs from the speaker count or a speaker has
// fewer than zeta maps; NumericError on a non-finite loss.
TrainResult train_development(nn::Network network,
                              const std::vector<corpus::SpeakerUtterances>& speakers,
                              const TrainConfig& config, const EpochCallback& on_epoch = {});

}  // namespace svkit::protocol

#endif  // SVKIT_PROTOCOL_TRAINING_HPP
