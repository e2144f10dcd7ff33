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

#ifndef SVKIT_PROTOCOL_EVALUATION_HPP
#define SVKIT_PROTOCOL_EVALUATION_HPP

#include <vector>

#include "svkit/corpus/dataset.hpp"
#include "svkit/protocol/metrics.hpp"
#include "svkit/protocol/speaker_model.hpp"

namespace svkit::protocol {

enum class EnrollMode { one_shot, d_vector };

struct EnrollConfig {
  EnrollMode mode = EnrollMode::one_shot;
  // One-shot only: number of zeta-cubes averaged per speaker (0 = all).
  Index max_cubes = 1;
};

std::vector<SpeakerModel> enroll_speakers(const nn::Network& network,
                                          const std::vector<corpus::SpeakerUtterances>& speakers,
                                          const EnrollConfig& config = {});

struct EvaluationResult {
  ScoreSet scores;
  RocSummary roc;
};

// One-vs-all: every test utterance is embedded once and scored against
// every model; the trial is genuine when the model's id is the utterance's
// speaker. ConfigError when an utterance's speaker has no model or a model's
// zeta differs from the network's.
EvaluationResult run_evaluation(const std::vector<SpeakerModel>& models,
                                const std::vector<dsp::Utterance>& tests,
                                const nn::Network& network);

}  // namespace svkit::protocol

#endif  // SVKIT_PROTOCOL_EVALUATION_HPP
