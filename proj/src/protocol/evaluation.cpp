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

#include "svkit/protocol/evaluation.hpp"

#include <set>

#include "svkit/error.hpp"

namespace svkit::protocol {

std::vector<SpeakerModel> enroll_speakers(const nn::Network& network,
                                          const std::vector<corpus::SpeakerUtterances>& speakers,
                                          const EnrollConfig& config) {
  std::vector<SpeakerModel> models;
  for (const auto& s : speakers) {
    SpeakerModel m = config.mode == EnrollMode::one_shot
                         ? enroll_one_shot_averaged(network, s.utterances, config.max_cubes)
                         : enroll_dvector(network, s.utterances);
    m.speaker_id = s.speaker_id;
    models.push_back(std::move(m));
  }
  return models;
}

EvaluationResult run_evaluation(const std::vector<SpeakerModel>& models,
                                const std::vector<dsp::Utterance>& tests,
                                const nn::Network& network) {
  std::set<std::string> ids;
  for (const auto& m : models) {
    if (!ids.insert(m.speaker_id).second) {
      throw ConfigError("duplicate speaker model " + m.speaker_id);
    }
    if (m.kind == ModelKind::one_shot_3d && m.zeta != network.spec().zeta) {
      throw ConfigError("speaker model " + m.speaker_id + " was enrolled with zeta=" +
                        std::to_string(m.zeta) + " but the network uses zeta=" +
                        std::to_string(network.spec().zeta));
    }
  }
  for (const auto& t : tests) {
    if (!ids.count(t.speaker_id)) {
      throw ConfigError("no speaker model for claimed identity " + t.speaker_id);
    }
  }
  EvaluationResult result;
  result.scores.reserve(models.size() * tests.size());
  for (const auto& t : tests) {
    const auto e = embed_test_utterance(network, t);
    for (const auto& m : models) {
      const auto label = m.speaker_id == t.speaker_id ? TrialLabel::genuine : TrialLabel::impostor;
      result.scores.push_back({{t.utterance_id, m.speaker_id, label}, score_trial(m, e)});
    }
  }
  result.roc = compute_roc(result.scores);
  return result;
}

}  // namespace svkit::protocol
