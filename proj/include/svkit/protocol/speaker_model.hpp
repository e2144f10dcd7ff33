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

#ifndef SVKIT_PROTOCOL_SPEAKER_MODEL_HPP
#define SVKIT_PROTOCOL_SPEAKER_MODEL_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "svkit/dsp/features.hpp"
#include "svkit/nn/network.hpp"
#include "svkit/zoo/models.hpp"

namespace svkit::protocol {

using nn::Index;

enum class ModelKind : std::uint8_t { one_shot_3d = 0, d_vector_avg = 1 };

const char* to_string(ModelKind kind);

struct SpeakerModel {
  std::string speaker_id;
  Eigen::VectorXd embedding;  // unit norm
  Index zeta = 1;
  ModelKind kind = ModelKind::d_vector_avg;

  friend bool operator==(const SpeakerModel& a, const SpeakerModel& b) {
    return a.speaker_id == b.speaker_id && a.zeta == b.zeta && a.kind == b.kind &&
           a.embedding.size() == b.embedding.size() && a.embedding == b.embedding;
  }
};

// Normalized mean of unit vectors; ConfigError on empty input or unequal
// lengths, NumericError when the mean vanishes.
Eigen::VectorXd average_unit_vectors(std::span<const Eigen::VectorXd> vectors);

// Stacks exactly zeta maps (zeta of the network) into one cube and embeds it
// once. ConfigError on a count mismatch or a non-3D network.
SpeakerModel enroll_one_shot(const nn::Network& network,
                             std::span<const dsp::Utterance> utterances);

// Splits the maps into consecutive zeta-sized groups (at most max_cubes,
// 0 = all complete groups), embeds each cube, averages and renormalizes.
SpeakerModel enroll_one_shot_averaged(const nn::Network& network,
                                      std::span<const dsp::Utterance> utterances,
                                      Index max_cubes = 0);

// Mean of the per-map embeddings, renormalized. ConfigError on empty input.
SpeakerModel enroll_dvector(const nn::Network& network,
                            std::span<const dsp::Utterance> utterances);

// Cosine score of two unit vectors. ConfigError unless both are unit norm
// (1e-9) and of equal length.
double score_trial(const SpeakerModel& model, const zoo::Embedding& test);
double cosine_score(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// Embedding of one test map: replicated into a zeta-cube for the 3D-CNN,
// fed directly to the baseline.
zoo::Embedding embed_test_utterance(const nn::Network& network, const dsp::Utterance& utt);

inline constexpr std::uint32_t kSpeakerModelVersion = 1;

// "SVSM", u32 version, u32 count, then per record: u32 length, the record
// (id, kind, zeta, dim, f64 values) and a CRC32 over the record bytes.
std::string serialize_speaker_models(const std::vector<SpeakerModel>& models);
std::vector<SpeakerModel> deserialize_speaker_models(std::string_view bytes);
void write_speaker_models(const std::filesystem::path& path,
                          const std::vector<SpeakerModel>& models);
std::vector<SpeakerModel> read_speaker_models(const std::filesystem::path& path);

}  // namespace svkit::protocol

#endif  // SVKIT_PROTOCOL_SPEAKER_MODEL_HPP
