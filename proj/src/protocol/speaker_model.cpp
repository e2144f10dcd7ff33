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

#include "svkit/protocol/speaker_model.hpp"

#include <cmath>

#include "svkit/error.hpp"
#include "svkit/io/binary.hpp"

namespace svkit::protocol {

const char* to_string(ModelKind kind) {
  return kind == ModelKind::one_shot_3d ? "one_shot_3d" : "d_vector_avg";
}

namespace {

constexpr double kUnitTolerance = 1e-9;

void require_3d(const nn::Network& network) {
  if (network.spec().architecture != nn::Architecture::cnn3d) {
    throw ConfigError("one-shot enrollment needs a 3D-CNN");
  }
}

void require_unit(const Eigen::VectorXd& v, const char* what) {
  if (!v.allFinite() || std::abs(v.norm() - 1.0) > kUnitTolerance) {
    throw ConfigError(std::string(what) + " is not unit-norm");
  }
}

}  // namespace

Eigen::VectorXd average_unit_vectors(std::span<const Eigen::VectorXd> vectors) {
  if (vectors.empty()) throw ConfigError("cannot average an empty set of embeddings");
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(vectors.front().size());
  for (const auto& v : vectors) {
    if (v.size() != sum.size()) throw ConfigError("embedding lengths differ");
    sum += v;
  }
  return zoo::l2_normalize(sum / static_cast<double>(vectors.size()));
}

SpeakerModel enroll_one_shot(const nn::Network& network,
                             std::span<const dsp::Utterance> utterances) {
  require_3d(network);
  const Index zeta = network.spec().zeta;
  if (static_cast<Index>(utterances.size()) != zeta) {
    throw ConfigError("one-shot enrollment needs exactly zeta=" + std::to_string(zeta) +
                      " utterances, got " + std::to_string(utterances.size()));
  }
  const auto cube = dsp::build_feature_cube(utterances);
  const auto e = zoo::embed(network, zoo::network_input(network, cube));
  return {cube.speaker_id, e.values, zeta, ModelKind::one_shot_3d};
}

SpeakerModel enroll_one_shot_averaged(const nn::Network& network,
                                      std::span<const dsp::Utterance> utterances,
                                      Index max_cubes) {
  require_3d(network);
  const Index zeta = network.spec().zeta;
  Index cubes = static_cast<Index>(utterances.size()) / zeta;
  if (cubes == 0) {
    throw ConfigError("one-shot enrollment needs at least zeta=" + std::to_string(zeta) +
                      " utterances, got " + std::to_string(utterances.size()));
  }
  if (max_cubes > 0) cubes = std::min(cubes, max_cubes);
  const auto z = static_cast<std::size_t>(zeta);
  if (cubes == 1) return enroll_one_shot(network, utterances.first(z));
  std::vector<Eigen::VectorXd> embeddings;
  std::string speaker;
  for (Index c = 0; c < cubes; ++c) {
    auto m = enroll_one_shot(network, utterances.subspan(static_cast<std::size_t>(c) * z, z));
    speaker = m.speaker_id;
    embeddings.push_back(std::move(m.embedding));
  }
  return {speaker, average_unit_vectors(embeddings), zeta, ModelKind::one_shot_3d};
}

zoo::Embedding embed_test_utterance(const nn::Network& network, const dsp::Utterance& utt) {
  auto e = zoo::embed(network, zoo::network_input(network, utt.map));
  e.speaker_id = utt.speaker_id;
  e.utterance_ids = {utt.utterance_id};
  return e;
}

SpeakerModel enroll_dvector(const nn::Network& network,
                            std::span<const dsp::Utterance> utterances) {
  if (utterances.empty()) throw ConfigError("d-vector enrollment needs at least one utterance");
  const std::string& speaker = utterances.front().speaker_id;
  std::vector<Eigen::VectorXd> embeddings;
  for (const auto& u : utterances) {
    if (u.speaker_id != speaker) {
      throw ConfigError("d-vector enrollment mixes speakers " + speaker + " and " + u.speaker_id);
    }
    embeddings.push_back(zoo::embed(network, zoo::network_input(network, u.map)).values);
  }
  return {speaker, average_unit_vectors(embeddings), network.spec().zeta,
          ModelKind::d_vector_avg};
}

double cosine_score(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) {
    throw ConfigError("score: embedding lengths differ (" + std::to_string(a.size()) + " vs " +
                      std::to_string(b.size()) + ")");
  }
  require_unit(a, "speaker model");
  require_unit(b, "test embedding");
  return a.dot(b);
}

double score_trial(const SpeakerModel& model, const zoo::Embedding& test) {
  return cosine_score(model.embedding, test.values);
}

namespace {
constexpr std::string_view kMagic = "SVSM";
}

std::string serialize_speaker_models(const std::vector<SpeakerModel>& models) {
  io::ByteWriter w;
  w.bytes(kMagic);
  w.u32(kSpeakerModelVersion);
  w.u32(static_cast<std::uint32_t>(models.size()));
  for (const auto& m : models) {
    io::ByteWriter r;
    r.str(m.speaker_id);
    r.u8(static_cast<std::uint8_t>(m.kind));
    r.u64(static_cast<std::uint64_t>(m.zeta));
    r.u32(static_cast<std::uint32_t>(m.embedding.size()));
    for (Index i = 0; i < m.embedding.size(); ++i) r.f64(m.embedding[i]);
    w.u32(static_cast<std::uint32_t>(r.size()));
    w.bytes(r.buffer());
    w.u32(io::crc32(r.buffer()));
  }
  return w.take();
}

std::vector<SpeakerModel> deserialize_speaker_models(std::string_view bytes) {
  io::ByteReader r(bytes, "speaker models");
  r.require(kMagic.size());
  if (r.bytes(kMagic.size()) != kMagic) throw FormatError("speaker models: bad magic");
  const std::uint32_t version = r.u32();
  if (version != kSpeakerModelVersion) {
    throw VersionError("speaker models: unsupported version " + std::to_string(version));
  }
  const std::uint32_t count = r.u32();
  std::vector<SpeakerModel> out;
  for (std::uint32_t k = 0; k < count; ++k) {
    const std::string_view record = r.bytes(r.u32());
    if (r.u32() != io::crc32(record)) {
      throw ChecksumError("speaker models: CRC32 mismatch in record " + std::to_string(k));
    }
    io::ByteReader rr(record, "speaker model record");
    SpeakerModel m;
    m.speaker_id = rr.str();
    const std::uint8_t kind = rr.u8();
    m.zeta = static_cast<Index>(rr.u64());
    const std::uint32_t dim = rr.u32();
    if (rr.remaining() != std::size_t{dim} * 8) {
      throw FormatError("speaker models: record " + std::to_string(k) + " has the wrong length");
    }
    m.embedding.resize(dim);
    for (std::uint32_t i = 0; i < dim; ++i) m.embedding[i] = rr.f64();
    if (kind > static_cast<std::uint8_t>(ModelKind::d_vector_avg)) {
      throw FormatError("speaker models: unknown kind " + std::to_string(kind));
    }
    m.kind = static_cast<ModelKind>(kind);
    out.push_back(std::move(m));
  }
  if (r.remaining() != 0) throw FormatError("speaker models: trailing bytes");
  return out;
}

void write_speaker_models(const std::filesystem::path& path,
                          const std::vector<SpeakerModel>& models) {
  io::write_file(path, serialize_speaker_models(models));
}

std::vector<SpeakerModel> read_speaker_models(const std::filesystem::path& path) {
  return deserialize_speaker_models(io::read_file(path));
}

}  // namespace svkit::protocol
