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

#include "svkit/corpus/slicing.hpp"

#include <cmath>
#include <cstdio>

#include "svkit/error.hpp"

namespace svkit::corpus {

Eigen::Index slice_samples(double seconds, int sample_rate) {
  return static_cast<Eigen::Index>(std::llround(seconds * sample_rate));
}

Eigen::Index slice_count(Eigen::Index n_samples, int sample_rate,
                         const SliceConfig& config) {
  const auto len = slice_samples(config.duration_s, sample_rate);
  const auto hop = slice_samples(config.hop_s, sample_rate);
  if (len < 1 || hop < 1) throw ConfigError("slice duration and hop must be positive");
  if (n_samples < len) return 0;
  return (n_samples - len) / hop + 1;
}

std::vector<dsp::AudioSignal> slice_utterances(const dsp::AudioSignal& signal,
                                               const SliceConfig& config) {
  const auto n = slice_count(signal.samples.size(), signal.sample_rate, config);
  if (n == 0) {
    throw DimensionError("slice_utterances: signal of " +
                         std::to_string(signal.samples.size()) +
                         " samples is shorter than one " +
                         std::to_string(config.duration_s) + " s window");
  }
  const auto len = slice_samples(config.duration_s, signal.sample_rate);
  const auto hop = slice_samples(config.hop_s, signal.sample_rate);
  std::vector<dsp::AudioSignal> out;
  out.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) {
    out.push_back({signal.samples.segment(k * hop, len), signal.sample_rate});
  }
  return out;
}

std::vector<dsp::Utterance> extract_utterances(const ManifestEntry& entry,
                                               const ExtractConfig& config) {
  const auto audio = dsp::load_wav(entry.path);
  const auto voiced = dsp::detect_voice(audio, config.vad);
  auto slices = slice_utterances(voiced, config.slicing);
  if (config.max_slices_per_recording > 0 &&
      static_cast<Eigen::Index>(slices.size()) > config.max_slices_per_recording) {
    slices.resize(static_cast<std::size_t>(config.max_slices_per_recording));
  }
  const dsp::MfecExtractor extractor;
  const std::string stem = entry.speaker_id + "/" + entry.path.stem().string();
  std::vector<dsp::Utterance> out;
  out.reserve(slices.size());
  for (std::size_t k = 0; k < slices.size(); ++k) {
    char id[16];
    std::snprintf(id, sizeof id, "#%02zu", k);
    out.push_back({entry.speaker_id, stem + id, extractor(slices[k])});
  }
  return out;
}

}  // namespace svkit::corpus
