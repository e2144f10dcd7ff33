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

#ifndef SVKIT_CORPUS_SLICING_HPP
#define SVKIT_CORPUS_SLICING_HPP

#include <vector>

#include "svkit/dsp/audio.hpp"
#include "svkit/corpus/manifest.hpp"
#include "svkit/dsp/features.hpp"
#include "svkit/dsp/vad.hpp"

namespace svkit::corpus {

struct SliceConfig {
  double duration_s = 0.8;
  double hop_s = 0.1;
};

Eigen::Index slice_samples(double seconds, int sample_rate);
// floor((n - duration) / hop) + 1, or 0 when the signal is too short.
Eigen::Index slice_count(Eigen::Index n_samples, int sample_rate,
                         const SliceConfig& config = {});

// Sliding windows of `duration_s` every `hop_s`. DimensionError when the
// signal is shorter than one window.
std::vector<dsp::AudioSignal> slice_utterances(const dsp::AudioSignal& signal,
                                               const SliceConfig& config = {});

struct ExtractConfig {
  dsp::VadConfig vad;
  SliceConfig slicing;
  // 0 keeps every slice.
  Eigen::Index max_slices_per_recording = 0;
};

// load -> VAD -> slice -> MFEC for one recording. Utterance ids are
// "<speaker>/<file stem>#<slice index>".
std::vector<dsp::Utterance> extract_utterances(const ManifestEntry& entry,
                                               const ExtractConfig& config = {});

}  // namespace svkit::corpus

#endif  // SVKIT_CORPUS_SLICING_HPP
