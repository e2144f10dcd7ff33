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

#ifndef SVKIT_CORPUS_SYNTH_HPP
#define SVKIT_CORPUS_SYNTH_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "svkit/corpus/manifest.hpp"
#include "svkit/dsp/audio.hpp"
#include "svkit/nn/rng.hpp"

namespace svkit::corpus {

struct SynthSpeakerParams {
  std::array<double, 3> formants{};    // Hz, ascending
  std::array<double, 3> bandwidths{};  // Hz
  double pitch_hz = 120.0;
  double noise_mix = 0.1;  // share of noise in the excitation, [0, 1]
};

SynthSpeakerParams synth_speaker_params(std::uint64_t seed, std::size_t speaker_index);

struct SynthConfig {
  double voiced_seconds = 1.9;  // total phrase time per recording
  double word_min_s = 0.25;
  double word_max_s = 0.55;
  double gap_min_s = 0.06;
  double gap_max_s = 0.20;
  double edge_silence_s = 0.15;
  double peak = 0.5;
  // Per-recording session variability: formants and pitch are scaled by
  // factors in [1 - jitter, 1 + jitter] and a first-order channel
  // y[n] = x[n] - a x[n-1] with |a| <= channel_tilt is applied.
  double session_jitter = 0.08;
  double channel_tilt = 0.6;
  // Speakers [0, n) are tagged development, the rest auto. -1 means 2/3 of
  // the speakers, rounded down.
  int n_development = -1;
};

// Pulse train at the (slowly drifting) pitch mixed with white noise, passed
// through a cascade of three two-pole resonators and a session channel, then
// gated by a word/gap envelope whose gaps are exact zeros.
dsp::AudioSignal synthesize_utterance(const SynthSpeakerParams& speaker, nn::Rng& rng,
                                      const SynthConfig& config = {});

// Writes <out>/spkNNN/uttNN.wav (16 kHz mono PCM16) and <out>/manifest.csv;
// returns the manifest entries. A pure function of (seed, n_speakers,
// utterances_per_speaker, config). IoError when out_dir is unwritable.
std::vector<ManifestEntry> make_synthetic_corpus(int n_speakers, int utterances_per_speaker,
                                                 std::uint64_t seed,
                                                 const std::filesystem::path& out_dir,
                                                 const SynthConfig& config = {});

inline constexpr const char* kManifestFileName = "manifest.csv";

}  // namespace svkit::corpus

#endif  // SVKIT_CORPUS_SYNTH_HPP
