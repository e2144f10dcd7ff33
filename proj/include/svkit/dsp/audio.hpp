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

#ifndef SVKIT_DSP_AUDIO_HPP
#define SVKIT_DSP_AUDIO_HPP

#include <Eigen/Core>

#include <filesystem>
#include <string>
#include <string_view>

namespace svkit::dsp {

inline constexpr int kSampleRate = 16000;

// Mono audio, samples in [-1, 1].
struct AudioSignal {
  Eigen::VectorXd samples;
  int sample_rate = kSampleRate;

  Eigen::Index size() const { return samples.size(); }
  double duration() const { return double(samples.size()) / sample_rate; }
};

// Decodes a RIFF/WAVE byte buffer. Accepts 16-bit integer PCM and 32-bit
// IEEE float (plain or WAVE_FORMAT_EXTENSIBLE); multi-channel input is
// averaged to mono.
//   FormatError              malformed RIFF structure
//   UnsupportedEncodingError any other sample encoding
//   EmptyPayloadError        data chunk with no frames
AudioSignal parse_wav(std::string_view bytes);
AudioSignal load_wav(const std::filesystem::path& path);

// 16-bit mono PCM.
std::string encode_wav(const AudioSignal& signal);
void write_wav(const std::filesystem::path& path, const AudioSignal& signal);

}  // namespace svkit::dsp

#endif  // SVKIT_DSP_AUDIO_HPP
