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

#ifndef SVKIT_DSP_VAD_HPP
#define SVKIT_DSP_VAD_HPP

#include <vector>

#include "svkit/dsp/audio.hpp"

namespace svkit::dsp {

struct VadConfig {
  int frame_ms = 20;
  double threshold_factor = 0.5;
};

// Mean-square energy of consecutive non-overlapping frames; the last frame
// may be partial.
std::vector<double> frame_energies(const Eigen::VectorXd& samples, Eigen::Index frame_len);

// Per-frame keep flags over the original signal. A frame survives when its
// energy exceeds threshold_factor x the median energy of the surviving
// frames; the rule is reapplied until no further frame drops, so the result
// is a fixed point (detect_voice is idempotent).
std::vector<bool> voiced_frames(const AudioSignal& signal, const VadConfig& config = {});

// Concatenation of the voiced frames in order. Throws NoSpeechError when no
// frame survives.
AudioSignal detect_voice(const AudioSignal& signal, const VadConfig& config = {});

}  // namespace svkit::dsp

#endif  // SVKIT_DSP_VAD_HPP
