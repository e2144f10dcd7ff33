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

#include "svkit/dsp/vad.hpp"

#include <algorithm>

#include "svkit/error.hpp"

namespace svkit::dsp {

namespace {

double median(std::vector<double> v) {
  const std::size_t n = v.size();
  std::sort(v.begin(), v.end());
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Eigen::Index frame_length(const AudioSignal& signal, const VadConfig& config) {
  if (config.frame_ms <= 0 || config.threshold_factor < 0.0) {
    throw ConfigError("vad: frame_ms must be > 0 and threshold_factor >= 0");
  }
  return Eigen::Index(signal.sample_rate) * config.frame_ms / 1000;
}

}  // namespace

std::vector<double> frame_energies(const Eigen::VectorXd& samples, Eigen::Index frame_len) {
  std::vector<double> out;
  for (Eigen::Index start = 0; start < samples.size(); start += frame_len) {
    const Eigen::Index n = std::min(frame_len, samples.size() - start);
    out.push_back(samples.segment(start, n).squaredNorm() / double(n));
  }
  return out;
}

std::vector<bool> voiced_frames(const AudioSignal& signal, const VadConfig& config) {
  const Eigen::Index len = frame_length(signal, config);
  if (len <= 0 || signal.size() < len) {
    throw DimensionError("vad: signal shorter than one " +
                         std::to_string(config.frame_ms) + " ms frame");
  }
  const std::vector<double> energy = frame_energies(signal.samples, len);
  std::vector<bool> keep(energy.size(), true);
  std::vector<std::size_t> alive(energy.size());
  for (std::size_t i = 0; i < alive.size(); ++i) alive[i] = i;

  while (!alive.empty()) {
    std::vector<double> e;
    e.reserve(alive.size());
    for (auto i : alive) e.push_back(energy[i]);
    const double threshold = config.threshold_factor * median(e);
    std::vector<std::size_t> next;
    for (auto i : alive) {
      if (energy[i] > threshold) {
        next.push_back(i);
      } else {
        keep[i] = false;
      }
    }
    if (next.size() == alive.size()) break;
    alive = std::move(next);
  }
  return keep;
}

AudioSignal detect_voice(const AudioSignal& signal, const VadConfig& config) {
  const auto keep = voiced_frames(signal, config);
  const Eigen::Index len = frame_length(signal, config);
  AudioSignal out;
  out.sample_rate = signal.sample_rate;
  Eigen::Index total = 0;
  for (std::size_t f = 0; f < keep.size(); ++f) {
    if (keep[f]) total += std::min(len, signal.size() - Eigen::Index(f) * len);
  }
  if (total == 0) throw NoSpeechError("vad: no voiced frames (all silence)");
  out.samples.resize(total);
  Eigen::Index pos = 0;
  for (std::size_t f = 0; f < keep.size(); ++f) {
    if (!keep[f]) continue;
    const Eigen::Index start = Eigen::Index(f) * len;
    const Eigen::Index n = std::min(len, signal.size() - start);
    out.samples.segment(pos, n) = signal.samples.segment(start, n);
    pos += n;
  }
  return out;
}

}  // namespace svkit::dsp
