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

#ifndef SVKIT_DSP_FEATURES_HPP
#define SVKIT_DSP_FEATURES_HPP

#include <Eigen/Core>

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "svkit/dsp/audio.hpp"
#include "svkit/nn/tensor.hpp"

namespace svkit::dsp {

using Index = Eigen::Index;
using RowMatrixXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr Index kMapFrames = 80;  // 0.8 s at a 10 ms hop
inline constexpr Index kMelBands = 40;
inline constexpr Index kFftSize = 512;
inline constexpr double kLogFloor = 1e-10;

// One utterance's log mel energies, kMapFrames x kMelBands (time x freq).
using FeatureMap = RowMatrixXd;

struct FramingConfig {
  int window_ms = 20;
  int hop_ms = 10;
  // Reflect-pad one hop at the tail so 0.8 s yields 80 frames instead of 79.
  bool pad_tail = true;
};

// Hamming-windowed overlapping frames, one per row.
RowMatrixXd frame_signal(const AudioSignal& signal, const FramingConfig& config = {});

double hz_to_mel(double hz);
double mel_to_hz(double mel);

struct FilterBank {
  RowMatrixXd weights;          // n_filters x (n_fft / 2 + 1), nonnegative
  Eigen::VectorXd center_freqs; // Hz, ascending
  int sample_rate = kSampleRate;
  Index n_fft = kFftSize;

  Index n_filters() const { return weights.rows(); }
};

// Triangular filters whose centers are equally spaced on the mel scale
// between f_min and f_max (f_max <= 0 selects sample_rate / 2).
FilterBank mel_filterbank(int sample_rate = kSampleRate, Index n_fft = kFftSize,
                          Index n_filters = kMelBands, double f_min = 0.0,
                          double f_max = -1.0);

// |FFT(frame, n_fft)|^2 / n_fft, bins 0..n_fft/2, one row per frame.
RowMatrixXd power_spectrum(const RowMatrixXd& frames, Index n_fft);

// log(max(filterbank energy, log_floor)) for any number of frames.
RowMatrixXd log_mel_energies(const RowMatrixXd& frames, const FilterBank& bank,
                             double log_floor = kLogFloor);

// Same as log_mel_energies but enforces the kMapFrames-row contract.
FeatureMap mfec(const RowMatrixXd& frames, const FilterBank& bank,
                double log_floor = kLogFloor);

// Framing + MFEC for a single 0.8 s, 16 kHz segment.
class MfecExtractor {
 public:
  explicit MfecExtractor(FramingConfig framing = {});
  FeatureMap operator()(const AudioSignal& segment) const;
  const FilterBank& filterbank() const { return bank_; }

 private:
  FramingConfig framing_;
  FilterBank bank_;
};

struct Utterance {
  std::string speaker_id;
  std::string utterance_id;
  FeatureMap map;
};

// zeta maps of one speaker stacked along depth. data is [zeta, 80, 40, 1].
struct FeatureCube {
  std::string speaker_id;
  std::vector<std::string> utterance_ids;
  nn::TensorD data;

  Index zeta() const { return data.dim(0); }
  FeatureMap slice(Index depth) const;
};

FeatureCube build_feature_cube(std::span<const Utterance> utterances);
FeatureCube replicate_for_eval(const Utterance& utterance, Index zeta);

// [80, 40] tensor view of a map, the input of the locally-connected baseline.
nn::TensorD map_tensor(const FeatureMap& map);

// Feature dump: "MFEC", u32 version, u32 rows, u32 cols, row-major f64 LE.
void write_feature_dump(const std::filesystem::path& path, const FeatureMap& map);
FeatureMap read_feature_dump(const std::filesystem::path& path);

}  // namespace svkit::dsp

#endif  // SVKIT_DSP_FEATURES_HPP
