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

#include "svkit/dsp/features.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <numbers>

#include "svkit/error.hpp"
#include "svkit/io/binary.hpp"

namespace svkit::dsp {

RowMatrixXd frame_signal(const AudioSignal& signal, const FramingConfig& config) {
  if (config.window_ms <= 0 || config.hop_ms <= 0) {
    throw ConfigError("framing: window and hop must be positive");
  }
  const Index win = Index(signal.sample_rate) * config.window_ms / 1000;
  const Index hop = Index(signal.sample_rate) * config.hop_ms / 1000;
  const Index len = signal.size();

  Eigen::VectorXd padded = signal.samples;
  if (config.pad_tail && len > hop) {
    // reflect without repeating the edge sample: x[L-2], x[L-3], ...
    padded.conservativeResize(len + hop);
    for (Index i = 0; i < hop; ++i) padded[len + i] = signal.samples[len - 2 - i];
  }
  if (padded.size() < win) {
    throw DimensionError("framing: signal of " + std::to_string(len) +
                         " samples is shorter than one " +
                         std::to_string(config.window_ms) + " ms window");
  }
  const Index n = (padded.size() - win) / hop + 1;

  Eigen::VectorXd window(win);
  for (Index i = 0; i < win; ++i) {
    window[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * double(i) / double(win - 1));
  }
  RowMatrixXd frames(n, win);
  for (Index f = 0; f < n; ++f) {
    frames.row(f) = padded.segment(f * hop, win).cwiseProduct(window).transpose();
  }
  return frames;
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

FilterBank mel_filterbank(int sample_rate, Index n_fft, Index n_filters, double f_min,
                          double f_max) {
  if (sample_rate <= 0) throw ConfigError("filterbank: sample rate must be positive");
  if (f_max <= 0.0) f_max = sample_rate / 2.0;
  if (n_fft < 2 || (n_fft & (n_fft - 1)) != 0) {
    throw ConfigError("filterbank: n_fft must be a power of two");
  }
  if (n_filters < 1) throw ConfigError("filterbank: need at least one filter");
  if (!(f_min >= 0.0 && f_min < f_max && f_max <= sample_rate / 2.0)) {
    throw ConfigError("filterbank: invalid band edges [" + std::to_string(f_min) +
                      ", " + std::to_string(f_max) + "]");
  }
  const double mel_lo = hz_to_mel(f_min);
  const double mel_hi = hz_to_mel(f_max);
  Eigen::VectorXd edges(n_filters + 2);
  for (Index i = 0; i < n_filters + 2; ++i) {
    edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * double(i) / double(n_filters + 1));
  }

  FilterBank bank;
  bank.sample_rate = sample_rate;
  bank.n_fft = n_fft;
  bank.center_freqs = edges.segment(1, n_filters);
  const Index bins = n_fft / 2 + 1;
  bank.weights = RowMatrixXd::Zero(n_filters, bins);
  for (Index k = 0; k < n_filters; ++k) {
    const double lo = edges[k], mid = edges[k + 1], hi = edges[k + 2];
    for (Index b = 0; b < bins; ++b) {
      const double f = double(b) * sample_rate / double(n_fft);
      if (f > lo && f <= mid) {
        bank.weights(k, b) = (f - lo) / (mid - lo);
      } else if (f > mid && f < hi) {
        bank.weights(k, b) = (hi - f) / (hi - mid);
      }
    }
    if (bank.weights.row(k).maxCoeff() <= 0.0) {
      throw ConfigError("filterbank: filter " + std::to_string(k) +
                        " covers no FFT bin; increase n_fft");
    }
  }
  return bank;
}

RowMatrixXd power_spectrum(const RowMatrixXd& frames, Index n_fft) {
  if (frames.cols() > n_fft) {
    throw DimensionError("power_spectrum: frame length " + std::to_string(frames.cols()) +
                         " exceeds n_fft " + std::to_string(n_fft));
  }
  Eigen::FFT<double> fft;
  const Index bins = n_fft / 2 + 1;
  RowMatrixXd power(frames.rows(), bins);
  std::vector<double> in(static_cast<std::size_t>(n_fft));
  std::vector<std::complex<double>> out;
  for (Index f = 0; f < frames.rows(); ++f) {
    std::fill(in.begin(), in.end(), 0.0);
    for (Index i = 0; i < frames.cols(); ++i) in[static_cast<std::size_t>(i)] = frames(f, i);
    fft.fwd(out, in);
    for (Index b = 0; b < bins; ++b) {
      power(f, b) = std::norm(out[static_cast<std::size_t>(b)]) / double(n_fft);
    }
  }
  return power;
}

RowMatrixXd log_mel_energies(const RowMatrixXd& frames, const FilterBank& bank,
                             double log_floor) {
  const RowMatrixXd power = power_spectrum(frames, bank.n_fft);
  RowMatrixXd energy = power * bank.weights.transpose();
  return energy.array().max(log_floor).log().matrix();
}

FeatureMap mfec(const RowMatrixXd& frames, const FilterBank& bank, double log_floor) {
  if (frames.rows() != kMapFrames) {
    throw DimensionError("mfec: expected " + std::to_string(kMapFrames) +
                         " frames (one 0.8 s segment), got " +
                         std::to_string(frames.rows()));
  }
  return log_mel_energies(frames, bank, log_floor);
}

MfecExtractor::MfecExtractor(FramingConfig framing)
    : framing_(framing), bank_(mel_filterbank()) {}

FeatureMap MfecExtractor::operator()(const AudioSignal& segment) const {
  if (segment.sample_rate != bank_.sample_rate) {
    throw ConfigError("mfec: expected " + std::to_string(bank_.sample_rate) +
                      " Hz audio, got " + std::to_string(segment.sample_rate) +
                      " Hz (resampling is not supported)");
  }
  return mfec(frame_signal(segment, framing_), bank_);
}

FeatureMap FeatureCube::slice(Index depth) const {
  const Index plane = kMapFrames * kMelBands;
  return Eigen::Map<const RowMatrixXd>(data.data() + depth * plane, kMapFrames, kMelBands);
}

namespace {

void check_map(const FeatureMap& map) {
  if (map.rows() != kMapFrames || map.cols() != kMelBands) {
    throw DimensionError("feature map must be 80x40, got " + std::to_string(map.rows()) +
                         "x" + std::to_string(map.cols()));
  }
}

}  // namespace

FeatureCube build_feature_cube(std::span<const Utterance> utterances) {
  if (utterances.empty()) throw ConfigError("feature cube: need at least one map");
  FeatureCube cube;
  cube.speaker_id = utterances.front().speaker_id;
  const Index zeta = static_cast<Index>(utterances.size());
  const Index plane = kMapFrames * kMelBands;
  cube.data = nn::TensorD({zeta, kMapFrames, kMelBands, 1});
  for (Index d = 0; d < zeta; ++d) {
    const auto& u = utterances[static_cast<std::size_t>(d)];
    if (u.speaker_id != cube.speaker_id) {
      throw ConfigError("feature cube: provenance error, mixed speakers '" +
                        cube.speaker_id + "' and '" + u.speaker_id + "'");
    }
    check_map(u.map);
    Eigen::Map<RowMatrixXd>(cube.data.data() + d * plane, kMapFrames, kMelBands) = u.map;
    cube.utterance_ids.push_back(u.utterance_id);
  }
  return cube;
}

FeatureCube replicate_for_eval(const Utterance& utterance, Index zeta) {
  if (zeta < 1) throw ConfigError("replicate_for_eval: zeta must be >= 1");
  std::vector<Utterance> copies(static_cast<std::size_t>(zeta), utterance);
  return build_feature_cube(copies);
}

nn::TensorD map_tensor(const FeatureMap& map) {
  check_map(map);
  nn::TensorD t({kMapFrames, kMelBands});
  t.as_matrix(kMapFrames, kMelBands) = map;
  return t;
}

namespace {
constexpr std::uint32_t kDumpVersion = 1;
}

void write_feature_dump(const std::filesystem::path& path, const FeatureMap& map) {
  io::ByteWriter w;
  w.bytes("MFEC");
  w.u32(kDumpVersion);
  w.u32(static_cast<std::uint32_t>(map.rows()));
  w.u32(static_cast<std::uint32_t>(map.cols()));
  for (Index r = 0; r < map.rows(); ++r)
    for (Index c = 0; c < map.cols(); ++c) w.f64(map(r, c));
  io::write_file(path, w.buffer());
}

FeatureMap read_feature_dump(const std::filesystem::path& path) {
  const std::string bytes = io::read_file(path);
  io::ByteReader r(bytes, "feature dump " + path.string());
  if (r.bytes(4) != "MFEC") throw FormatError("feature dump: bad magic");
  if (const auto v = r.u32(); v != kDumpVersion) {
    throw VersionError("feature dump: unsupported version " + std::to_string(v));
  }
  const Index rows = r.u32();
  const Index cols = r.u32();
  r.require(static_cast<std::size_t>(rows * cols) * 8);
  FeatureMap map(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) map(i, j) = r.f64();
  return map;
}

}  // namespace svkit::dsp
