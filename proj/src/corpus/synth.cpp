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

#include "svkit/corpus/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "svkit/error.hpp"

namespace svkit::corpus {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kRampSeconds = 0.01;

// Stream ids for Rng::fork; speakers and utterances never collide.
std::uint64_t speaker_stream(std::size_t speaker) { return 1 + 2 * speaker; }
std::uint64_t utterance_stream(std::size_t speaker, std::size_t utt) {
  return 2 + 2 * (speaker * 100003 + utt);
}

void resonate(Eigen::VectorXd& x, double freq, double bandwidth, int sr) {
  const double r = std::exp(-std::numbers::pi * bandwidth / sr);
  const double a1 = 2.0 * r * std::cos(kTwoPi * freq / sr);
  const double a2 = -r * r;
  const double gain = 1.0 - r;
  double y1 = 0.0, y2 = 0.0;
  for (Eigen::Index n = 0; n < x.size(); ++n) {
    const double y = gain * x[n] + a1 * y1 + a2 * y2;
    y2 = y1;
    y1 = y;
    x[n] = y;
  }
}

}  // namespace

SynthSpeakerParams synth_speaker_params(std::uint64_t seed, std::size_t speaker_index) {
  nn::Rng rng = nn::Rng(seed).fork(speaker_stream(speaker_index));
  SynthSpeakerParams p;
  p.formants = {rng.uniform(300.0, 850.0), rng.uniform(950.0, 2300.0),
                rng.uniform(2400.0, 3500.0)};
  p.bandwidths = {rng.uniform(60.0, 140.0), rng.uniform(80.0, 180.0),
                  rng.uniform(120.0, 250.0)};
  p.pitch_hz = rng.uniform(85.0, 255.0);
  p.noise_mix = rng.uniform(0.05, 0.3);
  return p;
}

dsp::AudioSignal synthesize_utterance(const SynthSpeakerParams& speaker, nn::Rng& rng,
                                      const SynthConfig& config) {
  const int sr = dsp::kSampleRate;
  auto samples = [&](double s) {
    return static_cast<Eigen::Index>(std::llround(s * sr));
  };

  // Session draw.
  auto jitter = [&] { return rng.uniform(1.0 - config.session_jitter, 1.0 + config.session_jitter); };
  std::array<double, 3> formants{};
  for (int k = 0; k < 3; ++k) formants[k] = speaker.formants[k] * jitter();
  const double base_pitch = speaker.pitch_hz * jitter();
  const double tilt = rng.uniform(-config.channel_tilt, config.channel_tilt);

  // Word/gap layout.
  struct Word {
    Eigen::Index begin, length;
    double gain, pitch_scale;
  };
  std::vector<Word> words;
  Eigen::Index pos = samples(config.edge_silence_s);
  Eigen::Index voiced_left = samples(config.voiced_seconds);
  while (voiced_left > 0) {
    const Eigen::Index len =
        std::min(voiced_left, samples(rng.uniform(config.word_min_s, config.word_max_s)));
    words.push_back({pos, len, rng.uniform(0.85, 1.0), rng.uniform(0.95, 1.05)});
    voiced_left -= len;
    pos += len;
    if (voiced_left > 0) pos += samples(rng.uniform(config.gap_min_s, config.gap_max_s));
  }
  const Eigen::Index total = pos + samples(config.edge_silence_s);

  Eigen::VectorXd envelope = Eigen::VectorXd::Zero(total);
  Eigen::VectorXd pitch = Eigen::VectorXd::Constant(total, base_pitch);
  const Eigen::Index ramp = samples(kRampSeconds);
  for (const auto& w : words) {
    for (Eigen::Index i = 0; i < w.length; ++i) {
      const Eigen::Index edge = std::min(i, w.length - 1 - i);
      const double shape =
          edge < ramp ? 0.5 - 0.5 * std::cos(std::numbers::pi * (edge + 0.5) / ramp) : 1.0;
      envelope[w.begin + i] = w.gain * shape;
      pitch[w.begin + i] = base_pitch * w.pitch_scale;
    }
  }

  // Excitation: unit pulses at the drifting pitch plus white noise.
  const double drift_rate = rng.uniform(0.5, 1.5);
  const double drift_phase = rng.uniform(0.0, kTwoPi);
  Eigen::VectorXd x(total);
  double phase = rng.uniform();
  for (Eigen::Index n = 0; n < total; ++n) {
    const double t = static_cast<double>(n) / sr;
    const double f0 = pitch[n] * (1.0 + 0.04 * std::sin(kTwoPi * drift_rate * t + drift_phase));
    phase += f0 / sr;
    double pulse = 0.0;
    if (phase >= 1.0) {
      phase -= 1.0;
      pulse = 1.0;
    }
    x[n] = (1.0 - speaker.noise_mix) * pulse * 4.0 + speaker.noise_mix * rng.normal();
  }
  for (int k = 0; k < 3; ++k) resonate(x, formants[k], speaker.bandwidths[k], sr);
  for (Eigen::Index n = total - 1; n > 0; --n) x[n] -= tilt * x[n - 1];
  x = x.cwiseProduct(envelope);

  const double peak = x.cwiseAbs().maxCoeff();
  if (peak > 0.0) x *= config.peak / peak;
  return {std::move(x), sr};
}

std::vector<ManifestEntry> make_synthetic_corpus(int n_speakers, int utterances_per_speaker,
                                                 std::uint64_t seed,
                                                 const std::filesystem::path& out_dir,
                                                 const SynthConfig& config) {
  if (n_speakers < 2) {
    throw ConfigError("synthetic corpus needs at least 2 speakers, got " +
                      std::to_string(n_speakers));
  }
  if (utterances_per_speaker < 1) {
    throw ConfigError("synthetic corpus needs at least 1 utterance per speaker");
  }
  const int n_dev = config.n_development < 0 ? (2 * n_speakers) / 3 : config.n_development;
  if (n_dev > n_speakers) {
    throw ConfigError("more development speakers than speakers");
  }
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  const nn::Rng root(seed);
  std::vector<ManifestEntry> entries;
  for (int s = 0; s < n_speakers; ++s) {
    const auto params = synth_speaker_params(seed, static_cast<std::size_t>(s));
    char sid[32];
    std::snprintf(sid, sizeof sid, "spk%03d", s);
    const auto dir = out_dir / sid;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    for (int u = 0; u < utterances_per_speaker; ++u) {
      nn::Rng rng = root.fork(
          utterance_stream(static_cast<std::size_t>(s), static_cast<std::size_t>(u)));
      char name[32];
      std::snprintf(name, sizeof name, "utt%02d.wav", u);
      const auto path = dir / name;
      dsp::write_wav(path, synthesize_utterance(params, rng, config));
      entries.push_back({sid, path.lexically_normal(), "s" + std::to_string(u % 4 + 1),
                         s < n_dev ? SplitHint::development : SplitHint::automatic});
    }
  }
  write_manifest(out_dir / kManifestFileName, entries);
  return entries;
}

}  // namespace svkit::corpus
