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

#include "svkit/dsp/audio.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "svkit/error.hpp"
#include "svkit/io/binary.hpp"

namespace svkit::dsp {

namespace {

constexpr std::uint16_t kFormatPcm = 0x0001;
constexpr std::uint16_t kFormatFloat = 0x0003;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

struct WavFormat {
  std::uint16_t tag = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t block_align = 0;
  std::uint16_t bits = 0;
};

WavFormat parse_fmt(std::string_view chunk) {
  if (chunk.size() < 16) throw FormatError("wav: fmt chunk shorter than 16 bytes");
  io::ByteReader r(chunk, "wav fmt chunk");
  WavFormat f;
  f.tag = r.u16();
  f.channels = r.u16();
  f.sample_rate = r.u32();
  r.u32();  // byte rate
  f.block_align = r.u16();
  f.bits = r.u16();
  if (f.tag == kFormatExtensible) {
    if (chunk.size() < 26) throw FormatError("wav: truncated extensible fmt chunk");
    r.u16();  // cbSize
    r.u16();  // valid bits
    r.u32();  // channel mask
    f.tag = r.u16();  // leading two bytes of the sub-format GUID
  }
  return f;
}

}  // namespace

AudioSignal parse_wav(std::string_view bytes) {
  if (bytes.size() < 12 || bytes.substr(0, 4) != "RIFF" ||
      bytes.substr(8, 4) != "WAVE") {
    throw FormatError("wav: missing RIFF/WAVE header");
  }
  io::ByteReader r(bytes.substr(12), "wav");
  std::optional<WavFormat> fmt;
  std::optional<std::string_view> data;
  while (r.remaining() >= 8) {
    const std::string_view id = r.bytes(4);
    const std::uint32_t size = r.u32();
    if (size > r.remaining()) {
      // Some writers leave a placeholder size on the data chunk.
      if (id != "data") throw FormatError("wav: chunk '" + std::string(id) + "' overruns file");
      data = r.bytes(r.remaining());
      break;
    }
    const std::string_view body = r.bytes(size);
    if (size % 2 == 1 && r.remaining() > 0) r.skip(1);
    if (id == "fmt ") {
      fmt = parse_fmt(body);
    } else if (id == "data") {
      data = body;
    }
  }
  if (!fmt) throw FormatError("wav: no fmt chunk");
  if (!data) throw FormatError("wav: no data chunk");
  if (fmt->channels == 0 || fmt->sample_rate == 0) {
    throw FormatError("wav: zero channels or sample rate");
  }

  const bool pcm16 = fmt->tag == kFormatPcm && fmt->bits == 16;
  const bool float32 = fmt->tag == kFormatFloat && fmt->bits == 32;
  if (!pcm16 && !float32) {
    throw UnsupportedEncodingError("wav: unsupported encoding (format tag " +
                                   std::to_string(fmt->tag) + ", " +
                                   std::to_string(fmt->bits) + " bits)");
  }
  const std::size_t sample_bytes = pcm16 ? 2 : 4;
  const std::size_t frame_bytes = sample_bytes * fmt->channels;
  const std::size_t frames = data->size() / frame_bytes;
  if (frames == 0) throw EmptyPayloadError("wav: data chunk holds no samples");

  AudioSignal out;
  out.sample_rate = static_cast<int>(fmt->sample_rate);
  out.samples.resize(static_cast<Eigen::Index>(frames));
  io::ByteReader pr(*data, "wav data");
  for (std::size_t i = 0; i < frames; ++i) {
    double acc = 0.0;
    for (std::uint16_t c = 0; c < fmt->channels; ++c) {
      acc += pcm16 ? pr.i16() / 32768.0 : static_cast<double>(pr.f32());
    }
    double v = acc / fmt->channels;
    if (!std::isfinite(v)) throw FormatError("wav: non-finite sample");
    out.samples[static_cast<Eigen::Index>(i)] = std::clamp(v, -1.0, 1.0);
  }
  return out;
}

AudioSignal load_wav(const std::filesystem::path& path) {
  return parse_wav(io::read_file(path));
}

std::string encode_wav(const AudioSignal& signal) {
  const auto n = static_cast<std::uint32_t>(signal.samples.size());
  io::ByteWriter w;
  w.bytes("RIFF");
  w.u32(36 + 2 * n);
  w.bytes("WAVE");
  w.bytes("fmt ");
  w.u32(16);
  w.u16(kFormatPcm);
  w.u16(1);
  w.u32(static_cast<std::uint32_t>(signal.sample_rate));
  w.u32(static_cast<std::uint32_t>(signal.sample_rate) * 2);
  w.u16(2);
  w.u16(16);
  w.bytes("data");
  w.u32(2 * n);
  for (Eigen::Index i = 0; i < signal.samples.size(); ++i) {
    const double q = std::round(signal.samples[i] * 32768.0);
    w.i16(static_cast<std::int16_t>(std::clamp(q, -32768.0, 32767.0)));
  }
  return w.take();
}

void write_wav(const std::filesystem::path& path, const AudioSignal& signal) {
  io::write_file(path, encode_wav(signal));
}

}  // namespace svkit::dsp
