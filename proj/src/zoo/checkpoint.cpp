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

#include "svkit/zoo/checkpoint.hpp"

#include "svkit/io/binary.hpp"

namespace svkit::zoo {

namespace {

constexpr std::string_view kMagic = "SV3D";
constexpr std::size_t kHeaderSize = 4 + 4 + 8;
constexpr std::size_t kTrailerSize = 4;

void put_shape(io::ByteWriter& w, const nn::Shape& shape) {
  w.u32(static_cast<std::uint32_t>(shape.size()));
  for (auto d : shape) w.u64(static_cast<std::uint64_t>(d));
}

nn::Shape get_shape(io::ByteReader& r) {
  const std::uint32_t rank = r.u32();
  if (rank > 8) throw FormatError("checkpoint: implausible tensor rank " + std::to_string(rank));
  nn::Shape s(rank);
  for (auto& d : s) d = static_cast<nn::Index>(r.u64());
  return s;
}

void put_extent(io::ByteWriter& w, const nn::Extent3& e) {
  w.u64(static_cast<std::uint64_t>(e.depth));
  w.u64(static_cast<std::uint64_t>(e.height));
  w.u64(static_cast<std::uint64_t>(e.width));
}

nn::Extent3 get_extent(io::ByteReader& r) {
  nn::Extent3 e;
  e.depth = static_cast<nn::Index>(r.u64());
  e.height = static_cast<nn::Index>(r.u64());
  e.width = static_cast<nn::Index>(r.u64());
  return e;
}

std::string body_bytes(const Checkpoint& c) {
  const auto& net = c.network;
  const auto& spec = net.spec();
  io::ByteWriter w;
  w.u32(static_cast<std::uint32_t>(spec.architecture));
  w.u64(c.meta.seed);
  w.u32(c.meta.epoch);
  w.u64(static_cast<std::uint64_t>(spec.zeta));
  w.u64(static_cast<std::uint64_t>(spec.n_classes));
  w.u64(static_cast<std::uint64_t>(spec.embedding_end));
  put_shape(w, spec.input_shape);
  w.f64(spec.batchnorm.eps);
  w.f64(spec.batchnorm.momentum);

  w.u32(static_cast<std::uint32_t>(net.layer_count()));
  for (std::size_t i = 0; i < net.layer_count(); ++i) {
    const auto& layer = net.layer(i);
    const auto& s = layer.spec();
    w.u32(static_cast<std::uint32_t>(s.kind));
    w.str(s.name);
    put_extent(w, s.kernel);
    put_extent(w, s.stride);
    w.u64(static_cast<std::uint64_t>(s.units));
    w.u8(s.pad_depth ? 1 : 0);
    w.u64(static_cast<std::uint64_t>(s.patch));
    w.u32(static_cast<std::uint32_t>(layer.parameters().size()));
    for (const auto& p : layer.parameters()) {
      w.str(p.name);
      w.u8(p.learnable ? 1 : 0);
      put_shape(w, p.value.shape());
    }
  }
  for (std::size_t i = 0; i < net.layer_count(); ++i) {
    for (const auto& p : net.layer(i).parameters()) {
      for (nn::Index k = 0; k < p.value.size(); ++k) w.f64(p.value[k]);
    }
  }
  return w.take();
}

struct ParamEntry {
  std::string name;
  bool learnable;
  nn::Shape shape;
};

Checkpoint parse_body(std::string_view body) {
  io::ByteReader r(body, "checkpoint body");
  nn::NetworkSpec spec;
  TrainingMetadata meta;
  const std::uint32_t arch = r.u32();
  if (arch > static_cast<std::uint32_t>(nn::Architecture::lcn_dvector)) {
    throw FormatError("checkpoint: unknown architecture " + std::to_string(arch));
  }
  spec.architecture = static_cast<nn::Architecture>(arch);
  meta.seed = r.u64();
  meta.epoch = r.u32();
  spec.zeta = static_cast<nn::Index>(r.u64());
  spec.n_classes = static_cast<nn::Index>(r.u64());
  spec.embedding_end = static_cast<nn::Index>(r.u64());
  spec.input_shape = get_shape(r);
  spec.batchnorm.eps = r.f64();
  spec.batchnorm.momentum = r.f64();

  const std::uint32_t n_layers = r.u32();
  std::vector<std::vector<ParamEntry>> table;
  for (std::uint32_t i = 0; i < n_layers; ++i) {
    nn::LayerSpec s;
    const std::uint32_t kind = r.u32();
    if (kind > static_cast<std::uint32_t>(nn::LayerKind::softmax)) {
      throw FormatError("checkpoint: unknown layer kind " + std::to_string(kind));
    }
    s.kind = static_cast<nn::LayerKind>(kind);
    s.name = r.str();
    s.kernel = get_extent(r);
    s.stride = get_extent(r);
    s.units = static_cast<nn::Index>(r.u64());
    s.pad_depth = r.u8() != 0;
    s.patch = static_cast<nn::Index>(r.u64());
    spec.layers.push_back(std::move(s));
    std::vector<ParamEntry> params(r.u32());
    for (auto& p : params) {
      p.name = r.str();
      p.learnable = r.u8() != 0;
      p.shape = get_shape(r);
    }
    table.push_back(std::move(params));
  }

  nn::Network net = [&] {
    try {
      return nn::Network(spec);
    } catch (const DimensionError& e) {
      throw FormatError(std::string("checkpoint: layer table is inconsistent: ") +
                        e.what());
    }
  }();
  for (std::size_t i = 0; i < net.layer_count(); ++i) {
    auto& params = net.layer(i).parameters();
    const auto& stored = table[i];
    if (params.size() != stored.size()) {
      throw FormatError("checkpoint: layer " + spec.layers[i].name +
                        " has the wrong parameter count");
    }
    for (std::size_t k = 0; k < params.size(); ++k) {
      if (params[k].name != stored[k].name || params[k].learnable != stored[k].learnable ||
          params[k].value.shape() != stored[k].shape) {
        throw FormatError("checkpoint: parameter " + spec.layers[i].name + "." +
                          stored[k].name + " does not match its descriptor");
      }
    }
  }
  for (std::size_t i = 0; i < net.layer_count(); ++i) {
    for (auto& p : net.layer(i).parameters()) {
      for (nn::Index k = 0; k < p.value.size(); ++k) p.value[k] = r.f64();
    }
  }
  if (r.remaining() != 0) throw FormatError("checkpoint: trailing bytes in body");
  return Checkpoint{std::move(net), meta};
}

}  // namespace

std::string serialize_checkpoint(const Checkpoint& checkpoint) {
  const std::string body = body_bytes(checkpoint);
  io::ByteWriter w;
  w.bytes(kMagic);
  w.u32(kCheckpointVersion);
  w.u64(body.size());
  w.bytes(body);
  w.u32(io::crc32(w.buffer()));
  return w.take();
}

Checkpoint deserialize_checkpoint(std::string_view bytes) {
  io::ByteReader r(bytes, "checkpoint");
  r.require(kMagic.size());
  if (r.bytes(kMagic.size()) != kMagic) {
    throw FormatError("checkpoint: bad magic (not an SV3D file)");
  }
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw VersionError("checkpoint: unsupported version " + std::to_string(version) +
                       " (expected " + std::to_string(kCheckpointVersion) + ")");
  }
  const std::uint64_t body_len = r.u64();
  r.require(body_len + kTrailerSize);
  if (r.remaining() != body_len + kTrailerSize) {
    throw FormatError("checkpoint: trailing bytes after checksum");
  }
  const std::string_view body = r.bytes(body_len);
  const std::uint32_t stored = r.u32();
  const std::uint32_t actual = io::crc32(bytes.substr(0, kHeaderSize + body_len));
  if (stored != actual) throw ChecksumError("checkpoint: CRC32 mismatch");
  return parse_body(body);
}

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  io::write_file(path, serialize_checkpoint(checkpoint));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return deserialize_checkpoint(io::read_file(path));
}

}  // namespace svkit::zoo
