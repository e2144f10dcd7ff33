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

#ifndef SVKIT_ZOO_CHECKPOINT_HPP
#define SVKIT_ZOO_CHECKPOINT_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "svkit/nn/network.hpp"

namespace svkit::zoo {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct TrainingMetadata {
  std::uint64_t seed = 0;
  std::uint32_t epoch = 0;
};

struct Checkpoint {
  nn::Network network;
  TrainingMetadata meta;
};

// Layout: "SV3D", u32 version, u64 body length, body, u32 CRC32 of all
// preceding bytes. Body: metadata block, layer table (descriptor plus
// parameter shapes), little-endian f64 payloads.
std::string serialize_checkpoint(const Checkpoint& checkpoint);
// TruncatedError, FormatError (magic or inconsistent body), VersionError,
// ChecksumError.
Checkpoint deserialize_checkpoint(std::string_view bytes);

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace svkit::zoo

#endif  // SVKIT_ZOO_CHECKPOINT_HPP
