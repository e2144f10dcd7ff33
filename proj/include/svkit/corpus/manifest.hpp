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

#ifndef SVKIT_CORPUS_MANIFEST_HPP
#define SVKIT_CORPUS_MANIFEST_HPP

#include <filesystem>
#include <string>
#include <vector>

namespace svkit::corpus {

enum class SplitHint { development, enrollment, evaluation, automatic };

const char* to_string(SplitHint hint);
SplitHint parse_split_hint(const std::string& text);

struct ManifestEntry {
  std::string speaker_id;
  std::filesystem::path path;  // resolved against the manifest directory
  std::string session;
  SplitHint split = SplitHint::automatic;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

inline constexpr const char* kManifestHeader = "speaker_id,path,session,split";

// Header line then one comma-separated row per recording. Blank lines and
// lines starting with '#' are skipped. Relative audio paths are resolved
// against the manifest's directory. Throws IoError for a missing manifest or
// audio file, ParseError (with line number) for malformed rows and
// DuplicateEntryError for a repeated (speaker_id, path) pair.
std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path,
                                         bool check_audio = true);
std::vector<ManifestEntry> parse_manifest(const std::string& text,
                                          const std::filesystem::path& base_dir,
                                          const std::string& source = "manifest");

// Paths under the manifest directory are written relative to it.
void write_manifest(const std::filesystem::path& path,
                    const std::vector<ManifestEntry>& entries);

}  // namespace svkit::corpus

#endif  // SVKIT_CORPUS_MANIFEST_HPP
