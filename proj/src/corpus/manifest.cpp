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

#include "svkit/corpus/manifest.hpp"

#include <set>
#include <sstream>
#include <utility>

#include "svkit/error.hpp"
#include "svkit/io/binary.hpp"

namespace svkit::corpus {

const char* to_string(SplitHint hint) {
  switch (hint) {
    case SplitHint::development: return "development";
    case SplitHint::enrollment: return "enrollment";
    case SplitHint::evaluation: return "evaluation";
    case SplitHint::automatic: return "auto";
  }
  return "auto";
}

SplitHint parse_split_hint(const std::string& text) {
  if (text == "development") return SplitHint::development;
  if (text == "enrollment") return SplitHint::enrollment;
  if (text == "evaluation") return SplitHint::evaluation;
  if (text == "auto") return SplitHint::automatic;
  throw ConfigError("split must be development, enrollment, evaluation or auto, got '" +
                    text + "'");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::vector<ManifestEntry> parse_manifest(const std::string& text,
                                          const std::filesystem::path& base_dir,
                                          const std::string& source) {
  std::vector<ManifestEntry> entries;
  std::set<std::pair<std::string, std::string>> seen;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_fields(line);
    if (!have_header) {
      if (line != kManifestHeader) {
        throw ParseError(source, line_no,
                         std::string("expected header '") + kManifestHeader + "'");
      }
      have_header = true;
      continue;
    }
    if (fields.size() != 4) {
      throw ParseError(source, line_no,
                       "expected 4 fields, got " + std::to_string(fields.size()));
    }
    ManifestEntry e;
    e.speaker_id = fields[0];
    if (e.speaker_id.empty()) throw ParseError(source, line_no, "empty speaker_id");
    if (fields[1].empty()) throw ParseError(source, line_no, "empty path");
    std::filesystem::path p(fields[1]);
    e.path = p.is_absolute() ? p : (base_dir / p).lexically_normal();
    e.session = fields[2];
    try {
      e.split = parse_split_hint(fields[3]);
    } catch (const ConfigError& err) {
      throw ParseError(source, line_no, err.what());
    }
    if (!seen.emplace(e.speaker_id, e.path.string()).second) {
      throw DuplicateEntryError(source, line_no,
                                "duplicate entry (" + e.speaker_id + ", " + fields[1] + ")");
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path,
                                         bool check_audio) {
  const std::string text = io::read_file(path);
  auto entries = parse_manifest(text, path.parent_path(), path.string());
  if (check_audio) {
    for (const auto& e : entries) {
      if (!std::filesystem::is_regular_file(e.path)) {
        throw IoError(path.string() + ": audio file not found: " + e.path.string());
      }
    }
  }
  return entries;
}

void write_manifest(const std::filesystem::path& path,
                    const std::vector<ManifestEntry>& entries) {
  const auto base = path.parent_path().empty()
                        ? std::filesystem::path(".")
                        : path.parent_path().lexically_normal();
  std::ostringstream out;
  out << kManifestHeader << '\n';
  for (const auto& e : entries) {
    std::filesystem::path p = e.path.lexically_normal();
    const auto rel = p.lexically_relative(base);
    if (!rel.empty() && *rel.begin() != "..") p = rel;
    const std::string ps = p.generic_string();
    for (const auto* f : {&e.speaker_id, &ps, &e.session}) {
      if (f->find_first_of(",\n") != std::string::npos) {
        throw ConfigError("manifest fields may not contain commas or newlines: " + *f);
      }
    }
    out << e.speaker_id << ',' << ps << ',' << e.session << ',' << to_string(e.split)
        << '\n';
  }
  io::write_file(path, out.str());
}

}  // namespace svkit::corpus
