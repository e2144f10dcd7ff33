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

#ifndef SVKIT_CORPUS_SPLIT_HPP
#define SVKIT_CORPUS_SPLIT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "svkit/corpus/manifest.hpp"

namespace svkit::corpus {

// Indices refer to the entry list the plan was built from.
struct SpeakerSplit {
  std::string speaker_id;
  std::vector<std::size_t> enrollment;
  std::vector<std::size_t> evaluation;
};

struct SplitPlan {
  std::vector<std::string> development_speakers;  // sorted
  std::vector<std::size_t> development;           // entry indices
  std::vector<SpeakerSplit> speakers;             // sorted by speaker_id
};

// Development-tagged entries go to the development pool. For every other
// speaker, entries tagged enrollment/evaluation keep their tag and auto
// entries are shuffled (seeded per speaker) and halved, enrollment taking
// the odd one. ConfigError when a speaker ends up with an empty half or
// appears in both the development pool and the enrollment/evaluation set.
SplitPlan split_enroll_eval(const std::vector<ManifestEntry>& entries, std::uint64_t seed);

}  // namespace svkit::corpus

#endif  // SVKIT_CORPUS_SPLIT_HPP
