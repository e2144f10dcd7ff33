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

#ifndef SVKIT_CORPUS_DATASET_HPP
#define SVKIT_CORPUS_DATASET_HPP

#include <string>
#include <vector>

#include "svkit/corpus/manifest.hpp"
#include "svkit/corpus/slicing.hpp"
#include "svkit/corpus/split.hpp"
#include "svkit/dsp/features.hpp"

namespace svkit::corpus {

struct SpeakerUtterances {
  std::string speaker_id;
  std::vector<dsp::Utterance> utterances;  // manifest order, then slice order
};

// Feature maps for the three protocol phases.
struct ExperimentData {
  std::vector<SpeakerUtterances> development;  // sorted by speaker id
  std::vector<SpeakerUtterances> enrollment;   // sorted by speaker id
  std::vector<dsp::Utterance> evaluation;
};

ExperimentData prepare_experiment(const std::vector<ManifestEntry>& entries,
                                  const SplitPlan& plan, const ExtractConfig& config = {});

}  // namespace svkit::corpus

#endif  // SVKIT_CORPUS_DATASET_HPP
