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

#include "svkit/corpus/dataset.hpp"

#include <map>

namespace svkit::corpus {

namespace {

void append(std::vector<dsp::Utterance>& out, const ManifestEntry& entry,
            const ExtractConfig& config) {
  auto utts = extract_utterances(entry, config);
  out.insert(out.end(), std::make_move_iterator(utts.begin()),
             std::make_move_iterator(utts.end()));
}

}  // namespace

ExperimentData prepare_experiment(const std::vector<ManifestEntry>& entries,
                                  const SplitPlan& plan, const ExtractConfig& config) {
  ExperimentData data;
  std::map<std::string, std::vector<dsp::Utterance>> dev;
  for (const auto i : plan.development) {
    append(dev[entries.at(i).speaker_id], entries.at(i), config);
  }
  for (auto& [id, utts] : dev) data.development.push_back({id, std::move(utts)});

  for (const auto& s : plan.speakers) {
    SpeakerUtterances enrolled{s.speaker_id, {}};
    for (const auto i : s.enrollment) append(enrolled.utterances, entries.at(i), config);
    data.enrollment.push_back(std::move(enrolled));
    for (const auto i : s.evaluation) append(data.evaluation, entries.at(i), config);
  }
  return data;
}

}  // namespace svkit::corpus
