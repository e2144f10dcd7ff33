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

#include "svkit/corpus/split.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "svkit/error.hpp"
#include "svkit/nn/rng.hpp"

namespace svkit::corpus {

SplitPlan split_enroll_eval(const std::vector<ManifestEntry>& entries, std::uint64_t seed) {
  SplitPlan plan;
  std::set<std::string> dev;
  std::map<std::string, SpeakerSplit> speakers;
  std::map<std::string, std::vector<std::size_t>> pending;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    switch (e.split) {
      case SplitHint::development:
        dev.insert(e.speaker_id);
        plan.development.push_back(i);
        break;
      case SplitHint::enrollment:
        speakers[e.speaker_id].enrollment.push_back(i);
        break;
      case SplitHint::evaluation:
        speakers[e.speaker_id].evaluation.push_back(i);
        break;
      case SplitHint::automatic:
        speakers[e.speaker_id];
        pending[e.speaker_id].push_back(i);
        break;
    }
  }
  const nn::Rng root(seed);
  std::uint64_t stream = 0;
  for (auto& [id, split] : speakers) {
    ++stream;
    if (dev.count(id)) {
      throw ConfigError("speaker " + id +
                        " appears in both development and enrollment/evaluation");
    }
    split.speaker_id = id;
    auto& auto_entries = pending[id];
    nn::Rng rng = root.fork(stream);
    rng.shuffle(auto_entries);
    const std::size_t n_enroll = (auto_entries.size() + 1) / 2;
    split.enrollment.insert(split.enrollment.end(), auto_entries.begin(),
                            auto_entries.begin() + static_cast<std::ptrdiff_t>(n_enroll));
    split.evaluation.insert(split.evaluation.end(),
                            auto_entries.begin() + static_cast<std::ptrdiff_t>(n_enroll),
                            auto_entries.end());
    if (split.enrollment.empty() || split.evaluation.empty()) {
      throw ConfigError("speaker " + id +
                        " needs at least 2 recordings for enrollment and evaluation");
    }
    std::sort(split.enrollment.begin(), split.enrollment.end());
    std::sort(split.evaluation.begin(), split.evaluation.end());
    plan.speakers.push_back(std::move(split));
  }
  plan.development_speakers.assign(dev.begin(), dev.end());
  return plan;
}

}  // namespace svkit::corpus
