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

#ifndef SVKIT_PROTOCOL_METRICS_HPP
#define SVKIT_PROTOCOL_METRICS_HPP

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace svkit::protocol {

enum class TrialLabel { genuine, impostor };

const char* to_string(TrialLabel label);
TrialLabel parse_trial_label(const std::string& text);

struct Trial {
  std::string utterance_id;
  std::string claimed_id;
  TrialLabel label = TrialLabel::impostor;
};

struct ScoredTrial {
  Trial trial;
  double score = 0.0;
};

using ScoreSet = std::vector<ScoredTrial>;

struct RocPoint {
  double tau;
  double tpr;
  double far;
};

struct PrPoint {
  double precision;
  double recall;
};

// Points run from tau = +inf (0, 0) to tau = -inf (1, 1), one per distinct
// score in between; acceptance is score >= tau.
struct RocSummary {
  std::vector<RocPoint> points;
  std::vector<PrPoint> pr;
  double eer = 0.0;
  double auc = 0.0;
  std::size_t n_genuine = 0;
  std::size_t n_impostor = 0;
};

// MetricPreconditionError without genuine or impostor scores; NumericError
// on non-finite scores.
RocSummary compute_roc(std::span<const double> genuine, std::span<const double> impostor);
RocSummary compute_roc(const ScoreSet& scores);

// EER (linear interpolation at the FAR - FRR sign change) and trapezoidal
// AUC of an already swept curve ordered by decreasing tau.
double eer_from_points(const std::vector<RocPoint>& points);
double auc_from_points(const std::vector<RocPoint>& points);

// "tau,tpr,far" rows, then an "eer,auc" header and its value row. Numbers
// use 17 significant digits so the file round-trips exactly.
std::string format_roc_csv(const RocSummary& roc);
void write_roc_csv(const std::filesystem::path& path, const RocSummary& roc);
// Reads the points and the recorded eer/auc back.
RocSummary read_roc_csv(const std::filesystem::path& path);

// One line per trial: utterance_id,claimed_id,label,score.
std::string format_score_log(const ScoreSet& scores);
void write_score_log(const std::filesystem::path& path, const ScoreSet& scores);
ScoreSet read_score_log(const std::filesystem::path& path);

}  // namespace svkit::protocol

#endif  // SVKIT_PROTOCOL_METRICS_HPP
