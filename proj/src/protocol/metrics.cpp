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

#include "svkit/protocol/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "svkit/error.hpp"
#include "svkit/io/binary.hpp"

namespace svkit::protocol {

const char* to_string(TrialLabel label) {
  return label == TrialLabel::genuine ? "genuine" : "impostor";
}

TrialLabel parse_trial_label(const std::string& text) {
  if (text == "genuine") return TrialLabel::genuine;
  if (text == "impostor") return TrialLabel::impostor;
  throw ConfigError("trial label must be genuine or impostor, got '" + text + "'");
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> sorted_desc(std::span<const double> v) {
  std::vector<double> out(v.begin(), v.end());
  for (double x : out) {
    if (!std::isfinite(x)) throw NumericError("score set contains a non-finite score");
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& s, const std::string& source, std::size_t line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ParseError(source, line, "not a number: '" + s + "'");
  }
  if (used != s.size()) throw ParseError(source, line, "not a number: '" + s + "'");
  return v;
}

std::vector<std::string> fields_of(const std::string& line) {
  std::vector<std::string> out;
  std::string f;
  std::istringstream in(line);
  while (std::getline(in, f, ',')) out.push_back(f);
  return out;
}

}  // namespace

double eer_from_points(const std::vector<RocPoint>& points) {
  double prev = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double d = points[i].far - (1.0 - points[i].tpr);
    if (d >= 0.0) {
      if (i == 0 || d == 0.0) return points[i].far;
      const double t = -prev / (d - prev);
      return points[i - 1].far + t * (points[i].far - points[i - 1].far);
    }
    prev = d;
  }
  throw MetricPreconditionError("ROC curve never reaches FAR >= FRR");
}

double auc_from_points(const std::vector<RocPoint>& points) {
  double auc = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    auc += (points[i].far - points[i - 1].far) * (points[i].tpr + points[i - 1].tpr) / 2.0;
  }
  return auc;
}

RocSummary compute_roc(std::span<const double> genuine, std::span<const double> impostor) {
  if (genuine.empty() || impostor.empty()) {
    throw MetricPreconditionError("ROC needs at least one genuine and one impostor trial (got " +
                                  std::to_string(genuine.size()) + " genuine, " +
                                  std::to_string(impostor.size()) + " impostor)");
  }
  const auto gen = sorted_desc(genuine);
  const auto imp = sorted_desc(impostor);
  const double P = static_cast<double>(gen.size());
  const double N = static_cast<double>(imp.size());

  RocSummary roc;
  roc.n_genuine = gen.size();
  roc.n_impostor = imp.size();
  roc.points.push_back({kInf, 0.0, 0.0});
  roc.pr.push_back({1.0, 0.0});
  std::size_t g = 0, m = 0;
  while (g < gen.size() || m < imp.size()) {
    const double tau = std::max(g < gen.size() ? gen[g] : -kInf, m < imp.size() ? imp[m] : -kInf);
    while (g < gen.size() && gen[g] >= tau) ++g;
    while (m < imp.size() && imp[m] >= tau) ++m;
    roc.points.push_back({tau, g / P, m / N});
    roc.pr.push_back({static_cast<double>(g) / static_cast<double>(g + m), g / P});
  }
  roc.points.push_back({-kInf, 1.0, 1.0});
  roc.pr.push_back({P / (P + N), 1.0});
  roc.eer = eer_from_points(roc.points);
  roc.auc = auc_from_points(roc.points);
  return roc;
}

RocSummary compute_roc(const ScoreSet& scores) {
  std::vector<double> gen, imp;
  for (const auto& s : scores) {
    (s.trial.label == TrialLabel::genuine ? gen : imp).push_back(s.score);
  }
  return compute_roc(gen, imp);
}

std::string format_roc_csv(const RocSummary& roc) {
  std::string out = "tau,tpr,far\n";
  for (const auto& p : roc.points) {
    out += g17(p.tau) + "," + g17(p.tpr) + "," + g17(p.far) + "\n";
  }
  out += "eer,auc\n" + g17(roc.eer) + "," + g17(roc.auc) + "\n";
  return out;
}

void write_roc_csv(const std::filesystem::path& path, const RocSummary& roc) {
  io::write_file(path, format_roc_csv(roc));
}

RocSummary read_roc_csv(const std::filesystem::path& path) {
  const std::string src = path.string();
  std::istringstream in(io::read_file(path));
  std::string line;
  std::size_t n = 0;
  RocSummary roc;
  if (!std::getline(in, line) || line != "tau,tpr,far") {
    throw ParseError(src, 1, "expected header tau,tpr,far");
  }
  ++n;
  bool summary = false;
  while (std::getline(in, line)) {
    ++n;
    if (line == "eer,auc") {
      summary = true;
      continue;
    }
    const auto f = fields_of(line);
    if (summary) {
      if (f.size() != 2) throw ParseError(src, n, "expected eer,auc values");
      roc.eer = parse_double(f[0], src, n);
      roc.auc = parse_double(f[1], src, n);
      return roc;
    }
    if (f.size() != 3) throw ParseError(src, n, "expected tau,tpr,far");
    roc.points.push_back(
        {parse_double(f[0], src, n), parse_double(f[1], src, n), parse_double(f[2], src, n)});
  }
  throw ParseError(src, n, "missing eer,auc summary");
}

std::string format_score_log(const ScoreSet& scores) {
  std::string out;
  for (const auto& s : scores) {
    out += s.trial.utterance_id + "," + s.trial.claimed_id + "," + to_string(s.trial.label) +
           "," + g17(s.score) + "\n";
  }
  return out;
}

void write_score_log(const std::filesystem::path& path, const ScoreSet& scores) {
  io::write_file(path, format_score_log(scores));
}

ScoreSet read_score_log(const std::filesystem::path& path) {
  const std::string src = path.string();
  std::istringstream in(io::read_file(path));
  std::string line;
  std::size_t n = 0;
  ScoreSet out;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    const auto f = fields_of(line);
    if (f.size() != 4) throw ParseError(src, n, "expected utterance_id,claimed_id,label,score");
    TrialLabel label;
    try {
      label = parse_trial_label(f[2]);
    } catch (const ConfigError& e) {
      throw ParseError(src, n, e.what());
    }
    out.push_back({{f[0], f[1], label}, parse_double(f[3], src, n)});
  }
  return out;
}

}  // namespace svkit::protocol
