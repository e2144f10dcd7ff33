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

#ifndef SVKIT_TESTS_METRIC_ORACLE_HPP
#define SVKIT_TESTS_METRIC_ORACLE_HPP

// Exhaustive-threshold ROC reference: every candidate threshold is scored
// by direct counting, EER is read off the first sign change of FAR - FRR,
// and AUC is the Mann-Whitney pair statistic (ties count one half).

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <vector>

namespace svkit::oracle {

struct RocReference {
  double eer;
  double auc;
};

inline RocReference roc_bruteforce(const std::vector<double>& gen,
                                   const std::vector<double>& imp) {
  std::set<double, std::greater<>> taus(gen.begin(), gen.end());
  taus.insert(imp.begin(), imp.end());
  std::vector<double> thresholds{std::numeric_limits<double>::infinity()};
  thresholds.insert(thresholds.end(), taus.begin(), taus.end());
  thresholds.push_back(-std::numeric_limits<double>::infinity());

  std::vector<double> far, frr;
  for (double t : thresholds) {
    double tp = 0, fa = 0;
    for (double g : gen) tp += g >= t ? 1 : 0;
    for (double i : imp) fa += i >= t ? 1 : 0;
    far.push_back(fa / double(imp.size()));
    frr.push_back(1.0 - tp / double(gen.size()));
  }
  double eer = -1;
  for (std::size_t k = 0; k < thresholds.size(); ++k) {
    const double d = far[k] - frr[k];
    if (d < 0) continue;
    if (d == 0 || k == 0) {
      eer = far[k];
    } else {
      const double dp = far[k - 1] - frr[k - 1];
      const double t = dp / (dp - d);
      eer = far[k - 1] + t * (far[k] - far[k - 1]);
    }
    break;
  }

  double wins = 0;
  for (double g : gen)
    for (double i : imp) wins += g > i ? 1.0 : (g == i ? 0.5 : 0.0);
  return {eer, wins / (double(gen.size()) * double(imp.size()))};
}

}  // namespace svkit::oracle

#endif  // SVKIT_TESTS_METRIC_ORACLE_HPP
