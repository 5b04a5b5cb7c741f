// Copyright (c) 2026 The asdkit Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ASDKIT_EVALKIT_HPP_
#define ASDKIT_EVALKIT_HPP_

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "asdkit/corpus.hpp"

namespace asdkit {

/// Mann-Whitney AUC with midrank ties: P(a > n) + 0.5 P(a == n).
double Auc(std::span<const double> normal, std::span<const double> anomaly);

/// Area under the ROC curve for FPR in [0, p], divided by p. Tied scores
/// form diagonal ROC segments, so PartialAuc(.., 1) == Auc(..).
double PartialAuc(std::span<const double> normal, std::span<const double> anomaly, double p = 0.1);

double HarmonicMean(std::span<const double> values);

struct ScoredRecord {
  std::string clip_id;
  std::string machine;
  Domain domain = Domain::kSource;
  Condition condition = Condition::kNormal;
  double score = 0.0;
};

/// Which anomalies enter a domain's AUC. kChallenge: every anomaly of the
/// machine. kSameDomain: only anomalies recorded in that domain.
enum class AucGrouping { kChallenge, kSameDomain };

std::string_view ToString(AucGrouping g);
AucGrouping ParseAucGrouping(std::string_view s);

struct EvalReport {
  std::map<std::pair<std::string, Domain>, double> auc;
  std::map<std::string, double> pauc;
  double official = 0.0;
  double pauc_p = 0.1;
  AucGrouping grouping = AucGrouping::kChallenge;
  std::vector<std::string> warnings;

  /// Flat metric view: "auc/<machine>/<domain>", "pauc/<machine>", "official".
  std::map<std::string, double> Metrics() const;
};

EvalReport OfficialScore(std::span<const ScoredRecord> records,
                         AucGrouping grouping = AucGrouping::kChallenge, double p = 0.1);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (n - 1); 0 for one trial
};

/// Per-metric mean and std across trials; metric keys must agree.
std::map<std::string, MeanStd> AggregateTrials(const std::vector<EvalReport>& reports);

/// "mean (std)" with two decimals, e.g. "67.00 (1.41)". Values are printed
/// as given; scale before calling.
std::string FormatMeanStd(const MeanStd& v);

/// Text table of aggregated metrics scaled by 100.
std::string RenderTrialTable(const std::map<std::string, MeanStd>& summary);

/// JSON document with the metric tree (values in [0, 1]).
std::string EvalReportJson(const EvalReport& report, const std::string& config_hash);

}  // namespace asdkit

#endif  // ASDKIT_EVALKIT_HPP_
