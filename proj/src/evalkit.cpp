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

#include "asdkit/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <set>
#include <sstream>

#include "asdkit/error.hpp"

namespace asdkit {

namespace {

void RequireNonEmpty(std::span<const double> normal, std::span<const double> anomaly) {
  Require(!normal.empty(), Errc::kEmptyClass, "metric: no normal scores");
  Require(!anomaly.empty(), Errc::kEmptyClass, "metric: no anomaly scores");
  for (double v : normal) Require(std::isfinite(v), Errc::kInvalidArgument, "metric: non-finite score");
  for (double v : anomaly) Require(std::isfinite(v), Errc::kInvalidArgument, "metric: non-finite score");
}

}  // namespace

double Auc(std::span<const double> normal, std::span<const double> anomaly) {
  RequireNonEmpty(normal, anomaly);
  struct Item {
    double score;
    bool anomalous;
  };
  std::vector<Item> all;
  all.reserve(normal.size() + anomaly.size());
  for (double s : normal) all.push_back({s, false});
  for (double s : anomaly) all.push_back({s, true});
  std::sort(all.begin(), all.end(), [](const Item& a, const Item& b) { return a.score < b.score; });
  // Midranks are multiples of 0.5, so the rank sum is exact in double.
  double rank_sum = 0.0;
  std::size_t i = 0;
  while (i < all.size()) {
    std::size_t j = i;
    while (j < all.size() && all[j].score == all[i].score) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k)
      if (all[k].anomalous) rank_sum += midrank;
    i = j;
  }
  const double m = static_cast<double>(anomaly.size());
  const double n = static_cast<double>(normal.size());
  return (rank_sum - m * (m + 1.0) / 2.0) / (m * n);
}

double PartialAuc(std::span<const double> normal, std::span<const double> anomaly, double p) {
  RequireNonEmpty(normal, anomaly);
  Require(p > 0.0 && p <= 1.0, Errc::kInvalidArgument, "pauc: p must lie in (0, 1]");
  std::vector<double> neg(normal.begin(), normal.end()), pos(anomaly.begin(), anomaly.end());
  std::sort(neg.begin(), neg.end(), std::greater<>());
  std::sort(pos.begin(), pos.end(), std::greater<>());
  const double n = static_cast<double>(neg.size()), m = static_cast<double>(pos.size());

  // Walk thresholds from high to low; each distinct score is one ROC vertex.
  std::size_t a = 0, b = 0;
  double fpr0 = 0.0, tpr0 = 0.0, area = 0.0;
  while (a < neg.size() || b < pos.size()) {
    double t = -INFINITY;
    if (a < neg.size()) t = std::max(t, neg[a]);
    if (b < pos.size()) t = std::max(t, pos[b]);
    while (a < neg.size() && neg[a] == t) ++a;
    while (b < pos.size() && pos[b] == t) ++b;
    const double fpr1 = static_cast<double>(a) / n, tpr1 = static_cast<double>(b) / m;
    if (fpr1 > fpr0) {
      const double hi = std::min(fpr1, p);
      if (hi > fpr0) {
        const double tpr_hi = tpr0 + (tpr1 - tpr0) * (hi - fpr0) / (fpr1 - fpr0);
        area += 0.5 * (tpr0 + tpr_hi) * (hi - fpr0);
      }
    }
    fpr0 = fpr1;
    tpr0 = tpr1;
    if (fpr0 >= p) break;
  }
  return area / p;
}

double HarmonicMean(std::span<const double> values) {
  Require(!values.empty(), Errc::kInvalidArgument, "hmean: no values");
  double inv = 0.0;
  for (double v : values) {
    Require(v >= 0.0, Errc::kInvalidArgument, "hmean: negative value");
    if (v == 0.0) return 0.0;
    inv += 1.0 / v;
  }
  return static_cast<double>(values.size()) / inv;
}

std::string_view ToString(AucGrouping g) {
  return g == AucGrouping::kChallenge ? "challenge" : "same_domain";
}

AucGrouping ParseAucGrouping(std::string_view s) {
  if (s == "challenge") return AucGrouping::kChallenge;
  if (s == "same_domain") return AucGrouping::kSameDomain;
  Fail(Errc::kInvalidArgument, "unknown AUC grouping '" + std::string(s) + "'");
}

std::map<std::string, double> EvalReport::Metrics() const {
  std::map<std::string, double> out;
  for (const auto& [key, v] : auc) out["auc/" + key.first + "/" + std::string(ToString(key.second))] = v;
  for (const auto& [m, v] : pauc) out["pauc/" + m] = v;
  out["official"] = official;
  return out;
}

EvalReport OfficialScore(std::span<const ScoredRecord> records, AucGrouping grouping, double p) {
  EvalReport report;
  report.grouping = grouping;
  report.pauc_p = p;
  struct Bucket {
    std::map<Domain, std::vector<double>> normal, anomaly;
  };
  std::map<std::string, Bucket> buckets;
  for (const auto& r : records) {
    Require(std::isfinite(r.score), Errc::kInvalidArgument, "eval: non-finite score for " + r.clip_id);
    Require(r.condition != Condition::kUnknown, Errc::kInvalidArgument,
            "eval: clip without normal/anomaly label: " + r.clip_id);
    auto& b = buckets[r.machine];
    (r.condition == Condition::kNormal ? b.normal : b.anomaly)[r.domain].push_back(r.score);
  }
  Require(!buckets.empty(), Errc::kEmptyClass, "eval: no scored records");

  std::vector<double> components;
  for (const auto& [machine, b] : buckets) {
    std::vector<double> all_normal, all_anomaly;
    for (const auto& [d, v] : b.normal) all_normal.insert(all_normal.end(), v.begin(), v.end());
    for (const auto& [d, v] : b.anomaly) all_anomaly.insert(all_anomaly.end(), v.begin(), v.end());
    Require(!all_anomaly.empty(), Errc::kEmptyClass, "eval: machine '" + machine + "' has no anomalies");
    for (const auto& [domain, normals] : b.normal) {
      std::vector<double> anomalies = all_anomaly;
      if (grouping == AucGrouping::kSameDomain) {
        auto it = b.anomaly.find(domain);
        Require(it != b.anomaly.end(), Errc::kEmptyClass,
                "eval: no " + std::string(ToString(domain)) + " anomalies for '" + machine + "'");
        anomalies = it->second;
      }
      const double v = Auc(normals, anomalies);
      report.auc[{machine, domain}] = v;
      components.push_back(v);
    }
    const double pv = PartialAuc(all_normal, all_anomaly, p);
    report.pauc[machine] = pv;
    components.push_back(pv);
  }
  report.official = HarmonicMean(components);
  if (report.official == 0.0)
    report.warnings.push_back("official score is 0: at least one component metric is 0");
  return report;
}

std::map<std::string, MeanStd> AggregateTrials(const std::vector<EvalReport>& reports) {
  Require(!reports.empty(), Errc::kInvalidArgument, "aggregate: no reports");
  std::vector<std::map<std::string, double>> metrics;
  for (const auto& r : reports) metrics.push_back(r.Metrics());
  for (const auto& m : metrics) {
    if (m.size() != metrics.front().size() ||
        !std::equal(m.begin(), m.end(), metrics.front().begin(),
                    [](const auto& a, const auto& b) { return a.first == b.first; }))
      Fail(Errc::kKeyMismatch, "aggregate: reports have different metric keys");
  }
  std::map<std::string, MeanStd> out;
  const double n = static_cast<double>(metrics.size());
  for (const auto& [key, _] : metrics.front()) {
    double sum = 0.0;
    for (const auto& m : metrics) sum += m.at(key);
    const double mean = sum / n;
    double sq = 0.0;
    for (const auto& m : metrics) sq += (m.at(key) - mean) * (m.at(key) - mean);
    out[key] = {mean, metrics.size() > 1 ? std::sqrt(sq / (n - 1.0)) : 0.0};
  }
  return out;
}

std::string FormatMeanStd(const MeanStd& v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f (%.2f)", v.mean, v.std);
  return buf;
}

std::string RenderTrialTable(const std::map<std::string, MeanStd>& summary) {
  std::size_t width = 6;
  for (const auto& [k, _] : summary) width = std::max(width, k.size());
  std::ostringstream os;
  os << "metric";
  for (std::size_t i = 6; i < width + 2; ++i) os << ' ';
  os << "mean (std), x100\n";
  for (const auto& [k, v] : summary) {
    os << k;
    for (std::size_t i = k.size(); i < width + 2; ++i) os << ' ';
    os << FormatMeanStd({100.0 * v.mean, 100.0 * v.std}) << '\n';
  }
  return os.str();
}

std::string EvalReportJson(const EvalReport& report, const std::string& config_hash) {
  nlohmann::json j;
  j["config_hash"] = config_hash;
  j["grouping"] = std::string(ToString(report.grouping));
  j["pauc_p"] = report.pauc_p;
  j["official"] = report.official;
  nlohmann::json machines = nlohmann::json::object();
  for (const auto& [machine, v] : report.pauc) machines[machine]["pauc"] = v;
  for (const auto& [key, v] : report.auc) machines[key.first]["auc"][std::string(ToString(key.second))] = v;
  j["machines"] = machines;
  j["warnings"] = report.warnings;
  return j.dump(2);
}

}  // namespace asdkit
