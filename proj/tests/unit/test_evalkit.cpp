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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "asdkit/evalkit.hpp"
#include "asdkit/error.hpp"
#include "oracles.hpp"

using namespace asdkit;

namespace {

std::vector<double> Noisy(std::mt19937_64& rng, int n, double shift) {
  std::normal_distribution<double> g(shift, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

std::vector<ScoredRecord> ToyRecords(std::mt19937_64& rng) {
  std::vector<ScoredRecord> recs;
  std::normal_distribution<double> g(0.0, 1.0);
  int id = 0;
  for (std::string m : {"fan", "pump"})
    for (Domain d : {Domain::kSource, Domain::kTarget})
      for (Condition c : {Condition::kNormal, Condition::kAnomaly})
        for (int i = 0; i < 15; ++i)
          recs.push_back({"clip" + std::to_string(id++), m, d, c,
                          g(rng) + (c == Condition::kAnomaly ? 1.0 : 0.0) + (d == Domain::kTarget ? 0.5 : 0.0)});
  return recs;
}

}  // namespace

TEST_CASE("auc matches the pair-count oracle, with and without ties") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 40), m = 1 + static_cast<int>(rng() % 40);
    const bool tied = trial % 2 == 0;
    const auto normal = tied ? oracle::TiedScores(rng, n, 5) : Noisy(rng, n, 0.0);
    const auto anomaly = tied ? oracle::TiedScores(rng, m, 5) : Noisy(rng, m, 0.7);
    CHECK(Auc(normal, anomaly) == doctest::Approx(oracle::PairCountAuc(normal, anomaly)).epsilon(1e-12));
  }
}

TEST_CASE("partial auc matches the trapezoid oracle") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 60), m = 1 + static_cast<int>(rng() % 30);
    const bool tied = trial % 2 == 0;
    const auto normal = tied ? oracle::TiedScores(rng, n, 4) : Noisy(rng, n, 0.0);
    const auto anomaly = tied ? oracle::TiedScores(rng, m, 4) : Noisy(rng, m, 1.0);
    for (double p : {0.05, 0.1, 0.37, 1.0})
      CHECK(PartialAuc(normal, anomaly, p) ==
            doctest::Approx(oracle::TrapezoidPauc(normal, anomaly, p)).epsilon(1e-12));
    CHECK(PartialAuc(normal, anomaly, 1.0) == doctest::Approx(Auc(normal, anomaly)).epsilon(1e-12));
  }
}

TEST_CASE("metrics are invariant under strictly increasing transforms") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    auto normal = oracle::TiedScores(rng, 30, 7), anomaly = Noisy(rng, 20, 0.5);
    auto f = [](double x) { return std::exp(3.0 * x) + 2.0; };
    std::vector<double> tn, ta;
    for (double x : normal) tn.push_back(f(x));
    for (double x : anomaly) ta.push_back(f(x));
    CHECK(Auc(tn, ta) == doctest::Approx(Auc(normal, anomaly)).epsilon(1e-12));
    CHECK(PartialAuc(tn, ta) == doctest::Approx(PartialAuc(normal, anomaly)).epsilon(1e-12));
  }
}

TEST_CASE("metric bounds and simple cases") {
  const std::vector<double> lo{0.0, 1.0}, hi{2.0, 3.0}, same{1.0, 1.0};
  CHECK(Auc(lo, hi) == 1.0);
  CHECK(Auc(hi, lo) == 0.0);
  CHECK(Auc(same, same) == 0.5);
  CHECK(PartialAuc(lo, hi, 0.1) == 1.0);
  CHECK(PartialAuc(same, same, 1.0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(Auc({}, hi), Error);
  CHECK_THROWS_AS(PartialAuc(lo, hi, 0.0), Error);
  CHECK_THROWS_AS(PartialAuc(lo, hi, 1.5), Error);
  const std::vector<double> nan{std::nan("")};
  CHECK_THROWS_AS(Auc(nan, hi), Error);
}

TEST_CASE("harmonic mean") {
  CHECK(HarmonicMean(std::vector<double>{0.4, 0.6}) == doctest::Approx(0.48).epsilon(1e-12));
  CHECK(HarmonicMean(std::vector<double>{0.8, 0.0, 0.9}) == 0.0);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> v(1 + rng() % 10);
    for (auto& x : v) x = u(rng);
    const double h = HarmonicMean(v);
    CHECK(h == doctest::Approx(oracle::HarmonicMean(v)).epsilon(1e-12));
    CHECK(h <= *std::max_element(v.begin(), v.end()) + 1e-12);
    CHECK(h >= *std::min_element(v.begin(), v.end()) - 1e-12);
  }
  CHECK_THROWS_AS(HarmonicMean(std::vector<double>{}), Error);
}

TEST_CASE("official score is the harmonic mean of per-domain aucs and per-machine paucs") {
  std::mt19937_64 rng(5);
  const auto recs = ToyRecords(rng);
  for (AucGrouping grouping : {AucGrouping::kChallenge, AucGrouping::kSameDomain}) {
    const EvalReport r = OfficialScore(recs, grouping);
    std::vector<double> comps;
    for (std::string m : {"fan", "pump"}) {
      std::vector<double> all_n, all_a;
      for (const auto& x : recs)
        if (x.machine == m) (x.condition == Condition::kNormal ? all_n : all_a).push_back(x.score);
      for (Domain d : {Domain::kSource, Domain::kTarget}) {
        std::vector<double> n, a;
        for (const auto& x : recs) {
          if (x.machine != m) continue;
          if (x.condition == Condition::kNormal && x.domain == d) n.push_back(x.score);
          if (x.condition == Condition::kAnomaly && (grouping == AucGrouping::kChallenge || x.domain == d))
            a.push_back(x.score);
        }
        const double v = oracle::PairCountAuc(n, a);
        CHECK(r.auc.at({m, d}) == doctest::Approx(v).epsilon(1e-12));
        comps.push_back(v);
      }
      const double pv = oracle::TrapezoidPauc(all_n, all_a, 0.1);
      CHECK(r.pauc.at(m) == doctest::Approx(pv).epsilon(1e-12));
      comps.push_back(pv);
    }
    CHECK(r.official == doctest::Approx(oracle::HarmonicMean(comps)).epsilon(1e-12));
    CHECK(r.Metrics().size() == 7);
  }
}

TEST_CASE("official score ignores record order") {
  std::mt19937_64 rng(6);
  auto recs = ToyRecords(rng);
  const double base = OfficialScore(recs).official;
  for (int i = 0; i < 10; ++i) {
    std::shuffle(recs.begin(), recs.end(), rng);
    CHECK(OfficialScore(recs).official == base);
  }
}

TEST_CASE("official score warns when a component is zero") {
  std::vector<ScoredRecord> recs{{"a", "fan", Domain::kSource, Condition::kNormal, 5.0},
                                 {"b", "fan", Domain::kSource, Condition::kAnomaly, 1.0}};
  const EvalReport r = OfficialScore(recs);
  CHECK(r.official == 0.0);
  CHECK(r.warnings.size() == 1);
}

TEST_CASE("official score errors") {
  std::vector<ScoredRecord> no_anom{{"a", "fan", Domain::kSource, Condition::kNormal, 1.0}};
  CHECK_THROWS_AS(OfficialScore(no_anom), Error);
  std::vector<ScoredRecord> unknown{{"a", "fan", Domain::kSource, Condition::kUnknown, 1.0}};
  CHECK_THROWS_AS(OfficialScore(unknown), Error);
  std::vector<ScoredRecord> cross{{"a", "fan", Domain::kTarget, Condition::kNormal, 1.0},
                                  {"b", "fan", Domain::kSource, Condition::kAnomaly, 2.0}};
  CHECK(OfficialScore(cross).official == 1.0);
  CHECK_THROWS_AS(OfficialScore(cross, AucGrouping::kSameDomain), Error);
}

TEST_CASE("trial aggregation") {
  EvalReport a, b;
  a.official = 0.66;
  b.official = 0.68;
  a.pauc["fan"] = 0.5;
  b.pauc["fan"] = 0.7;
  const auto s = AggregateTrials({a, b});
  CHECK(s.at("official").mean == doctest::Approx(0.67));
  CHECK(s.at("official").std == doctest::Approx(std::sqrt(2.0) / 100.0));
  CHECK(FormatMeanStd({67.0, std::sqrt(2.0)}) == "67.00 (1.41)");
  CHECK(FormatMeanStd({100.0 * s.at("official").mean, 100.0 * s.at("official").std}) == "67.00 (1.41)");
  CHECK(AggregateTrials({a}).at("official").std == 0.0);

  const auto ab = AggregateTrials({a, b}), ba = AggregateTrials({b, a});
  for (const auto& [k, v] : ab) {
    CHECK(ba.at(k).mean == doctest::Approx(v.mean));
    CHECK(ba.at(k).std == doctest::Approx(v.std));
  }

  EvalReport c = b;
  c.pauc["pump"] = 0.1;
  try {
    AggregateTrials({a, c});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kKeyMismatch);
  }
  CHECK(RenderTrialTable(s).find("67.00 (1.41)") != std::string::npos);
}

TEST_CASE("grouping names round trip") {
  for (AucGrouping g : {AucGrouping::kChallenge, AucGrouping::kSameDomain})
    CHECK(ParseAucGrouping(ToString(g)) == g);
  CHECK_THROWS_AS(ParseAucGrouping("other"), Error);
}
