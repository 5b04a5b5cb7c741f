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

// Prints one PASS/FAIL line per acceptance criterion; exits non-zero if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <map>
#include <random>
#include <set>
#include <string>

#include "asdkit/backend.hpp"
#include "asdkit/evalkit.hpp"
#include "asdkit/gmm.hpp"
#include "asdkit/objectives.hpp"
#include "asdkit/pipeline.hpp"
#include "asdkit/pseudolabel.hpp"
#include "asdkit/trainer.hpp"
#include "asdkit/util.hpp"
#include "oracles.hpp"

#ifndef ASDKIT_SOURCE_DIR
#define ASDKIT_SOURCE_DIR "."
#endif

using namespace asdkit;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

void Report(bool ok, const std::string& name, const std::string& detail) {
  std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double Seconds(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string Fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), f, a, b, c);
  return buf;
}

std::vector<double> RandomScores(std::mt19937_64& rng, int n, bool tied, double shift) {
  if (tied) {
    auto v = oracle::TiedScores(rng, n, 2 + static_cast<int>(rng() % 10));
    for (auto& x : v) x += shift * 0.1;
    return v;
  }
  std::normal_distribution<double> g(shift, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

void MetricOracles() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const int n = 1 + static_cast<int>(rng() % 200), m = 1 + static_cast<int>(rng() % 200);
    const bool tied = t % 2 == 0;
    const auto normal = RandomScores(rng, n, tied, 0.0), anomaly = RandomScores(rng, m, tied, 0.8);
    worst = std::max(worst, std::abs(Auc(normal, anomaly) - oracle::PairCountAuc(normal, anomaly)));
    worst = std::max(worst, std::abs(PartialAuc(normal, anomaly, 0.1) - oracle::TrapezoidPauc(normal, anomaly, 0.1)));
  }
  const double secs = Seconds(t0);
  Report(worst <= 1e-9 && secs < 30.0, "metric-oracle-equivalence",
         Fmt("1000 instances, max |diff| = %.3g, %.2f s", worst, secs));
}

void PaucAtOne() {
  std::mt19937_64 rng(102);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int n = 1 + static_cast<int>(rng() % 200), m = 1 + static_cast<int>(rng() % 200);
    const auto normal = RandomScores(rng, n, t % 2 == 0, 0.0), anomaly = RandomScores(rng, m, t % 2 == 0, 0.5);
    worst = std::max(worst, std::abs(PartialAuc(normal, anomaly, 1.0) - Auc(normal, anomaly)));
  }
  Report(worst <= 1e-12, "pauc-at-one-equals-auc", Fmt("100 instances, max |diff| = %.3g", worst));
}

void ParameterCounts() {
  Rng rng(103);
  int bad = 0, total = 0;
  for (int d : {64, 128})
    for (int c : {4, 10})
      for (int m : {2, 3}) {
        ++total;
        const auto fx = ObjectiveHeads::Create(LossMode::kFeatEx, m, d, c, 1, rng);
        const auto sub = ObjectiveHeads::Create(LossMode::kSubspace, m, d, c, 1, rng);
        bad += fx.AuxParameterCount() != static_cast<std::size_t>(d * c * m * (m + 1));
        bad += sub.AuxParameterCount() != static_cast<std::size_t>(d * c * m);
      }
  Report(bad == 0, "parameter-count-identities", std::to_string(total) + " (D, C, M) triples, " +
                                                      std::to_string(bad) + " mismatches");
}

void FeatExLabels() {
  Rng rng(104);
  int bad = 0;
  for (int t = 0; t < 10000; ++t) {
    const int c = 2 + static_cast<int>(UniformIndex(rng, 9)), n = 2 + static_cast<int>(UniformIndex(rng, 6));
    Eigen::MatrixXd labels = Eigen::MatrixXd::Zero(n, c);
    std::vector<int> cls(n);
    for (int k = 0; k < n; ++k) labels(k, cls[k] = static_cast<int>(UniformIndex(rng, c))) = 1.0;
    const int i = static_cast<int>(UniformIndex(rng, n));
    const int j = t % 2 == 0 ? i : static_cast<int>(UniformIndex(rng, n));
    const Eigen::VectorXd l = FeatExLabel({i, j}, labels);
    Eigen::VectorXd expect = Eigen::VectorXd::Zero(3 * c);
    if (i == j) {
      expect[cls[i]] = 1.0;
    } else {
      expect[c + cls[i]] = 0.5;
      expect[2 * c + cls[j]] = 0.5;
    }
    bad += l.size() != expect.size() || l != expect || std::abs(l.sum() - 1.0) > 1e-15;
  }
  Report(bad == 0, "featex-label-construction", "10000 cases, " + std::to_string(bad) + " wrong");
}

void ScacGradients() {
  Rng rng(105);
  double worst_grad = 0.0, worst_scale = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int c = 2 + static_cast<int>(UniformIndex(rng, 3)), s = 1 + static_cast<int>(UniformIndex(rng, 2));
    const int d = 2 + static_cast<int>(UniformIndex(rng, 7));
    const AngularHead h = AngularHead::Create(c, s, d, true, rng);
    Eigen::VectorXd z(d), target = Eigen::VectorXd::Zero(c);
    for (int k = 0; k < d; ++k) z[k] = Gaussian(rng);
    target[UniformIndex(rng, c)] = 1.0;
    const ScacResult r = ScacLoss(z, target, h, true);
    std::vector<std::vector<double>> rows(h.centers.rows(), std::vector<double>(d));
    for (Eigen::Index q = 0; q < h.centers.rows(); ++q)
      for (int k = 0; k < d; ++k) rows[q][k] = h.centers(q, k);
    const std::vector<double> tv(target.data(), target.data() + c);
    auto f = [&](const std::vector<double>& v) { return oracle::ScacLoss(v, tv, rows, s, h.scale); };
    const std::vector<double> zv(z.data(), z.data() + d);
    Eigen::VectorXd num(d);
    for (int k = 0; k < d; ++k) num[k] = oracle::CentralDifference(f, zv, k, 1e-6);
    const Eigen::VectorXd ana = r.d_embeddings.row(0).transpose();
    worst_grad = std::max(worst_grad, (ana - num).norm() / std::max({ana.norm(), num.norm(), 1e-8}));
    for (double a : {1e-3, 0.37, 25.0, 1e4})
      worst_scale = std::max(worst_scale, std::abs(ScacLoss(Eigen::VectorXd(a * z), target, h).loss - r.loss));
  }
  Report(worst_grad <= 1e-4 && worst_scale <= 1e-9, "scac-gradient-check",
         Fmt("100 instances, max rel err = %.3g, max scale drift = %.3g", worst_grad, worst_scale));
}

void FixedHeads() {
  SpectralConfig sc;
  sc.dft_sizes = {256};
  sc.spectrum_seconds = 1.0;
  ArchitectureConfig arch;
  arch.embedding_dim = 8;
  arch.spectrum_stack = {{4, 64, 16}};
  arch.spectrogram_stack = {{4, 3, 2}};
  std::mt19937_64 rng(106);
  std::normal_distribution<float> g;
  std::vector<FeatureSet> feats;
  TrainingSet data;
  for (int i = 0; i < 16; ++i) {
    std::vector<float> x(16000);
    for (std::size_t t = 0; t < x.size(); ++t)
      x[t] = static_cast<float>(std::sin(0.05 * (1 + i % 2) * static_cast<double>(t))) + 0.3f * g(rng);
    feats.push_back(ExtractFeatures(x, sc));
    data.labels.push_back(i % 2 ? "a" : "b");
  }
  for (const auto& f : feats) data.features.push_back(&f);
  bool all_ok = true;
  std::string detail;
  for (LossMode mode : {LossMode::kFeatEx, LossMode::kSubspace}) {
    TrainConfig cfg;
    cfg.epochs = 50;
    cfg.batch_size = 8;
    cfg.loss_mode = mode;
    cfg.subclusters = 2;
    cfg.score_checkpoint_epochs = {50};
    Eigen::MatrixXd first;
    int steps = 0;
    bool same = true;
    TrainOptions opt;
    opt.on_step = [&](const ObjectiveHeads& h) {
      if (steps++ == 0) first = h.cat.centers;
      same = same && h.cat.centers.size() == first.size() &&
             std::memcmp(h.cat.centers.data(), first.data(), sizeof(double) * first.size()) == 0;
    };
    const TrainResult r = Train(MakeModelSpec(sc, 16000, arch), data, cfg, opt);
    same = same && std::memcmp(r.heads.cat.centers.data(), first.data(), sizeof(double) * first.size()) == 0;
    all_ok = all_ok && same && steps >= 100;
    detail += std::string(ToString(mode)) + ": " + std::to_string(steps) + " steps " + (same ? "identical" : "CHANGED") + "; ";
  }
  Report(all_ok, "fixed-center-heads-unchanged", detail.substr(0, detail.size() - 2));
}

void TripletDistribution() {
  Rng rng(107);
  SpectrogramPool pool;
  for (std::string m : {"a", "b", "c"})
    for (int i = 0; i < 6; ++i) {
      Spectrogram s{20, 30, std::vector<float>(600)};
      for (auto& v : s.values) v = static_cast<float>(std::abs(Gaussian(rng)) * (m == "a" ? 1.0 : 3.0));
      pool.Add(m, std::move(s));
    }
  const TripletConfig cfg;
  const int draws = 10000;
  int clean = 0;
  std::map<NegativeKind, int> kinds;
  double err_sum = 0.0;
  int err_n = 0;
  bool in_range = true;
  auto realized = [](const Spectrogram& base, const Spectrogram& mixed) {
    Spectrogram noise = mixed;
    for (std::size_t k = 0; k < noise.values.size(); ++k) noise.values[k] -= base.values[k];
    return 10.0 * std::log10(MeanPower(base) / MeanPower(noise));
  };
  auto record = [&](double drawn, double got) {
    in_range = in_range && drawn >= cfg.snr_low_db && drawn < cfg.snr_high_db;
    err_sum += std::abs(got - drawn);
    ++err_n;
  };
  for (int t = 0; t < draws; ++t) {
    const Triplet tr = SampleTriplet(pool, cfg, rng);
    const auto& p = tr.provenance;
    const Spectrogram& x = pool.items[p.anchor_index];
    clean += !p.anchor_noised;
    ++kinds[p.negative_kind];
    if (p.anchor_noised) record(p.anchor_snr_db, realized(x, tr.anchor));
    record(p.positive_snr_db, realized(x, tr.positive));
    if (p.negative_kind == NegativeKind::kNoiseResize)
      record(p.negative_snr_db, realized(Resize(x, p.resize_scale), tr.negative));
    if (p.negative_kind == NegativeKind::kNoiseOther)
      record(p.negative_snr_db, realized(pool.items[p.other_index], tr.negative));
  }
  const double clean_frac = static_cast<double>(clean) / draws;
  bool ok = std::abs(clean_frac - 0.5) <= 0.02 && in_range && err_sum / err_n < 0.5;
  std::string fr;
  for (auto k : {NegativeKind::kResize, NegativeKind::kNoiseResize, NegativeKind::kOther, NegativeKind::kNoiseOther}) {
    const double f = static_cast<double>(kinds[k]) / draws;
    ok = ok && std::abs(f - 0.25) <= 0.02;
    fr += Fmt("%.3f ", f);
  }
  Report(ok, "triplet-sampler-distribution",
         Fmt("clean anchors %.3f, mean |snr err| %.2g dB, ", clean_frac, err_sum / err_n) + "negatives " + fr +
             (in_range ? "snr in range" : "snr OUT OF RANGE"));
}

Eigen::MatrixXd Blobs(Rng& rng, int blobs, int per, double sep) {
  Eigen::MatrixXd pts(blobs * per, 2);
  for (int b = 0; b < blobs; ++b)
    for (int i = 0; i < per; ++i) {
      pts(b * per + i, 0) = sep * std::cos(2.0 * M_PI * b / 3.0) + Gaussian(rng);
      pts(b * per + i, 1) = sep * std::sin(2.0 * M_PI * b / 3.0) + Gaussian(rng);
    }
  return pts;
}

void GmmSelection() {
  const auto t0 = Clock::now();
  int three = 0, one = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(MixSeed(108, seed));
    // Pairwise centre distance is 10 sigma.
    three += ClusterGmmBic(Blobs(rng, 3, 50, 10.0 / std::sqrt(3.0)), 16, seed).k_chosen == 3;
    one += ClusterGmmBic(Blobs(rng, 1, 150, 0.0), 16, seed).k_chosen == 1;
  }
  const double secs = Seconds(t0);
  Report(three >= 95 && one >= 95 && secs < 120.0, "gmm-bic-selection",
         Fmt("k=3 in %.0f/100, k=1 in %.0f/100, %.1f s", three, one, secs));
}

void BackendContracts() {
  MachineBackend mb;
  mb.source_centroids = Eigen::MatrixXd(2, 2);
  mb.source_centroids << 1.0, 0.0, 10.0, 9.0;
  mb.target_refs = Eigen::MatrixXd(1, 2);
  mb.target_refs << 0.0, 3.0;
  const double worked = ScoreEmbedding(Eigen::Vector2d(0.0, 0.0), mb, Metric::kEuclidean);

  Rng rng(109);
  std::map<std::string, MachineTrainEmbeddings> train;
  Eigen::MatrixXd src(200, 6), tgt(10, 6);
  for (Eigen::Index i = 0; i < src.size(); ++i) src.data()[i] = Gaussian(rng);
  for (Eigen::Index i = 0; i < tgt.size(); ++i) tgt.data()[i] = Gaussian(rng) + 2.0;
  train["m"] = {src, tgt};
  double self = 0.0;
  int violations = 0;
  for (Metric metric : {Metric::kEuclidean, Metric::kCosine}) {
    const BackendModel model = FitBackend(train, {metric, 16, 3}, 1);
    for (Eigen::Index i = 0; i < tgt.rows(); ++i) self = std::max(self, model.Score("m", tgt.row(i).transpose()));
    if (metric != Metric::kEuclidean) continue;
    for (int q = 0; q < 1000; ++q) {
      Eigen::VectorXd a(6), b(6);
      for (int k = 0; k < 6; ++k) a[k] = 3.0 * Gaussian(rng), b[k] = a[k] + Gaussian(rng) * Uniform(rng, 0.0, 2.0);
      violations += std::abs(model.Score("m", a) - model.Score("m", b)) > (a - b).norm() + 1e-12;
    }
  }
  Report(worked == 1.0 && self == 0.0 && violations == 0, "backend-contracts",
         Fmt("worked example %.17g, max target self-score %.3g, Lipschitz violations %.0f/1000", worked, self,
             violations));
}

struct DeskRun {
  std::vector<double> official;
  std::vector<std::map<std::string, double>> ari;  // per seed, machine -> ARI on source train clips
  double seconds = 0.0;
};

DeskRun RunDesk(const ExperimentConfig& base, LabelMethod method) {
  const auto t0 = Clock::now();
  ExperimentConfig cfg = base;
  cfg.method = method;
  const LoadedCorpus corpus = LoadExperimentCorpus(cfg);
  const ClipFeatures features = ExtractAllFeatures(corpus, cfg.spectral, cfg.workers);
  DeskRun run;
  for (std::uint64_t seed : cfg.trial_seeds) {
    const TrialOutcome out = RunTrial(cfg, corpus, features, seed, {});
    run.official.push_back(out.report.official);
    std::map<std::string, double> ari;
    if (out.labels) {
      for (const auto& g : out.labels->groups) {
        if (g.domain != Domain::kSource) continue;
        std::map<std::string, int> attr_id;
        std::vector<int> truth;
        for (const auto& id : g.clip_ids) {
          const std::string a = corpus.manifest.Find(id).attribute.value_or("");
          truth.push_back(attr_id.try_emplace(a, static_cast<int>(attr_id.size())).first->second);
        }
        ari[g.machine] = oracle::Ari(g.cluster_ids, truth);
      }
    }
    run.ari.push_back(ari);
  }
  run.seconds = Seconds(t0);
  return run;
}

void EndToEnd() {
  const ExperimentConfig base = ExperimentConfig::Load(std::string(ASDKIT_SOURCE_DIR) + "/configs/desk.json");
  const DeskRun cls = RunDesk(base, LabelMethod::kClass);
  bool ok = cls.seconds < 900.0;
  std::string detail;
  for (std::size_t s = 0; s < cls.official.size(); ++s) {
    detail += "seed " + std::to_string(base.trial_seeds[s]) + Fmt(": official %.4f, ari", cls.official[s]);
    ok = ok && cls.official[s] >= 0.80 && cls.ari[s].size() == static_cast<std::size_t>(base.synthetic.machines);
    for (const auto& [m, a] : cls.ari[s]) {
      detail += " " + m + Fmt("=%.2f", a);
      ok = ok && a >= 0.5;
    }
    detail += "; ";
  }
  detail += Fmt("%.1f s", cls.seconds);
  Report(ok, "end-to-end-desk", detail);

  const DeskRun none = RunDesk(base, LabelMethod::kNone);
  double mc = 0.0, mn = 0.0;
  for (double v : cls.official) mc += v / static_cast<double>(cls.official.size());
  for (double v : none.official) mn += v / static_cast<double>(none.official.size());
  std::string per;
  for (std::size_t s = 0; s < none.official.size(); ++s) per += Fmt(" %.4f/%.4f", cls.official[s], none.official[s]);
  Report(mc - mn >= 0.05, "class-beats-none",
         Fmt("mean class %.4f vs none %.4f (diff %.4f); per seed class/none:", mc, mn, mc - mn) + per);
}

void TrialFormat() {
  EvalReport a, b;
  a.official = 66.0;
  b.official = 68.0;
  const std::string cell = FormatMeanStd(AggregateTrials({a, b}).at("official"));
  Report(cell == "67.00 (1.41)", "trial-aggregation-format", "{66, 68} -> \"" + cell + "\"");
}

}  // namespace

int main(int argc, char** argv) {
  const std::string only = argc > 1 ? argv[1] : "";
  const std::vector<std::pair<std::string, void (*)()>> groups{
      {"metrics", MetricOracles},  {"pauc", PaucAtOne},       {"params", ParameterCounts},
      {"featex", FeatExLabels},    {"scac", ScacGradients},   {"heads", FixedHeads},
      {"triplet", TripletDistribution}, {"gmm", GmmSelection}, {"backend", BackendContracts},
      {"desk", EndToEnd},          {"format", TrialFormat}};
  const auto t0 = Clock::now();
  try {
    for (const auto& [name, fn] : groups)
      if (only.empty() || name == only) fn();
  } catch (const std::exception& e) {
    std::printf("FAIL unexpected-exception: %s\n", e.what());
    return 1;
  }
  std::printf("%d criteria failed, %.1f s total\n", failures, Seconds(t0));
  return failures == 0 ? 0 : 1;
}
