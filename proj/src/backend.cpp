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

#include "asdkit/backend.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "asdkit/error.hpp"
#include "asdkit/kmeans.hpp"
#include "asdkit/util.hpp"

namespace asdkit {

std::string_view ToString(Metric m) { return m == Metric::kCosine ? "cosine" : "euclidean"; }

Metric ParseMetric(std::string_view s) {
  if (s == "cosine") return Metric::kCosine;
  if (s == "euclidean") return Metric::kEuclidean;
  Fail(Errc::kInvalidArgument, "unknown metric '" + std::string(s) + "'");
}

double Distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b, Metric metric) {
  if (metric == Metric::kEuclidean) return (a - b).norm();
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 1.0;
  // 1 - cos as half the squared chord; exactly 0 for identical inputs.
  return 0.5 * (a / na - b / nb).squaredNorm();
}

namespace {

Eigen::MatrixXd NormalizeRows(const Eigen::MatrixXd& m) {
  Eigen::MatrixXd out = m;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double n = out.row(i).norm();
    if (n > 0.0) out.row(i) /= n;
  }
  return out;
}

}  // namespace

BackendModel FitBackend(const std::map<std::string, MachineTrainEmbeddings>& train,
                        const BackendConfig& cfg, std::uint64_t seed) {
  Require(cfg.source_clusters >= 1 && cfg.restarts >= 1, Errc::kInvalidArgument,
          "backend: clusters and restarts must be >= 1");
  BackendModel model;
  model.metric = cfg.metric;
  std::uint64_t salt = 0;
  for (const auto& [machine, emb] : train) {
    Require(emb.source.rows() >= 1, Errc::kEmptySource,
            "backend: machine '" + machine + "' has no source-domain training embeddings");
    if (model.dim == 0) model.dim = static_cast<int>(emb.source.cols());
    Require(emb.source.cols() == model.dim && (emb.target.rows() == 0 || emb.target.cols() == model.dim),
            Errc::kDimMismatch, "backend: inconsistent embedding dimension for '" + machine + "'");
    // Spherical k-means for the cosine metric: cluster directions.
    const Eigen::MatrixXd pts = cfg.metric == Metric::kCosine ? NormalizeRows(emb.source) : emb.source;
    const int distinct = CountDistinctRows(pts);
    int k = cfg.source_clusters;
    if (distinct < k) {
      model.warnings.push_back("backend: machine '" + machine + "' has only " + std::to_string(distinct) +
                               " distinct source points; using " + std::to_string(distinct) + " centroids");
      k = distinct;
    }
    MachineBackend mb;
    mb.source_centroids = KMeans(pts, k, cfg.restarts, MixSeed(seed, salt++)).centers;
    mb.target_refs = emb.target;
    model.machines.emplace(machine, std::move(mb));
  }
  return model;
}

double ScoreEmbedding(const Eigen::VectorXd& embedding, const MachineBackend& backend, Metric metric) {
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < backend.source_centroids.rows(); ++i)
    best = std::min(best, Distance(embedding, backend.source_centroids.row(i).transpose(), metric));
  for (Eigen::Index i = 0; i < backend.target_refs.rows(); ++i)
    best = std::min(best, Distance(embedding, backend.target_refs.row(i).transpose(), metric));
  return best;
}

double BackendModel::Score(const std::string& machine, const Eigen::VectorXd& embedding) const {
  auto it = machines.find(machine);
  if (it == machines.end()) Fail(Errc::kNotFitted, "backend: no model for machine '" + machine + "'");
  Require(embedding.size() == dim, Errc::kDimMismatch,
          "backend: query dim " + std::to_string(embedding.size()) + " vs model dim " + std::to_string(dim));
  return ScoreEmbedding(embedding, it->second, metric);
}

}  // namespace asdkit
