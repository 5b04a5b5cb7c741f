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

#include "asdkit/kmeans.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "asdkit/error.hpp"

namespace asdkit {

int CountDistinctRows(const Eigen::MatrixXd& points) {
  std::set<std::vector<double>> rows;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    Eigen::RowVectorXd r = points.row(i);
    rows.insert(std::vector<double>(r.data(), r.data() + r.size()));
  }
  return static_cast<int>(rows.size());
}

KMeansResult KMeansOnce(const Eigen::MatrixXd& points, int k, Rng& rng, int max_iter) {
  const Eigen::Index n = points.rows();
  Require(k >= 1 && k <= n, Errc::kInvalidArgument, "kmeans: need 1 <= k <= n");
  KMeansResult r;
  r.centers.resize(k, points.cols());

  // k-means++ seeding
  Eigen::VectorXd d2 = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  std::size_t first = UniformIndex(rng, static_cast<std::size_t>(n));
  r.centers.row(0) = points.row(static_cast<Eigen::Index>(first));
  for (int c = 1; c < k; ++c) {
    for (Eigen::Index i = 0; i < n; ++i)
      d2[i] = std::min(d2[i], (points.row(i) - r.centers.row(c - 1)).squaredNorm());
    const double total = d2.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      double u = Uniform(rng, 0.0, total), acc = 0.0;
      pick = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += d2[i];
        if (u < acc && d2[i] > 0.0) {
          pick = i;
          break;
        }
      }
      while (d2[pick] == 0.0 && pick > 0) --pick;
    } else {
      pick = static_cast<Eigen::Index>(UniformIndex(rng, static_cast<std::size_t>(n)));
    }
    r.centers.row(c) = points.row(pick);
  }

  r.assignments.assign(n, -1);
  for (int iter = 0; iter < max_iter; ++iter) {
    bool changed = false;
    r.inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = (points.row(i) - r.centers.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (r.assignments[i] != best) changed = true;
      r.assignments[i] = best;
      r.inertia += best_d;
    }
    if (!changed && iter > 0) break;
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, points.cols());
    std::vector<int> counts(k, 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(r.assignments[i]) += points.row(i);
      ++counts[r.assignments[i]];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        r.centers.row(c) = sums.row(c) / counts[c];
      } else {
        // Re-seed an empty cluster at the point farthest from its centre.
        Eigen::Index far = 0;
        double far_d = -1.0;
        for (Eigen::Index i = 0; i < n; ++i) {
          const double d = (points.row(i) - r.centers.row(r.assignments[i])).squaredNorm();
          if (d > far_d) {
            far_d = d;
            far = i;
          }
        }
        r.centers.row(c) = points.row(far);
      }
    }
  }
  return r;
}

KMeansResult KMeans(const Eigen::MatrixXd& points, int k, int restarts, std::uint64_t seed,
                    int max_iter) {
  Require(restarts >= 1, Errc::kInvalidArgument, "kmeans: restarts must be >= 1");
  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    Rng rng(MixSeed(seed, static_cast<std::uint64_t>(r)));
    KMeansResult cur = KMeansOnce(points, k, rng, max_iter);
    if (cur.inertia < best.inertia) best = std::move(cur);
  }
  return best;
}

}  // namespace asdkit
