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

#ifndef ASDKIT_KMEANS_HPP_
#define ASDKIT_KMEANS_HPP_

#include <Eigen/Dense>
#include <vector>

#include "asdkit/util.hpp"

namespace asdkit {

struct KMeansResult {
  Eigen::MatrixXd centers;  // k x dim
  std::vector<int> assignments;
  double inertia = 0.0;
};

/// k-means++ seeding followed by Lloyd iterations. The caller guarantees
/// k <= number of distinct rows.
KMeansResult KMeansOnce(const Eigen::MatrixXd& points, int k, Rng& rng, int max_iter = 100);

/// Best-inertia result over `restarts` independent seedings.
KMeansResult KMeans(const Eigen::MatrixXd& points, int k, int restarts, std::uint64_t seed,
                    int max_iter = 100);

int CountDistinctRows(const Eigen::MatrixXd& points);

}  // namespace asdkit

#endif  // ASDKIT_KMEANS_HPP_
