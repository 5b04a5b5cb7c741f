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

#ifndef ASDKIT_BACKEND_HPP_
#define ASDKIT_BACKEND_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace asdkit {

enum class Metric { kCosine, kEuclidean };

std::string_view ToString(Metric m);
Metric ParseMetric(std::string_view s);

double Distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b, Metric metric);

struct MachineBackend {
  Eigen::MatrixXd source_centroids;  // rows
  Eigen::MatrixXd target_refs;       // rows; may be empty
};

struct BackendModel {
  Metric metric = Metric::kCosine;
  int dim = 0;
  std::map<std::string, MachineBackend> machines;
  std::vector<std::string> warnings;

  /// Smallest distance to a source centroid or a target reference; higher
  /// means more anomalous.
  double Score(const std::string& machine, const Eigen::VectorXd& embedding) const;
};

struct MachineTrainEmbeddings {
  Eigen::MatrixXd source;  // one row per source-domain training clip
  Eigen::MatrixXd target;  // one row per target-domain training clip
};

struct BackendConfig {
  Metric metric = Metric::kCosine;
  int source_clusters = 16;
  int restarts = 10;
};

BackendModel FitBackend(const std::map<std::string, MachineTrainEmbeddings>& train,
                        const BackendConfig& cfg, std::uint64_t seed);

/// Score against a single machine's backend.
double ScoreEmbedding(const Eigen::VectorXd& embedding, const MachineBackend& backend,
                      Metric metric);

}  // namespace asdkit

#endif  // ASDKIT_BACKEND_HPP_
