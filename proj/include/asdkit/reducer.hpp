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

#ifndef ASDKIT_REDUCER_HPP_
#define ASDKIT_REDUCER_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

namespace asdkit {

/// Maps n x D points to n x 2 coordinates.
class Reducer {
 public:
  virtual ~Reducer() = default;
  virtual std::string Name() const = 0;
  virtual Eigen::MatrixXd Reduce(const Eigen::MatrixXd& points, std::uint64_t seed) const = 0;
};

/// Projection onto the two leading principal axes. Eigenvector signs are
/// fixed so the largest-magnitude loading is positive.
class PcaReducer final : public Reducer {
 public:
  std::string Name() const override { return "pca"; }
  Eigen::MatrixXd Reduce(const Eigen::MatrixXd& points, std::uint64_t seed) const override;
};

struct TsneOptions {
  double perplexity = 30.0;  // capped at (n - 1) / 3
  int iterations = 1000;
  int exaggeration_iterations = 250;
  double exaggeration = 12.0;
  bool pca_init = true;  // otherwise seeded Gaussian init
};

/// Exact t-SNE (O(n^2) per iteration).
class TsneReducer final : public Reducer {
 public:
  explicit TsneReducer(TsneOptions opt = {}) : opt_(opt) {}
  std::string Name() const override { return "tsne"; }
  Eigen::MatrixXd Reduce(const Eigen::MatrixXd& points, std::uint64_t seed) const override;

 private:
  TsneOptions opt_;
};

/// "tsne" or "pca".
std::unique_ptr<Reducer> MakeReducer(std::string_view name, const TsneOptions& tsne = {});

}  // namespace asdkit

#endif  // ASDKIT_REDUCER_HPP_
