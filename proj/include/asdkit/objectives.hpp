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

#ifndef ASDKIT_OBJECTIVES_HPP_
#define ASDKIT_OBJECTIVES_HPP_

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "asdkit/util.hpp"

namespace asdkit {

class ClassVocabulary {
 public:
  ClassVocabulary() = default;
  /// Sorted, de-duplicated label set.
  explicit ClassVocabulary(std::vector<std::string> labels);

  int size() const { return static_cast<int>(classes_.size()); }
  int Index(const std::string& label) const;
  const std::string& Label(int index) const { return classes_.at(index); }
  const std::vector<std::string>& classes() const { return classes_; }
  Eigen::VectorXd OneHot(const std::string& label) const;

 private:
  std::vector<std::string> classes_;
  std::map<std::string, int> index_;
};

/// Sub-cluster AdaCos head: S unit-norm centres per class, fixed scale.
/// Row c*S + s of `centers` is sub-cluster s of class c.
struct AngularHead {
  int num_classes = 0;
  int subclusters = 1;
  int dim = 0;
  double scale = 1.0;
  bool trainable = false;
  Eigen::MatrixXd centers;

  /// Seeded random unit centres; scale defaults to the fixed AdaCos value.
  static AngularHead Create(int num_classes, int subclusters, int dim, bool trainable, Rng& rng,
                            std::optional<double> scale = std::nullopt);

  std::size_t ParameterCount() const { return static_cast<std::size_t>(centers.size()); }
  void Renormalize();
};

/// sqrt(2) * ln(n - 1), floored at sqrt(2) for n <= e + 1.
double FixedAdaCosScale(int num_centers);

struct ScacResult {
  double loss = 0.0;
  Eigen::MatrixXd d_embeddings;  // batch x dim
  Eigen::MatrixXd d_centers;     // same shape as head.centers; empty if not requested
};

/// Mean sub-cluster AdaCos cross-entropy over a batch. `embeddings` is
/// batch x dim, `targets` is batch x C with rows on the simplex.
ScacResult ScacLoss(const Eigen::MatrixXd& embeddings, const Eigen::MatrixXd& targets,
                    const AngularHead& head, bool center_grad);

/// Single-sample convenience overload.
ScacResult ScacLoss(const Eigen::VectorXd& embedding, const Eigen::VectorXd& target,
                    const AngularHead& head, bool center_grad = false);

struct MixedPair {
  std::vector<float> input;
  Eigen::VectorXd label;
};

/// lambda * first + (1 - lambda) * second, for inputs and labels alike.
MixedPair Mixup(const std::vector<float>& input_a, const Eigen::VectorXd& label_a,
                const std::vector<float>& input_b, const Eigen::VectorXd& label_b, double lambda);

struct FeatExBatchItem {
  std::vector<int> sources;  // sample index feeding each branch; sources[0] is the item itself
  Eigen::VectorXd z_ex;      // length M*D
  Eigen::VectorXd l_ex;      // length (M+1)*C
};

/// Builds exchanged embeddings and extended labels. With probability
/// `exchange_prob` an item draws its non-first branches from uniformly
/// chosen batch members (with replacement); otherwise all branches are its own.
/// Label: all sources equal -> block 0 holds l_i; else block m+1 holds l_{sources[m]} / M.
std::vector<FeatExBatchItem> FeatExAssemble(const std::vector<Eigen::MatrixXd>& branch_embeddings,
                                            const Eigen::MatrixXd& labels, Rng& rng,
                                            double exchange_prob = 1.0);

Eigen::VectorXd FeatExLabel(const std::vector<int>& sources, const Eigen::MatrixXd& labels);

enum class LossMode { kNone, kFeatEx, kSubspace };

/// Fixed cat head plus the trainable auxiliary heads of the chosen mode.
struct ObjectiveHeads {
  LossMode mode = LossMode::kNone;
  AngularHead cat;                   // fixed, dim M*D, C classes
  std::optional<AngularHead> ex;     // FeatEx: trainable, dim M*D, (M+1)*C classes
  std::vector<AngularHead> subspace; // subspace: M trainable heads, dim D, C classes

  static ObjectiveHeads Create(LossMode mode, int num_branches, int dim, int num_classes,
                               int subclusters, Rng& rng);

  std::vector<AngularHead*> Trainable();
  std::size_t AuxParameterCount() const;
};

struct ObjectiveResult {
  double loss = 0.0;
  std::vector<Eigen::MatrixXd> d_branches;  // M matrices, batch x D
  std::vector<Eigen::MatrixXd> d_trainable; // aligned with ObjectiveHeads::Trainable()
};

ObjectiveResult TotalLossNone(ObjectiveHeads& heads, const std::vector<Eigen::MatrixXd>& branches,
                              const Eigen::MatrixXd& labels);
ObjectiveResult TotalLossFeatEx(ObjectiveHeads& heads, const std::vector<Eigen::MatrixXd>& branches,
                                const Eigen::MatrixXd& labels, Rng& rng, double exchange_prob);
ObjectiveResult TotalLossSubspace(ObjectiveHeads& heads,
                                  const std::vector<Eigen::MatrixXd>& branches,
                                  const Eigen::MatrixXd& labels);

Eigen::MatrixXd Concatenate(const std::vector<Eigen::MatrixXd>& branches);

}  // namespace asdkit

#endif  // ASDKIT_OBJECTIVES_HPP_
