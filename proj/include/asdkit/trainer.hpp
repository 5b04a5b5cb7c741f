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

#ifndef ASDKIT_TRAINER_HPP_
#define ASDKIT_TRAINER_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "asdkit/embedder.hpp"
#include "asdkit/objectives.hpp"

namespace asdkit {

/// Decoupled-weight-decay Adam: p <- p - lr * (m_hat / (sqrt(v_hat) + eps) + wd * p).
class AdamW {
 public:
  struct State {
    std::vector<double> m, v;
  };

  AdamW(double lr, double weight_decay, double beta1 = 0.9, double beta2 = 0.999,
        double eps = 1e-8)
      : lr_(lr), wd_(weight_decay), b1_(beta1), b2_(beta2), eps_(eps) {}

  /// Advances the shared step counter; call once per optimisation step.
  void BeginStep() { ++t_; }
  void Update(std::span<float> params, std::span<const float> grads, State& state) const;
  void Update(std::span<double> params, std::span<const double> grads, State& state) const;
  long step() const { return t_; }

 private:
  template <typename T>
  void UpdateImpl(std::span<T> params, std::span<const T> grads, State& state) const;

  double lr_, wd_, b1_, b2_, eps_;
  long t_ = 0;
};

struct TrainConfig {
  int epochs = 16;
  int batch_size = 64;
  double lr = 1e-3;
  double weight_decay = 1e-2;
  LossMode loss_mode = LossMode::kSubspace;
  double aug_prob = 0.5;  // per-batch probability of mixup and of FeatEx exchange
  int subclusters = 16;
  std::uint64_t seed = 0;
  std::vector<int> score_checkpoint_epochs{12, 14, 16};

  void Validate() const;
};

std::string_view ToString(LossMode mode);
LossMode ParseLossMode(std::string_view s);

struct TrainLog {
  std::vector<double> epoch_loss;  // mean loss per completed epoch
  double wall_seconds = 0.0;
  std::uint64_t seed = 0;
  std::string config_hash;
  bool deterministic = true;

  void WriteCsv(const std::filesystem::path& path) const;
};

struct TrainingSet {
  std::vector<const FeatureSet*> features;
  std::vector<std::string> labels;  // class string per clip
};

struct TrainResult {
  std::vector<std::pair<int, EmbeddingModel>> checkpoints;  // (epoch, model) in epoch order
  EmbeddingModel final_model;
  ObjectiveHeads heads;
  ClassVocabulary vocabulary;
  TrainLog log;
};

struct TrainOptions {
  std::filesystem::path checkpoint_dir;  // empty: keep checkpoints in memory only
  std::string config_hash;
  /// Called after each optimisation step (tests use it to watch the heads).
  std::function<void(const ObjectiveHeads&)> on_step;
};

TrainResult Train(const ModelSpec& spec, const TrainingSet& data, const TrainConfig& cfg,
                  const TrainOptions& options = {});

using ScoreTable = std::map<std::string, double>;

/// Per-clip arithmetic mean across tables; all tables must share one key set.
ScoreTable AverageScores(const std::vector<ScoreTable>& tables);

}  // namespace asdkit

#endif  // ASDKIT_TRAINER_HPP_
