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

#include "asdkit/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "asdkit/error.hpp"

namespace asdkit {

template <typename T>
void AdamW::UpdateImpl(std::span<T> params, std::span<const T> grads, State& state) const {
  Require(params.size() == grads.size(), Errc::kShapeMismatch, "adamw: param/grad size mismatch");
  Require(t_ > 0, Errc::kInvalidArgument, "adamw: BeginStep() not called");
  if (state.m.size() != params.size()) {
    state.m.assign(params.size(), 0.0);
    state.v.assign(params.size(), 0.0);
  }
  const double c1 = 1.0 - std::pow(b1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    state.m[i] = b1_ * state.m[i] + (1.0 - b1_) * g;
    state.v[i] = b2_ * state.v[i] + (1.0 - b2_) * g * g;
    const double step = (state.m[i] / c1) / (std::sqrt(state.v[i] / c2) + eps_);
    double p = static_cast<double>(params[i]);
    p -= lr_ * wd_ * p;
    p -= lr_ * step;
    params[i] = static_cast<T>(p);
  }
}

void AdamW::Update(std::span<float> params, std::span<const float> grads, State& state) const {
  UpdateImpl<float>(params, grads, state);
}

void AdamW::Update(std::span<double> params, std::span<const double> grads, State& state) const {
  UpdateImpl<double>(params, grads, state);
}

void TrainConfig::Validate() const {
  Require(epochs >= 1, Errc::kInvalidArgument, "train: epochs must be >= 1");
  Require(batch_size >= 2, Errc::kInvalidArgument, "train: batch_size must be >= 2");
  Require(lr > 0.0 && weight_decay >= 0.0, Errc::kInvalidArgument, "train: bad lr/weight decay");
  Require(aug_prob >= 0.0 && aug_prob <= 1.0, Errc::kInvalidArgument, "train: aug_prob outside [0,1]");
  Require(subclusters >= 1, Errc::kInvalidArgument, "train: subclusters must be >= 1");
  for (int e : score_checkpoint_epochs)
    Require(e >= 1 && e <= epochs, Errc::kInvalidArgument,
            "train: score checkpoint epoch " + std::to_string(e) + " outside [1, epochs]");
}

std::string_view ToString(LossMode mode) {
  switch (mode) {
    case LossMode::kNone: return "none";
    case LossMode::kFeatEx: return "featex";
    case LossMode::kSubspace: return "subspace";
  }
  return "none";
}

LossMode ParseLossMode(std::string_view s) {
  if (s == "none") return LossMode::kNone;
  if (s == "featex") return LossMode::kFeatEx;
  if (s == "subspace") return LossMode::kSubspace;
  Fail(Errc::kInvalidArgument, "unknown loss mode '" + std::string(s) + "'");
}

void TrainLog::WriteCsv(const std::filesystem::path& path) const {
  CsvTable t;
  t.comments = {"config_hash=" + config_hash, "seed=" + std::to_string(seed),
                "wall_seconds=" + FormatDouble(wall_seconds, 6),
                std::string("deterministic=") + (deterministic ? "true" : "false")};
  t.header = {"epoch", "mean_loss"};
  for (std::size_t e = 0; e < epoch_loss.size(); ++e)
    t.rows.push_back({std::to_string(e + 1), FormatDouble(epoch_loss[e])});
  asdkit::WriteCsv(path, t);
}

namespace {

Eigen::MatrixXd ToMatrix(const nn::Tensor& t) {
  Eigen::MatrixXd m(t.n, static_cast<Eigen::Index>(t.SampleSize()));
  for (int i = 0; i < t.n; ++i)
    for (std::size_t k = 0; k < t.SampleSize(); ++k) m(i, static_cast<Eigen::Index>(k)) = t.Sample(i)[k];
  return m;
}

nn::Tensor ToTensor(const Eigen::MatrixXd& m) {
  nn::Tensor t(static_cast<int>(m.rows()), static_cast<int>(m.cols()), 1, 1);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index k = 0; k < m.cols(); ++k) t.Sample(static_cast<int>(i))[k] = static_cast<float>(m(i, k));
  return t;
}

void MixBatch(std::vector<nn::Tensor>& inputs, Eigen::MatrixXd& labels, Rng& rng) {
  const int n = static_cast<int>(labels.rows());
  const double lambda = Uniform(rng, 0.0, 1.0);
  std::vector<int> partner(n);
  std::iota(partner.begin(), partner.end(), 0);
  for (int i = n - 1; i > 0; --i) std::swap(partner[i], partner[UniformIndex(rng, i + 1)]);
  const float la = static_cast<float>(lambda), lb = static_cast<float>(1.0 - lambda);
  for (auto& t : inputs) {
    nn::Tensor mixed = t;
    const std::size_t sz = t.SampleSize();
    for (int i = 0; i < n; ++i)
      for (std::size_t k = 0; k < sz; ++k)
        mixed.Sample(i)[k] = la * t.Sample(i)[k] + lb * t.Sample(partner[i])[k];
    t = std::move(mixed);
  }
  Eigen::MatrixXd mixed(labels.rows(), labels.cols());
  for (int i = 0; i < n; ++i) mixed.row(i) = lambda * labels.row(i) + (1.0 - lambda) * labels.row(partner[i]);
  labels = std::move(mixed);
}

}  // namespace

TrainResult Train(const ModelSpec& spec, const TrainingSet& data, const TrainConfig& cfg,
                  const TrainOptions& options) {
  cfg.Validate();
  const auto t0 = std::chrono::steady_clock::now();
  Require(data.features.size() == data.labels.size(), Errc::kInvalidArgument,
          "train: features and labels differ in length");
  Require(data.features.size() >= 2, Errc::kInvalidArgument, "train: need at least 2 clips");

  TrainResult result;
  result.vocabulary = ClassVocabulary(data.labels);
  Require(result.vocabulary.size() >= 2, Errc::kSingleClass,
          "train: only one class present ('" + data.labels.front() + "')");
  const int num_classes = result.vocabulary.size();
  const int n = static_cast<int>(data.features.size());
  Eigen::MatrixXd all_labels = Eigen::MatrixXd::Zero(n, num_classes);
  for (int i = 0; i < n; ++i) all_labels(i, result.vocabulary.Index(data.labels[i])) = 1.0;

  EmbeddingModel model(spec, MixSeed(cfg.seed, 1));
  Rng head_rng(MixSeed(cfg.seed, 2));
  result.heads = ObjectiveHeads::Create(cfg.loss_mode, model.NumBranches(), spec.EmbeddingDim(),
                                        num_classes, cfg.subclusters, head_rng);
  Rng rng(MixSeed(cfg.seed, 3));

  AdamW opt(cfg.lr, cfg.weight_decay);
  auto params = model.Params();
  std::vector<AdamW::State> param_state(params.size());
  std::vector<AdamW::State> head_state(result.heads.Trainable().size());

  result.log.seed = cfg.seed;
  result.log.config_hash = options.config_hash;
  if (!options.checkpoint_dir.empty()) std::filesystem::create_directories(options.checkpoint_dir);

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    for (int i = n - 1; i > 0; --i) std::swap(order[i], order[UniformIndex(rng, i + 1)]);
    double loss_sum = 0.0;
    int steps = 0;
    for (int start = 0; start < n; start += cfg.batch_size) {
      const int end = std::min(n, start + cfg.batch_size);
      if (end - start < 2) continue;  // batch statistics need two samples
      std::vector<const FeatureSet*> batch;
      Eigen::MatrixXd labels(end - start, num_classes);
      for (int k = start; k < end; ++k) {
        batch.push_back(data.features[order[k]]);
        labels.row(k - start) = all_labels.row(order[k]);
      }
      auto inputs = model.MakeInputs(batch, &rng);
      if (Uniform(rng, 0.0, 1.0) < cfg.aug_prob) MixBatch(inputs, labels, rng);

      std::vector<Eigen::MatrixXd> z;
      for (int m = 0; m < model.NumBranches(); ++m) z.push_back(ToMatrix(model.TrainForward(m, inputs[m])));

      ObjectiveResult obj;
      switch (cfg.loss_mode) {
        case LossMode::kNone:
          obj = TotalLossNone(result.heads, z, labels);
          break;
        case LossMode::kFeatEx: {
          const double exchange = Uniform(rng, 0.0, 1.0) < cfg.aug_prob ? 1.0 : 0.0;
          obj = TotalLossFeatEx(result.heads, z, labels, rng, exchange);
          break;
        }
        case LossMode::kSubspace:
          obj = TotalLossSubspace(result.heads, z, labels);
          break;
      }
      if (!std::isfinite(obj.loss))
        Fail(Errc::kNonFiniteLoss,
             "train: non-finite loss at epoch " + std::to_string(epoch) + ", step " + std::to_string(steps));

      model.ZeroGrad();
      for (int m = 0; m < model.NumBranches(); ++m) model.TrainBackward(m, ToTensor(obj.d_branches[m]));
      opt.BeginStep();
      for (std::size_t p = 0; p < params.size(); ++p)
        opt.Update(std::span<float>(params[p]->value), std::span<const float>(params[p]->grad), param_state[p]);
      auto trainable = result.heads.Trainable();
      for (std::size_t h = 0; h < trainable.size(); ++h) {
        Eigen::MatrixXd& c = trainable[h]->centers;
        opt.Update(std::span<double>(c.data(), c.size()),
                   std::span<const double>(obj.d_trainable[h].data(), obj.d_trainable[h].size()),
                   head_state[h]);
        trainable[h]->Renormalize();
      }
      if (options.on_step) options.on_step(result.heads);
      loss_sum += obj.loss;
      ++steps;
    }
    result.log.epoch_loss.push_back(steps ? loss_sum / steps : 0.0);
    const auto& ck = cfg.score_checkpoint_epochs;
    if (std::find(ck.begin(), ck.end(), epoch) != ck.end()) {
      result.checkpoints.emplace_back(epoch, model);
      if (!options.checkpoint_dir.empty())
        SaveCheckpoint(options.checkpoint_dir / CheckpointFileName(epoch), model, epoch, options.config_hash);
    }
  }
  result.final_model = std::move(model);
  result.log.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

ScoreTable AverageScores(const std::vector<ScoreTable>& tables) {
  Require(!tables.empty(), Errc::kInvalidArgument, "average_scores: no tables");
  for (const auto& t : tables) {
    if (t.size() != tables.front().size() ||
        !std::equal(t.begin(), t.end(), tables.front().begin(),
                    [](const auto& a, const auto& b) { return a.first == b.first; }))
      Fail(Errc::kKeyMismatch, "average_scores: score tables cover different clip sets");
  }
  ScoreTable out;
  for (const auto& [clip, _] : tables.front()) {
    // Summing in sorted order makes the mean independent of table order.
    std::vector<double> values;
    for (const auto& t : tables) values.push_back(t.at(clip));
    std::sort(values.begin(), values.end());
    double s = 0.0;
    for (double v : values) s += v;
    out[clip] = s / static_cast<double>(values.size());
  }
  return out;
}

}  // namespace asdkit
