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

#include "asdkit/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "asdkit/error.hpp"

namespace asdkit {

ClassVocabulary::ClassVocabulary(std::vector<std::string> labels) {
  std::set<std::string> uniq(labels.begin(), labels.end());
  classes_.assign(uniq.begin(), uniq.end());
  for (std::size_t i = 0; i < classes_.size(); ++i) index_[classes_[i]] = static_cast<int>(i);
}

int ClassVocabulary::Index(const std::string& label) const {
  auto it = index_.find(label);
  if (it == index_.end()) Fail(Errc::kInvalidArgument, "unknown class label '" + label + "'");
  return it->second;
}

Eigen::VectorXd ClassVocabulary::OneHot(const std::string& label) const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(size());
  v[Index(label)] = 1.0;
  return v;
}

double FixedAdaCosScale(int num_centers) {
  const double l = num_centers > 1 ? std::log(static_cast<double>(num_centers - 1)) : 0.0;
  return std::sqrt(2.0) * std::max(l, 1.0);
}

AngularHead AngularHead::Create(int num_classes, int subclusters, int dim, bool trainable, Rng& rng,
                                std::optional<double> scale) {
  Require(num_classes >= 1 && subclusters >= 1 && dim >= 1, Errc::kInvalidArgument,
          "angular head: classes, sub-clusters and dim must be positive");
  AngularHead h;
  h.num_classes = num_classes;
  h.subclusters = subclusters;
  h.dim = dim;
  h.trainable = trainable;
  h.scale = scale.value_or(FixedAdaCosScale(num_classes * subclusters));
  h.centers.resize(static_cast<Eigen::Index>(num_classes) * subclusters, dim);
  for (Eigen::Index r = 0; r < h.centers.rows(); ++r)
    for (Eigen::Index c = 0; c < dim; ++c) h.centers(r, c) = Gaussian(rng);
  h.Renormalize();
  return h;
}

void AngularHead::Renormalize() {
  for (Eigen::Index r = 0; r < centers.rows(); ++r) {
    const double n = centers.row(r).norm();
    if (n > 0.0) centers.row(r) /= n;
  }
}

ScacResult ScacLoss(const Eigen::MatrixXd& embeddings, const Eigen::MatrixXd& targets,
                    const AngularHead& head, bool center_grad) {
  const Eigen::Index batch = embeddings.rows();
  Require(embeddings.cols() == head.dim, Errc::kDimMismatch,
          "scac: embedding dim " + std::to_string(embeddings.cols()) + " vs head dim " +
              std::to_string(head.dim));
  Require(targets.rows() == batch && targets.cols() == head.num_classes, Errc::kDimMismatch,
          "scac: target shape does not match batch x classes");
  Require(batch > 0, Errc::kInvalidArgument, "scac: empty batch");

  const int s_per = head.subclusters;
  const Eigen::Index k_total = head.centers.rows();
  Eigen::VectorXd cnorm = head.centers.rowwise().norm();
  Eigen::MatrixXd chat = head.centers.array().colwise() / cnorm.array();

  ScacResult res;
  res.d_embeddings = Eigen::MatrixXd::Zero(batch, head.dim);
  Eigen::MatrixXd d_chat;
  if (center_grad) d_chat = Eigen::MatrixXd::Zero(k_total, head.dim);

  for (Eigen::Index i = 0; i < batch; ++i) {
    const Eigen::VectorXd x = embeddings.row(i).transpose();
    const double xn = x.norm();
    if (!(xn > 0.0)) Fail(Errc::kZeroEmbedding, "scac: zero embedding at batch row " + std::to_string(i));
    const Eigen::VectorXd xh = x / xn;
    const Eigen::VectorXd cosines = chat * xh;
    Eigen::VectorXd logits = head.scale * cosines;
    const double mx = logits.maxCoeff();
    Eigen::VectorXd p = (logits.array() - mx).exp();
    p /= p.sum();

    const Eigen::VectorXd t = targets.row(i).transpose();
    const double tsum = t.sum();
    double loss = 0.0;
    Eigen::VectorXd dlogit = p * tsum;
    for (int c = 0; c < head.num_classes; ++c) {
      if (t[c] == 0.0) continue;
      const double pc = std::max(p.segment(c * s_per, s_per).sum(), 1e-300);
      loss -= t[c] * std::log(pc);
      dlogit.segment(c * s_per, s_per) -= t[c] * p.segment(c * s_per, s_per) / pc;
    }
    res.loss += loss;
    const Eigen::VectorXd dcos = head.scale * dlogit;
    const Eigen::VectorXd dxh = chat.transpose() * dcos;
    res.d_embeddings.row(i) = ((dxh - dxh.dot(xh) * xh) / xn).transpose();
    if (center_grad) d_chat.noalias() += dcos * xh.transpose();
  }
  const double inv = 1.0 / static_cast<double>(batch);
  res.loss *= inv;
  res.d_embeddings *= inv;
  if (center_grad) {
    res.d_centers.resize(k_total, head.dim);
    for (Eigen::Index k = 0; k < k_total; ++k) {
      const Eigen::RowVectorXd g = d_chat.row(k) * inv;
      const Eigen::RowVectorXd c = chat.row(k);
      res.d_centers.row(k) = (g - g.dot(c) * c) / cnorm[k];
    }
  }
  return res;
}

ScacResult ScacLoss(const Eigen::VectorXd& embedding, const Eigen::VectorXd& target,
                    const AngularHead& head, bool center_grad) {
  return ScacLoss(Eigen::MatrixXd(embedding.transpose()), Eigen::MatrixXd(target.transpose()),
                  head, center_grad);
}

MixedPair Mixup(const std::vector<float>& input_a, const Eigen::VectorXd& label_a,
                const std::vector<float>& input_b, const Eigen::VectorXd& label_b, double lambda) {
  Require(input_a.size() == input_b.size() && label_a.size() == label_b.size(),
          Errc::kShapeMismatch, "mixup: inputs must share a shape");
  Require(lambda >= 0.0 && lambda <= 1.0, Errc::kInvalidArgument, "mixup: lambda outside [0, 1]");
  MixedPair out;
  out.input.resize(input_a.size());
  const float la = static_cast<float>(lambda), lb = static_cast<float>(1.0 - lambda);
  for (std::size_t i = 0; i < input_a.size(); ++i) out.input[i] = la * input_a[i] + lb * input_b[i];
  out.label = lambda * label_a + (1.0 - lambda) * label_b;
  return out;
}

Eigen::MatrixXd Concatenate(const std::vector<Eigen::MatrixXd>& branches) {
  Require(!branches.empty(), Errc::kInvalidArgument, "concatenate: no branches");
  Eigen::Index cols = 0;
  for (const auto& b : branches) cols += b.cols();
  Eigen::MatrixXd out(branches.front().rows(), cols);
  Eigen::Index at = 0;
  for (const auto& b : branches) {
    out.middleCols(at, b.cols()) = b;
    at += b.cols();
  }
  return out;
}

Eigen::VectorXd FeatExLabel(const std::vector<int>& sources, const Eigen::MatrixXd& labels) {
  const int m = static_cast<int>(sources.size());
  const Eigen::Index c = labels.cols();
  Eigen::VectorXd l = Eigen::VectorXd::Zero((m + 1) * c);
  const bool same = std::all_of(sources.begin(), sources.end(),
                                [&](int s) { return s == sources.front(); });
  if (same) {
    l.head(c) = labels.row(sources.front()).transpose();
  } else {
    for (int b = 0; b < m; ++b) l.segment((b + 1) * c, c) = labels.row(sources[b]).transpose() / m;
  }
  return l;
}

std::vector<FeatExBatchItem> FeatExAssemble(const std::vector<Eigen::MatrixXd>& branch_embeddings,
                                            const Eigen::MatrixXd& labels, Rng& rng,
                                            double exchange_prob) {
  const int m = static_cast<int>(branch_embeddings.size());
  Require(m >= 1, Errc::kInvalidArgument, "featex: no branches");
  const Eigen::Index batch = labels.rows();
  Require(batch >= 2, Errc::kInvalidArgument, "featex: batch size must be >= 2");
  for (const auto& b : branch_embeddings)
    Require(b.rows() == batch, Errc::kShapeMismatch, "featex: branch batch size mismatch");
  const Eigen::Index d = branch_embeddings.front().cols();

  std::vector<FeatExBatchItem> items(batch);
  for (Eigen::Index i = 0; i < batch; ++i) {
    FeatExBatchItem& it = items[i];
    it.sources.assign(m, static_cast<int>(i));
    if (Uniform(rng, 0.0, 1.0) < exchange_prob)
      for (int b = 1; b < m; ++b) it.sources[b] = static_cast<int>(UniformIndex(rng, batch));
    it.z_ex.resize(m * d);
    for (int b = 0; b < m; ++b)
      it.z_ex.segment(b * d, d) = branch_embeddings[b].row(it.sources[b]).transpose();
    it.l_ex = FeatExLabel(it.sources, labels);
  }
  return items;
}

ObjectiveHeads ObjectiveHeads::Create(LossMode mode, int num_branches, int dim, int num_classes,
                                      int subclusters, Rng& rng) {
  ObjectiveHeads h;
  h.mode = mode;
  h.cat = AngularHead::Create(num_classes, subclusters, num_branches * dim, false, rng);
  if (mode == LossMode::kFeatEx)
    h.ex = AngularHead::Create((num_branches + 1) * num_classes, subclusters, num_branches * dim,
                               true, rng);
  if (mode == LossMode::kSubspace)
    for (int m = 0; m < num_branches; ++m)
      h.subspace.push_back(AngularHead::Create(num_classes, subclusters, dim, true, rng));
  return h;
}

std::vector<AngularHead*> ObjectiveHeads::Trainable() {
  std::vector<AngularHead*> out;
  if (ex) out.push_back(&*ex);
  for (auto& s : subspace) out.push_back(&s);
  return out;
}

std::size_t ObjectiveHeads::AuxParameterCount() const {
  std::size_t n = ex ? ex->ParameterCount() : 0;
  for (const auto& s : subspace) n += s.ParameterCount();
  return n;
}

namespace {

ObjectiveResult CatTerm(const ObjectiveHeads& heads, const std::vector<Eigen::MatrixXd>& branches,
                        const Eigen::MatrixXd& labels) {
  ScacResult cat = ScacLoss(Concatenate(branches), labels, heads.cat, false);
  ObjectiveResult r;
  r.loss = cat.loss;
  Eigen::Index at = 0;
  for (const auto& b : branches) {
    r.d_branches.push_back(cat.d_embeddings.middleCols(at, b.cols()));
    at += b.cols();
  }
  return r;
}

}  // namespace

ObjectiveResult TotalLossNone(ObjectiveHeads& heads, const std::vector<Eigen::MatrixXd>& branches,
                              const Eigen::MatrixXd& labels) {
  return CatTerm(heads, branches, labels);
}

ObjectiveResult TotalLossFeatEx(ObjectiveHeads& heads, const std::vector<Eigen::MatrixXd>& branches,
                                const Eigen::MatrixXd& labels, Rng& rng, double exchange_prob) {
  Require(heads.ex.has_value(), Errc::kInvalidArgument, "featex loss requires an exchange head");
  ObjectiveResult r = CatTerm(heads, branches, labels);
  auto items = FeatExAssemble(branches, labels, rng, exchange_prob);
  const Eigen::Index batch = labels.rows();
  const Eigen::Index d = branches.front().cols();
  Eigen::MatrixXd z(batch, heads.ex->dim), l(batch, heads.ex->num_classes);
  for (Eigen::Index i = 0; i < batch; ++i) {
    z.row(i) = items[i].z_ex.transpose();
    l.row(i) = items[i].l_ex.transpose();
  }
  ScacResult ex = ScacLoss(z, l, *heads.ex, true);
  r.loss += ex.loss;
  for (Eigen::Index i = 0; i < batch; ++i)
    for (std::size_t b = 0; b < branches.size(); ++b)
      r.d_branches[b].row(items[i].sources[b]) += ex.d_embeddings.row(i).segment(b * d, d);
  r.d_trainable.push_back(std::move(ex.d_centers));
  return r;
}

ObjectiveResult TotalLossSubspace(ObjectiveHeads& heads,
                                  const std::vector<Eigen::MatrixXd>& branches,
                                  const Eigen::MatrixXd& labels) {
  Require(heads.subspace.size() == branches.size(), Errc::kShapeMismatch,
          "subspace loss requires one head per branch");
  ObjectiveResult r = CatTerm(heads, branches, labels);
  for (std::size_t m = 0; m < branches.size(); ++m) {
    ScacResult sub = ScacLoss(branches[m], labels, heads.subspace[m], true);
    r.loss += sub.loss;
    r.d_branches[m] += sub.d_embeddings;
    r.d_trainable.push_back(std::move(sub.d_centers));
  }
  return r;
}

}  // namespace asdkit
