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

#include "asdkit/reducer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "asdkit/error.hpp"
#include "asdkit/util.hpp"

namespace asdkit {

namespace {

void CheckInput(const Eigen::MatrixXd& points) {
  Require(points.rows() >= 3, Errc::kTooFewPoints,
          "reduce: need at least 3 points, got " + std::to_string(points.rows()));
  Require(points.allFinite(), Errc::kInvalidArgument, "reduce: non-finite input");
}

Eigen::MatrixXd PcaProject(const Eigen::MatrixXd& points) {
  const Eigen::MatrixXd centered = points.rowwise() - points.colwise().mean();
  Eigen::MatrixXd axes = Eigen::MatrixXd::Zero(points.cols(), 2);
  if (points.cols() <= points.rows()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(centered.transpose() * centered);
    const Eigen::Index d = points.cols();
    for (int j = 0; j < 2 && j < d; ++j) axes.col(j) = eig.eigenvectors().col(d - 1 - j);
  } else {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
    for (int j = 0; j < 2 && j < svd.matrixV().cols(); ++j) axes.col(j) = svd.matrixV().col(j);
  }
  for (int j = 0; j < 2; ++j) {
    Eigen::Index arg;
    axes.col(j).cwiseAbs().maxCoeff(&arg);
    if (axes(arg, j) < 0.0) axes.col(j) *= -1.0;
  }
  return centered * axes;
}

// Conditional probabilities with per-point bandwidths matching the perplexity.
Eigen::MatrixXd Affinities(const Eigen::MatrixXd& d2, double perplexity) {
  const Eigen::Index n = d2.rows();
  const double target = std::log(perplexity);
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double beta = 1.0, lo = 0.0, hi = std::numeric_limits<double>::infinity();
    double dmin = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) dmin = std::min(dmin, d2(i, j));
    for (int it = 0; it < 100; ++it) {
      double sum = 0.0, hsum = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        const double v = std::exp(-(d2(i, j) - dmin) * beta);
        p(i, j) = v;
        sum += v;
        hsum += (d2(i, j) - dmin) * v;
      }
      const double entropy = std::log(sum) + beta * hsum / sum;
      p.row(i) /= sum;
      const double diff = entropy - target;
      if (std::abs(diff) < 1e-5) break;
      if (diff > 0.0) {
        lo = beta;
        beta = std::isinf(hi) ? beta * 2.0 : 0.5 * (beta + hi);
      } else {
        hi = beta;
        beta = 0.5 * (beta + lo);
      }
    }
  }
  return p;
}

}  // namespace

Eigen::MatrixXd PcaReducer::Reduce(const Eigen::MatrixXd& points, std::uint64_t) const {
  CheckInput(points);
  return PcaProject(points);
}

Eigen::MatrixXd TsneReducer::Reduce(const Eigen::MatrixXd& points, std::uint64_t seed) const {
  CheckInput(points);
  const Eigen::Index n = points.rows();
  const double perplexity = std::max(1.0, std::min(opt_.perplexity, (static_cast<double>(n) - 1.0) / 3.0));

  const Eigen::VectorXd sq = points.rowwise().squaredNorm();
  Eigen::MatrixXd d2 = (-2.0 * points * points.transpose()).colwise() + sq;
  d2.rowwise() += sq.transpose();
  d2 = d2.cwiseMax(0.0);
  Eigen::MatrixXd p = Affinities(d2, perplexity);
  p = (p + p.transpose()).eval() / (2.0 * static_cast<double>(n));
  p = p.cwiseMax(1e-12);
  p.diagonal().setZero();

  Eigen::MatrixXd y(n, 2);
  if (opt_.pca_init) {
    y = PcaProject(points);
    const double sd = std::sqrt((y.col(0).array() - y.col(0).mean()).square().mean());
    y *= sd > 0.0 ? 1e-4 / sd : 0.0;
  } else {
    Rng rng(seed);
    for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] = 1e-4 * Gaussian(rng);
  }

  const double lr = std::max(static_cast<double>(n) / opt_.exaggeration / 4.0, 50.0);
  Eigen::MatrixXd update = Eigen::MatrixXd::Zero(n, 2), gains = Eigen::MatrixXd::Ones(n, 2);
  Eigen::MatrixXd num(n, n), grad(n, 2);
  for (int it = 0; it < opt_.iterations; ++it) {
    const bool early = it < opt_.exaggeration_iterations;
    const double exag = early ? opt_.exaggeration : 1.0;
    const double momentum = early ? 0.5 : 0.8;
    const Eigen::VectorXd ysq = y.rowwise().squaredNorm();
    num = (-2.0 * y * y.transpose()).colwise() + ysq;
    num.rowwise() += ysq.transpose();
    num = (1.0 + num.array().max(0.0)).inverse().matrix();
    num.diagonal().setZero();
    const double qsum = num.sum();
    // grad_i = 4 sum_j (exag * p_ij - q_ij) num_ij (y_i - y_j)
    const Eigen::MatrixXd w = ((exag * p).array() - num.array() / qsum).matrix().cwiseProduct(num);
    grad = 4.0 * (w.rowwise().sum().asDiagonal() * y - w * y);
    for (Eigen::Index i = 0; i < grad.size(); ++i) {
      double& g = gains.data()[i];
      g = grad.data()[i] * update.data()[i] < 0.0 ? g + 0.2 : g * 0.8;
      g = std::max(g, 0.01);
    }
    update = momentum * update - lr * gains.cwiseProduct(grad);
    y += update;
  }
  y = y.rowwise() - y.colwise().mean();
  return y;
}

std::unique_ptr<Reducer> MakeReducer(std::string_view name, const TsneOptions& tsne) {
  if (name == "tsne") return std::make_unique<TsneReducer>(tsne);
  if (name == "pca") return std::make_unique<PcaReducer>();
  Fail(Errc::kInvalidArgument, "unknown reducer '" + std::string(name) + "'");
}

}  // namespace asdkit
