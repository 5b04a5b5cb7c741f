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

#include "asdkit/gmm.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "asdkit/error.hpp"
#include "asdkit/kmeans.hpp"
#include "asdkit/util.hpp"

namespace asdkit {

namespace {

// Per-component log densities, n x k.
Eigen::MatrixXd LogDensities(const Eigen::MatrixXd& x, const GmmModel& m) {
  const Eigen::Index d = x.cols();
  Eigen::MatrixXd out(x.rows(), m.k());
  const double log2pi = std::log(2.0 * std::numbers::pi);
  for (int c = 0; c < m.k(); ++c) {
    Eigen::LLT<Eigen::MatrixXd> llt(m.covs[c]);
    if (llt.info() != Eigen::Success)
      Fail(Errc::kDegenerateCovariance, "gmm: covariance of component " + std::to_string(c) +
                                            " is not positive definite");
    const Eigen::MatrixXd l = llt.matrixL();
    const double logdet = 2.0 * l.diagonal().array().log().sum();
    Eigen::MatrixXd centered = (x.rowwise() - m.means.row(c)).transpose();  // d x n
    llt.matrixL().solveInPlace(centered);
    const Eigen::VectorXd mahal = centered.colwise().squaredNorm().transpose();
    out.col(c) = (-0.5 * (static_cast<double>(d) * log2pi + logdet) + std::log(m.weights[c])) -
                 0.5 * mahal.array();
  }
  return out;
}

void MStep(const Eigen::MatrixXd& x, const Eigen::MatrixXd& resp, double reg, GmmModel& m,
           Rng& rng) {
  const Eigen::Index n = x.rows(), d = x.cols();
  const int k = static_cast<int>(resp.cols());
  m.weights.resize(k);
  m.means.resize(k, d);
  m.covs.assign(k, Eigen::MatrixXd());
  const Eigen::VectorXd nk = resp.colwise().sum().transpose();
  for (int c = 0; c < k; ++c) {
    if (nk[c] < 1e-10) {
      // Collapsed component: restart it on a random point with the global spread.
      const Eigen::Index i = static_cast<Eigen::Index>(UniformIndex(rng, static_cast<std::size_t>(n)));
      m.means.row(c) = x.row(i);
      Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
      m.covs[c] = centered.transpose() * centered / static_cast<double>(n) +
                  reg * Eigen::MatrixXd::Identity(d, d);
      m.weights[c] = 1e-10;
      continue;
    }
    m.weights[c] = nk[c] / static_cast<double>(n);
    m.means.row(c) = resp.col(c).transpose() * x / nk[c];
    Eigen::MatrixXd centered = x.rowwise() - m.means.row(c);
    m.covs[c] = (centered.array().colwise() * resp.col(c).array()).matrix().transpose() * centered /
                    nk[c] +
                reg * Eigen::MatrixXd::Identity(d, d);
  }
  m.weights /= m.weights.sum();
}

double EStep(const Eigen::MatrixXd& x, const GmmModel& m, Eigen::MatrixXd* resp) {
  Eigen::MatrixXd logp = LogDensities(x, m);
  double total = 0.0;
  for (Eigen::Index i = 0; i < logp.rows(); ++i) {
    const double mx = logp.row(i).maxCoeff();
    const double lse = mx + std::log((logp.row(i).array() - mx).exp().sum());
    total += lse;
    if (resp) logp.row(i) = (logp.row(i).array() - lse).exp();
  }
  if (resp) *resp = std::move(logp);
  return total;
}

std::vector<int> HardAssign(const Eigen::MatrixXd& resp) {
  std::vector<int> a(resp.rows());
  for (Eigen::Index i = 0; i < resp.rows(); ++i) {
    Eigen::Index best;
    resp.row(i).maxCoeff(&best);
    a[i] = static_cast<int>(best);
  }
  return a;
}

GmmFit FitOnce(const Eigen::MatrixXd& x, int k, Rng& rng, const GmmOptions& opt) {
  const Eigen::Index n = x.rows();
  KMeansResult init = KMeansOnce(x, k, rng, 10);
  Eigen::MatrixXd resp = Eigen::MatrixXd::Zero(n, k);
  for (Eigen::Index i = 0; i < n; ++i) resp(i, init.assignments[i]) = 1.0;

  GmmFit fit;
  MStep(x, resp, opt.reg, fit.model, rng);
  double prev = -std::numeric_limits<double>::infinity();
  for (int it = 0; it < opt.max_iter; ++it) {
    fit.loglik = EStep(x, fit.model, &resp);
    fit.iterations = it + 1;
    if (std::abs(fit.loglik - prev) < opt.tol * static_cast<double>(n)) break;
    prev = fit.loglik;
    MStep(x, resp, opt.reg, fit.model, rng);
  }
  // Final likelihood and assignments come from the returned parameters.
  fit.loglik = EStep(x, fit.model, &resp);
  if (!std::isfinite(fit.loglik))
    Fail(Errc::kDegenerateCovariance, "gmm: non-finite log-likelihood at k=" + std::to_string(k));
  fit.assignments = HardAssign(resp);
  return fit;
}

}  // namespace

double GmmLogLikelihood(const Eigen::MatrixXd& points, const GmmModel& model, Eigen::MatrixXd* resp) {
  Require(points.cols() == model.dim(), Errc::kDimMismatch, "gmm: point dimension mismatch");
  return EStep(points, model, resp);
}

GmmFit FitGmm(const Eigen::MatrixXd& points, int k, std::uint64_t seed, const GmmOptions& opt) {
  Require(k >= 1 && k <= points.rows(), Errc::kInvalidArgument, "gmm: need 1 <= k <= n");
  Require(opt.restarts >= 1 && opt.max_iter >= 1 && opt.reg >= 0.0, Errc::kInvalidArgument,
          "gmm: invalid options");
  Require(points.allFinite(), Errc::kInvalidArgument, "gmm: non-finite input");
  GmmFit best;
  best.loglik = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < opt.restarts; ++r) {
    Rng rng(MixSeed(seed, static_cast<std::uint64_t>(r)));
    GmmFit cur = FitOnce(points, k, rng, opt);
    if (cur.loglik > best.loglik) best = std::move(cur);
  }
  return best;
}

int GmmParameterCount(int k, int d) { return k * d + k * d * (d + 1) / 2 + k - 1; }

double Bic(double loglik, int num_params, int num_points) {
  return -2.0 * loglik + static_cast<double>(num_params) * std::log(static_cast<double>(num_points));
}

GmmBicResult ClusterGmmBic(const Eigen::MatrixXd& points, int kmax, std::uint64_t seed,
                           const GmmOptions& opt) {
  Require(kmax >= 1, Errc::kInvalidArgument, "gmm: kmax must be >= 1");
  const int n = static_cast<int>(points.rows());
  Require(n >= 1, Errc::kTooFewPoints, "gmm: no points to cluster");
  GmmBicResult result;
  if (kmax > n) {
    result.warnings.push_back("gmm: kmax " + std::to_string(kmax) + " exceeds " + std::to_string(n) +
                              " points; lowered to " + std::to_string(n));
    kmax = n;
  }
  double best = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= kmax; ++k) {
    GmmFit fit = FitGmm(points, k, MixSeed(seed, static_cast<std::uint64_t>(k)), opt);
    const double bic = Bic(fit.loglik, GmmParameterCount(k, static_cast<int>(points.cols())), n);
    result.bic.push_back(bic);
    result.loglik.push_back(fit.loglik);
    if (bic < best) {
      best = bic;
      result.k_chosen = k;
      result.assignments = std::move(fit.assignments);
    }
  }
  return result;
}

}  // namespace asdkit
