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

#ifndef ASDKIT_GMM_HPP_
#define ASDKIT_GMM_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace asdkit {

/// Full-covariance Gaussian mixture.
struct GmmModel {
  Eigen::VectorXd weights;            // k
  Eigen::MatrixXd means;              // k x d
  std::vector<Eigen::MatrixXd> covs;  // k matrices d x d
  int k() const { return static_cast<int>(weights.size()); }
  int dim() const { return static_cast<int>(means.cols()); }
};

struct GmmFit {
  GmmModel model;
  double loglik = 0.0;  // total log-likelihood of the fitted data
  std::vector<int> assignments;
  int iterations = 0;
};

struct GmmOptions {
  int restarts = 5;
  int max_iter = 100;
  double tol = 1e-3;   // on the mean per-point log-likelihood
  double reg = 1e-6;   // added to every covariance diagonal
};

/// Total log-likelihood of `points` (rows) under `model`; per-point
/// responsibilities are written to `resp` (n x k) when given.
double GmmLogLikelihood(const Eigen::MatrixXd& points, const GmmModel& model,
                        Eigen::MatrixXd* resp = nullptr);

/// EM from k-means++ initialisations; the restart with the best
/// log-likelihood wins.
GmmFit FitGmm(const Eigen::MatrixXd& points, int k, std::uint64_t seed, const GmmOptions& opt = {});

/// Free parameters: k*d means, k*d(d+1)/2 covariances, k-1 weights.
int GmmParameterCount(int k, int d);

double Bic(double loglik, int num_params, int num_points);

struct GmmBicResult {
  std::vector<int> assignments;
  int k_chosen = 0;
  std::vector<double> bic;     // index k-1
  std::vector<double> loglik;  // index k-1
  std::vector<std::string> warnings;
};

/// Fits k = 1..kmax and keeps the BIC minimiser. kmax above the number of
/// points is lowered with a warning.
GmmBicResult ClusterGmmBic(const Eigen::MatrixXd& points, int kmax, std::uint64_t seed,
                           const GmmOptions& opt = {});

}  // namespace asdkit

#endif  // ASDKIT_GMM_HPP_
