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

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "asdkit/error.hpp"
#include "asdkit/gmm.hpp"
#include "asdkit/util.hpp"
#include "oracles.hpp"

using namespace asdkit;

namespace {

Eigen::MatrixXd Blobs(Rng& rng, const std::vector<Eigen::Vector2d>& centres, int per, double sd,
                      std::vector<int>* truth = nullptr) {
  Eigen::MatrixXd pts(static_cast<Eigen::Index>(centres.size()) * per, 2);
  for (std::size_t c = 0; c < centres.size(); ++c)
    for (int i = 0; i < per; ++i) {
      const Eigen::Index r = static_cast<Eigen::Index>(c) * per + i;
      pts(r, 0) = centres[c][0] + sd * Gaussian(rng);
      pts(r, 1) = centres[c][1] + sd * Gaussian(rng);
      if (truth) truth->push_back(static_cast<int>(c));
    }
  return pts;
}

}  // namespace

TEST_CASE("parameter count and bic formula") {
  CHECK(GmmParameterCount(1, 1) == 2);
  CHECK(GmmParameterCount(3, 2) == 3 * 2 + 3 * 3 + 2);
  for (int k = 1; k <= 6; ++k)
    for (int d = 1; d <= 5; ++d) CHECK(GmmParameterCount(k, d) == k * d + k * d * (d + 1) / 2 + k - 1);
  CHECK(Bic(-100.0, 5, 50) == doctest::Approx(200.0 + 5.0 * std::log(50.0)));
}

TEST_CASE("single gaussian log-likelihood matches the closed form") {
  GmmModel m;
  m.weights = Eigen::VectorXd::Ones(1);
  m.means = Eigen::MatrixXd::Zero(1, 2);
  Eigen::Matrix2d cov;
  cov << 2.0, 0.5, 0.5, 1.0;
  m.covs = {cov};
  Eigen::MatrixXd x(2, 2);
  x << 0.0, 0.0, 1.0, -1.0;
  double expect = 0.0;
  for (int i = 0; i < 2; ++i) {
    const Eigen::Vector2d v = x.row(i).transpose();
    expect += -std::log(2.0 * std::numbers::pi) - 0.5 * std::log(cov.determinant()) - 0.5 * v.dot(cov.inverse() * v);
  }
  Eigen::MatrixXd resp;
  CHECK(GmmLogLikelihood(x, m, &resp) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(resp.rows() == 2);
  CHECK(resp(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("three planted blobs give three clusters") {
  Rng rng(1);
  std::vector<int> truth;
  const Eigen::MatrixXd pts = Blobs(rng, {{0, 0}, {10, 0}, {0, 10}}, 40, 1.0, &truth);
  const GmmBicResult r = ClusterGmmBic(pts, 8, 3);
  CHECK(r.k_chosen == 3);
  CHECK(r.bic.size() == 8);
  CHECK(oracle::Ari(r.assignments, truth) == doctest::Approx(1.0));
  for (int k = 1; k <= 8; ++k)
    CHECK(r.bic[k - 1] == doctest::Approx(Bic(r.loglik[k - 1], GmmParameterCount(k, 2), 120)));
}

TEST_CASE("a single blob gives one cluster") {
  Rng rng(2);
  const Eigen::MatrixXd pts = Blobs(rng, {{3, -1}}, 100, 2.0);
  const GmmBicResult r = ClusterGmmBic(pts, 5, 1);
  CHECK(r.k_chosen == 1);
  CHECK(std::set<int>(r.assignments.begin(), r.assignments.end()).size() == 1);
}

TEST_CASE("kmax bounds the chosen count") {
  Rng rng(3);
  const Eigen::MatrixXd pts = Blobs(rng, {{0, 0}, {10, 0}, {0, 10}, {10, 10}}, 30, 0.5);
  const GmmBicResult r = ClusterGmmBic(pts, 2, 1);
  CHECK(r.k_chosen <= 2);
  for (int a : r.assignments) CHECK((a >= 0 && a < 2));
  const GmmBicResult tiny = ClusterGmmBic(pts.topRows(3), 10, 1);
  CHECK(tiny.bic.size() <= 3);
  CHECK(!tiny.warnings.empty());
}

TEST_CASE("em does not decrease the likelihood across k and is seeded") {
  Rng rng(4);
  const Eigen::MatrixXd pts = Blobs(rng, {{0, 0}, {4, 1}}, 50, 1.0);
  const GmmFit a = FitGmm(pts, 2, 9), b = FitGmm(pts, 2, 9);
  CHECK(a.loglik == b.loglik);
  CHECK(a.assignments == b.assignments);
  CHECK(a.model.weights.sum() == doctest::Approx(1.0));
  CHECK(FitGmm(pts, 2, 9).loglik >= FitGmm(pts, 1, 9).loglik - 1e-9);
  CHECK(GmmLogLikelihood(pts, a.model) == doctest::Approx(a.loglik).epsilon(1e-9));
  CHECK_THROWS_AS(FitGmm(pts, 0, 1), Error);
}
