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

#include "asdkit/error.hpp"
#include "asdkit/reducer.hpp"
#include "asdkit/util.hpp"

using namespace asdkit;

namespace {

double Silhouette(const Eigen::MatrixXd& y, const std::vector<int>& lab) {
  const Eigen::Index n = y.rows();
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double in = 0.0, out = 0.0;
    int ni = 0, no = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double d = (y.row(i) - y.row(j)).norm();
      if (lab[i] == lab[j]) {
        in += d;
        ++ni;
      } else {
        out += d;
        ++no;
      }
    }
    const double a = in / ni, b = out / no;
    total += (b - a) / std::max(a, b);
  }
  return total / static_cast<double>(n);
}

Eigen::MatrixXd TwoBlobs(Rng& rng, int per, int dim, std::vector<int>& lab) {
  Eigen::MatrixXd x(2 * per, dim);
  for (int i = 0; i < 2 * per; ++i) {
    lab.push_back(i / per);
    for (int k = 0; k < dim; ++k) x(i, k) = Gaussian(rng) + (i < per ? 0.0 : 8.0);
  }
  return x;
}

}  // namespace

TEST_CASE("tsne separates two blobs") {
  Rng rng(1);
  std::vector<int> lab;
  const Eigen::MatrixXd x = TwoBlobs(rng, 40, 10, lab);
  const Eigen::MatrixXd y = TsneReducer().Reduce(x, 3);
  CHECK(y.rows() == 80);
  CHECK(y.cols() == 2);
  CHECK(y.allFinite());
  CHECK(Silhouette(y, lab) > 0.8);
}

TEST_CASE("tsne is deterministic for a seed") {
  Rng rng(2);
  std::vector<int> lab;
  const Eigen::MatrixXd x = TwoBlobs(rng, 15, 5, lab);
  TsneOptions opt;
  opt.iterations = 300;
  opt.pca_init = false;
  const TsneReducer r(opt);
  CHECK(r.Reduce(x, 7) == r.Reduce(x, 7));
}

TEST_CASE("pca keeps planar data isometric") {
  Rng rng(3);
  Eigen::MatrixXd plane(30, 2);
  for (Eigen::Index i = 0; i < plane.size(); ++i) plane.data()[i] = Gaussian(rng);
  plane.col(0) *= 3.0;
  // Embed the plane in 5-D with an orthonormal basis.
  Eigen::MatrixXd q = Eigen::MatrixXd::Random(5, 5).householderQr().householderQ();
  const Eigen::MatrixXd x = plane * q.leftCols(2).transpose();
  const Eigen::MatrixXd y = PcaReducer().Reduce(x, 0);
  for (int i = 0; i < 30; ++i)
    for (int j = 0; j < 30; ++j)
      CHECK((y.row(i) - y.row(j)).norm() == doctest::Approx((x.row(i) - x.row(j)).norm()).epsilon(1e-9).scale(1.0));
  CHECK(PcaReducer().Reduce(x, 0) == PcaReducer().Reduce(x, 99));
}

TEST_CASE("reducer factory and errors") {
  CHECK(MakeReducer("tsne")->Name() == "tsne");
  CHECK(MakeReducer("pca")->Name() == "pca");
  CHECK_THROWS_AS(MakeReducer("umap"), Error);
  try {
    TsneReducer().Reduce(Eigen::MatrixXd::Random(2, 4), 0);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kTooFewPoints);
  }
}
