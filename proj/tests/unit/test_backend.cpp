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

#include "asdkit/backend.hpp"
#include "asdkit/error.hpp"
#include "asdkit/util.hpp"

using namespace asdkit;

namespace {

Eigen::MatrixXd RandomRows(Rng& rng, int n, int d, double offset = 0.0) {
  Eigen::MatrixXd m(n, d);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = Gaussian(rng) + offset;
  return m;
}

}  // namespace

TEST_CASE("score is the smallest distance over centroids and references") {
  MachineBackend mb;
  mb.source_centroids = Eigen::MatrixXd(1, 2);
  mb.source_centroids << 3.0, 0.0;
  mb.target_refs = Eigen::MatrixXd(2, 2);
  mb.target_refs << 0.0, 1.0, 10.0, 9.0;
  CHECK(ScoreEmbedding(Eigen::Vector2d(0.0, 0.0), mb, Metric::kEuclidean) == doctest::Approx(1.0));
  mb.target_refs.row(0) << 0.0, 5.0;
  CHECK(ScoreEmbedding(Eigen::Vector2d(0.0, 0.0), mb, Metric::kEuclidean) == doctest::Approx(3.0));
  mb.source_centroids.row(0) << 100.0, 100.0;
  mb.target_refs.row(0) << 100.0, 100.0;
  CHECK(ScoreEmbedding(Eigen::Vector2d(0.0, 0.0), mb, Metric::kEuclidean) == doctest::Approx(std::sqrt(181.0)));
}

TEST_CASE("distance properties") {
  Rng rng(1);
  for (int i = 0; i < 500; ++i) {
    Eigen::VectorXd a = RandomRows(rng, 1, 6).row(0).transpose(), b = RandomRows(rng, 1, 6).row(0).transpose();
    CHECK(Distance(a, a, Metric::kEuclidean) == 0.0);
    CHECK(Distance(a, a, Metric::kCosine) == doctest::Approx(0.0).scale(1.0));
    const double c = Distance(a, b, Metric::kCosine);
    CHECK(c >= 0.0);
    CHECK(c <= 2.0 + 1e-12);
    CHECK(Distance(Eigen::VectorXd(3.7 * a), Eigen::VectorXd(0.2 * b), Metric::kCosine) == doctest::Approx(c));
    CHECK(Distance(a, b, Metric::kEuclidean) == doctest::Approx(Distance(b, a, Metric::kEuclidean)));
  }
}

TEST_CASE("euclidean scores are 1-Lipschitz and zero on references") {
  Rng rng(2);
  std::map<std::string, MachineTrainEmbeddings> train;
  train["fan"] = {RandomRows(rng, 50, 4), RandomRows(rng, 5, 4, 3.0)};
  const BackendModel model = FitBackend(train, {Metric::kEuclidean, 8, 3}, 7);
  for (Eigen::Index i = 0; i < 5; ++i) CHECK(model.Score("fan", train["fan"].target.row(i).transpose()) == 0.0);
  for (Eigen::Index i = 0; i < 8; ++i)
    CHECK(model.Score("fan", model.machines.at("fan").source_centroids.row(i).transpose()) == 0.0);
  for (int i = 0; i < 500; ++i) {
    Eigen::VectorXd x = RandomRows(rng, 1, 4).row(0).transpose(), y = RandomRows(rng, 1, 4).row(0).transpose();
    CHECK(std::abs(model.Score("fan", x) - model.Score("fan", y)) <= (x - y).norm() + 1e-12);
  }
}

TEST_CASE("cosine scores ignore embedding scale") {
  Rng rng(3);
  std::map<std::string, MachineTrainEmbeddings> train;
  train["fan"] = {RandomRows(rng, 40, 5, 1.0), RandomRows(rng, 3, 5)};
  const BackendModel model = FitBackend(train, {Metric::kCosine, 4, 2}, 1);
  for (Eigen::Index r = 0; r < 4; ++r) CHECK(model.machines.at("fan").source_centroids.row(r).norm() <= 1.0 + 1e-12);
  for (int i = 0; i < 200; ++i) {
    Eigen::VectorXd x = RandomRows(rng, 1, 5).row(0).transpose();
    CHECK(model.Score("fan", Eigen::VectorXd(9.0 * x)) == doctest::Approx(model.Score("fan", x)).epsilon(1e-9));
  }
}

TEST_CASE("cluster count and reference count") {
  Rng rng(4);
  std::map<std::string, MachineTrainEmbeddings> train;
  train["fan"] = {RandomRows(rng, 990, 8), RandomRows(rng, 10, 8)};
  const BackendModel model = FitBackend(train, {Metric::kCosine, 16, 2}, 5);
  CHECK(model.machines.at("fan").source_centroids.rows() == 16);
  CHECK(model.machines.at("fan").target_refs.rows() == 10);
  CHECK(model.warnings.empty());
  CHECK(model.dim == 8);
}

TEST_CASE("fewer distinct source points than clusters") {
  Rng rng(5);
  Eigen::MatrixXd base = RandomRows(rng, 5, 3);
  Eigen::MatrixXd src(20, 3);
  for (int i = 0; i < 20; ++i) src.row(i) = base.row(i % 5);
  std::map<std::string, MachineTrainEmbeddings> train;
  train["fan"] = {src, Eigen::MatrixXd(0, 3)};
  const BackendModel model = FitBackend(train, {Metric::kEuclidean, 16, 2}, 5);
  CHECK(model.machines.at("fan").source_centroids.rows() == 5);
  CHECK(model.warnings.size() == 1);
  for (int i = 0; i < 5; ++i) CHECK(model.Score("fan", base.row(i).transpose()) == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("adding references never raises a score") {
  Rng rng(6);
  MachineBackend mb;
  mb.source_centroids = RandomRows(rng, 4, 3);
  mb.target_refs = RandomRows(rng, 2, 3);
  MachineBackend more = mb;
  more.target_refs.conservativeResize(6, 3);
  more.target_refs.bottomRows(4) = RandomRows(rng, 4, 3);
  for (Metric m : {Metric::kCosine, Metric::kEuclidean})
    for (int i = 0; i < 300; ++i) {
      const Eigen::VectorXd x = RandomRows(rng, 1, 3).row(0).transpose();
      CHECK(ScoreEmbedding(x, more, m) <= ScoreEmbedding(x, mb, m));
    }
}

TEST_CASE("backend errors") {
  Rng rng(7);
  std::map<std::string, MachineTrainEmbeddings> empty_src;
  empty_src["fan"] = {Eigen::MatrixXd(0, 4), RandomRows(rng, 3, 4)};
  try {
    FitBackend(empty_src, {}, 0);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kEmptySource);
  }
  std::map<std::string, MachineTrainEmbeddings> mixed;
  mixed["fan"] = {RandomRows(rng, 20, 4), Eigen::MatrixXd(0, 4)};
  mixed["pump"] = {RandomRows(rng, 20, 5), Eigen::MatrixXd(0, 5)};
  try {
    FitBackend(mixed, {Metric::kCosine, 2, 1}, 0);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kDimMismatch);
  }
  std::map<std::string, MachineTrainEmbeddings> ok;
  ok["fan"] = {RandomRows(rng, 20, 4), Eigen::MatrixXd(0, 4)};
  const BackendModel model = FitBackend(ok, {Metric::kCosine, 2, 1}, 0);
  CHECK_THROWS_AS(model.Score("fan", Eigen::VectorXd::Ones(3)), Error);
  CHECK_THROWS_AS(model.Score("valve", Eigen::VectorXd::Ones(4)), Error);
  CHECK_THROWS_AS(FitBackend(ok, {Metric::kCosine, 0, 1}, 0), Error);
  CHECK(ParseMetric("euclidean") == Metric::kEuclidean);
  CHECK_THROWS_AS(ParseMetric("manhattan"), Error);
}

TEST_CASE("fit is deterministic for a seed") {
  Rng rng(8);
  std::map<std::string, MachineTrainEmbeddings> train;
  train["fan"] = {RandomRows(rng, 100, 4), RandomRows(rng, 3, 4)};
  const auto a = FitBackend(train, {Metric::kCosine, 6, 3}, 42), b = FitBackend(train, {Metric::kCosine, 6, 3}, 42);
  CHECK(a.machines.at("fan").source_centroids == b.machines.at("fan").source_centroids);
}
