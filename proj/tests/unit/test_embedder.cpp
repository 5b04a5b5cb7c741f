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
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>

#include "asdkit/embedder.hpp"
#include "asdkit/error.hpp"

using namespace asdkit;
namespace fs = std::filesystem;

namespace {

struct Fixture {
  SpectralConfig cfg;
  ArchitectureConfig arch;
  ModelSpec spec;
  std::vector<float> clip;

  explicit Fixture(std::vector<int> dft_sizes = {256, 1024}, int dim = 16) {
    cfg.dft_sizes = std::move(dft_sizes);
    cfg.spectrum_seconds = 1.0;
    arch.embedding_dim = dim;
    arch.spectrum_stack = {{4, 64, 16}, {8, 16, 4}};
    arch.spectrogram_stack = {{4, 3, 2}, {8, 3, 2}};
    clip = Signal(1);
    spec = MakeModelSpec(cfg, static_cast<int>(clip.size()), arch);
  }

  static std::vector<float> Signal(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<float> d;
    std::vector<float> x(16000);
    for (auto& v : x) v = d(rng);
    return x;
  }
};

Errc CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return Errc::kInvalidArgument;
}

}  // namespace

TEST_CASE("joint embedding concatenates branches in order") {
  Fixture fx({256, 4096}, 128);
  CHECK(fx.spec.NumBranches() == 3);
  CHECK(fx.spec.JointDim() == 384);
  const EmbeddingModel model(fx.spec, 1);
  const JointEmbedding e = model.Forward(ExtractFeatures(fx.clip, fx.cfg));
  REQUIRE(e.branch.size() == 3);
  REQUIRE(e.cat.size() == 384);
  for (int m = 0; m < 3; ++m)
    for (int k = 0; k < 128; ++k) CHECK(e.cat[m * 128 + k] == e.branch[m][k]);
  for (float v : e.cat) CHECK(std::isfinite(v));
}

TEST_CASE("branches depend only on their own input") {
  Fixture fx;
  const EmbeddingModel model(fx.spec, 2);
  const FeatureSet f = ExtractFeatures(fx.clip, fx.cfg);
  const JointEmbedding base = model.Forward(f);
  for (int m = 0; m < 3; ++m) {
    FeatureSet g = f;
    if (m == 0) {
      std::fill(g.spectrum.begin(), g.spectrum.end(), 0.0f);
    } else {
      auto& v = g.spectrograms[m - 1].values;
      std::fill(v.begin(), v.end(), 0.0f);
    }
    const JointEmbedding e = model.Forward(g);
    for (int k = 0; k < 3; ++k) {
      CAPTURE(m);
      CAPTURE(k);
      if (k == m) {
        CHECK(e.branch[k] != base.branch[k]);
      } else {
        CHECK(e.branch[k] == base.branch[k]);
      }
    }
  }
}

TEST_CASE("inference is deterministic") {
  Fixture fx;
  const EmbeddingModel a(fx.spec, 3), b(fx.spec, 3);
  const FeatureSet f = ExtractFeatures(fx.clip, fx.cfg);
  CHECK(a.Forward(f).cat == a.Forward(f).cat);
  CHECK(a.Forward(f).cat == b.Forward(f).cat);
  const auto batch = a.ForwardBatch({&f, &f});
  CHECK(batch[0].cat == batch[1].cat);
  const auto single = a.Forward(f).cat;
  for (std::size_t k = 0; k < single.size(); ++k) CHECK(batch[0].cat[k] == doctest::Approx(single[k]).epsilon(1e-5));
}

TEST_CASE("parameter count is a function of the spec") {
  Fixture fx;
  for (const auto& b : fx.spec.branches) {
    Rng rng(4);
    CHECK(BuildBranch(b, rng).ParameterCount() == BranchParameterCount(b));
  }
  // Spectrum branch: log1p, bn, then conv(1->4, 1x64, /16), bn, relu, conv(4->8, 1x16, /4), bn, relu, linear.
  const BranchNetworkSpec& s = fx.spec.branches[0];
  CHECK(s.input_bins == 7801);
  const int w1 = (7801 - 64) / 16 + 1;
  const int w2 = (w1 - 16) / 4 + 1;
  const std::size_t expect = 2 + (4 * 64 + 4) + 2 * 4 + (8 * 4 * 16 + 8) + 2 * 8 + (8 * w2 * 16 + 16);
  CHECK(BranchParameterCount(s) == expect);
  std::size_t total = 0;
  for (const auto& b : fx.spec.branches) total += BranchParameterCount(b);
  CHECK(EmbeddingModel(fx.spec, 0).ParameterCount() == total);
}

TEST_CASE("checkpoint round trip is bit identical") {
  Fixture fx;
  const EmbeddingModel model(fx.spec, 5);
  const fs::path dir = fs::temp_directory_path() / "asdkit_ckpt";
  fs::create_directories(dir);
  const fs::path path = dir / CheckpointFileName(16);
  CHECK(path.filename() == "epoch=16.ckpt");
  SaveCheckpoint(path, model, 16, "abc123");
  const Checkpoint c = LoadCheckpoint(path, fx.spec);
  CHECK(c.epoch == 16);
  CHECK(c.config_hash == "abc123");
  const FeatureSet f = ExtractFeatures(Fixture::Signal(9), fx.cfg);
  CHECK(c.model.Forward(f).cat == model.Forward(f).cat);
}

TEST_CASE("checkpoint errors") {
  Fixture fx;
  const fs::path dir = fs::temp_directory_path() / "asdkit_ckpt_err";
  fs::create_directories(dir);
  SaveCheckpoint(dir / "a.ckpt", EmbeddingModel(fx.spec, 1), 1, "h");
  Fixture two({1024});
  CHECK(CodeOf([&] { LoadCheckpoint(dir / "a.ckpt", two.spec); }) == Errc::kShapeMismatch);
  std::ofstream(dir / "junk.ckpt") << "garbage";
  CHECK(CodeOf([&] { LoadCheckpoint(dir / "junk.ckpt"); }) == Errc::kCorruptFile);
  {
    std::ifstream in(dir / "a.ckpt", std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), {});
    std::ofstream(dir / "cut.ckpt", std::ios::binary) << bytes.substr(0, bytes.size() / 2);
  }
  CHECK(CodeOf([&] { LoadCheckpoint(dir / "cut.ckpt"); }) == Errc::kCorruptFile);
  CHECK(CodeOf([&] { LoadCheckpoint(dir / "missing.ckpt"); }) == Errc::kIoError);
}

TEST_CASE("feature sets with the wrong branch count are rejected") {
  Fixture fx;
  const EmbeddingModel model(fx.spec, 1);
  SpectralConfig one = fx.cfg;
  one.dft_sizes = {256};
  CHECK(CodeOf([&] { model.Forward(ExtractFeatures(fx.clip, one)); }) == Errc::kShapeMismatch);
}

TEST_CASE("model spec for a clip shorter than a dft size") {
  Fixture fx;
  CHECK(CodeOf([&] { MakeModelSpec(fx.cfg, 100, fx.arch); }) == Errc::kClipTooShort);
}
