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

#include <atomic>
#include <filesystem>
#include <set>
#include <stdexcept>

#include "asdkit/error.hpp"
#include "asdkit/util.hpp"

using namespace asdkit;

TEST_CASE("split keeps empty fields") {
  auto f = SplitString("a,,b,", ',');
  REQUIRE(f.size() == 4);
  CHECK(f[0] == "a");
  CHECK(f[1].empty());
  CHECK(f[2] == "b");
  CHECK(f[3].empty());
}

TEST_CASE("fnv1a64 reference values") {
  CHECK(Fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(Fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(HexDigest(0xaf63dc4c8601ec8cull) == "af63dc4c8601ec8c");
  CHECK(HexDigest(1) == "0000000000000001");
}

TEST_CASE("mixed seeds differ per salt and are stable") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 100; ++s) seen.insert(MixSeed(7, s));
  CHECK(seen.size() == 100);
  CHECK(MixSeed(7, 3) == MixSeed(7, 3));
  CHECK(MixSeed(7, 3) != MixSeed(8, 3));
}

TEST_CASE("uniform draws stay in half-open range") {
  Rng rng(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = Uniform(rng, -5.0, 5.0);
    CHECK(u >= -5.0);
    CHECK(u < 5.0);
    CHECK(UniformIndex(rng, 3) < 3u);
  }
}

TEST_CASE("csv round trip with comments") {
  const auto path = std::filesystem::temp_directory_path() / "asdkit_util_csv.csv";
  CsvTable t;
  t.comments = {"config_hash=abc", "method=none"};
  t.header = {"clip_id", "score"};
  t.rows = {{"m/a", "0.5"}, {"m/b", ""}};
  WriteCsv(path, t);
  const CsvTable r = ReadCsv(path);
  CHECK(r.comments == t.comments);
  CHECK(r.header == t.header);
  CHECK(r.rows == t.rows);
  CHECK(r.Column("score") == 1);
  CHECK(r.Column("nope") == -1);
  std::filesystem::remove(path);
}

TEST_CASE("reading a missing csv is an io error") {
  try {
    ReadCsv("/nonexistent/asdkit.csv");
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kIoError);
  }
}

TEST_CASE("format double round trips") {
  const double v = 0.1 + 0.2;
  CHECK(std::stod(FormatDouble(v)) == v);
}

TEST_CASE("parallel for visits every index once") {
  for (int workers : {1, 3}) {
    std::vector<std::atomic<int>> hits(57);
    ParallelFor(hits.size(), workers, [&](std::size_t i) { hits[i]++; });
    for (auto& h : hits) CHECK(h.load() == 1);
  }
}

TEST_CASE("parallel for rethrows") {
  CHECK_THROWS_AS(ParallelFor(10, 2,
                              [](std::size_t i) {
                                if (i == 4) throw std::runtime_error("boom");
                              }),
                  std::runtime_error);
}

TEST_CASE("error categories drive exit codes") {
  CHECK(CategoryOf(Errc::kInvalidArgument) == ErrorCategory::kUsage);
  CHECK(CategoryOf(Errc::kMalformedName) == ErrorCategory::kData);
  CHECK(CategoryOf(Errc::kNonFiniteLoss) == ErrorCategory::kNumerical);
  CHECK(CategoryOf(Errc::kDegenerateCovariance) == ErrorCategory::kNumerical);
  const Error e(Errc::kMissingClip, "x");
  CHECK(std::string(e.what()).find(std::string(ErrcName(Errc::kMissingClip))) == 0);
}
