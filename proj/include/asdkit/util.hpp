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

#ifndef ASDKIT_UTIL_HPP_
#define ASDKIT_UTIL_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace asdkit {

using Rng = std::mt19937_64;

std::vector<std::string> SplitString(std::string_view s, char sep);

std::uint64_t Fnv1a64(std::string_view data);
std::string HexDigest(std::uint64_t value);

/// Derives an independent stream seed from a base seed and a salt.
std::uint64_t MixSeed(std::uint64_t base, std::uint64_t salt);

double Uniform(Rng& rng, double lo, double hi);
std::size_t UniformIndex(Rng& rng, std::size_t n);
double Gaussian(Rng& rng);

/// Minimal CSV table. Lines starting with '#' are metadata comments and are
/// kept in `comments` without the leading "# ".
struct CsvTable {
  std::vector<std::string> comments;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int Column(std::string_view name) const;  // -1 when absent
};

CsvTable ReadCsv(const std::filesystem::path& path);
void WriteCsv(const std::filesystem::path& path, const CsvTable& table);

std::string FormatDouble(double v, int precision = 17);

/// Runs fn(i) for every i in [0, n) on up to `workers` threads. The first
/// exception thrown by any call is rethrown after all threads finish.
void ParallelFor(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

}  // namespace asdkit

#endif  // ASDKIT_UTIL_HPP_
