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

#ifndef ASDKIT_ERROR_HPP_
#define ASDKIT_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace asdkit {

enum class Errc {
  kInvalidArgument,
  kMalformedName,
  kEmptyCorpus,
  kIoError,
  kClipTooShort,
  kShapeMismatch,
  kCorruptFile,
  kZeroEmbedding,
  kSingleClass,
  kNonFiniteLoss,
  kKeyMismatch,
  kPoolTooSmall,
  kMissingClip,
  kDimMismatch,
  kTooFewPoints,
  kDegenerateCovariance,
  kEmptySource,
  kEmptyClass,
  kMissingPoints,
  kNotFitted,
};

std::string_view ErrcName(Errc code);

/// Coarse grouping used by the CLI to pick an exit code.
enum class ErrorCategory { kUsage, kData, kNumerical };

ErrorCategory CategoryOf(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(ErrcName(code)) + ": " + what),
        code_(code) {}

  Errc code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return CategoryOf(code_); }

 private:
  Errc code_;
};

[[noreturn]] inline void Fail(Errc code, const std::string& what) {
  throw Error(code, what);
}

inline void Require(bool cond, Errc code, const std::string& what) {
  if (!cond) Fail(code, what);
}

}  // namespace asdkit

#endif  // ASDKIT_ERROR_HPP_
