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

#include "asdkit/error.hpp"

namespace asdkit {

std::string_view ErrcName(Errc code) {
  switch (code) {
    case Errc::kInvalidArgument: return "InvalidArgument";
    case Errc::kMalformedName: return "MalformedName";
    case Errc::kEmptyCorpus: return "EmptyCorpus";
    case Errc::kIoError: return "IoError";
    case Errc::kClipTooShort: return "ClipTooShort";
    case Errc::kShapeMismatch: return "ShapeMismatch";
    case Errc::kCorruptFile: return "CorruptFile";
    case Errc::kZeroEmbedding: return "ZeroEmbedding";
    case Errc::kSingleClass: return "SingleClassError";
    case Errc::kNonFiniteLoss: return "NonFiniteLoss";
    case Errc::kKeyMismatch: return "KeyMismatch";
    case Errc::kPoolTooSmall: return "PoolTooSmall";
    case Errc::kMissingClip: return "MissingClip";
    case Errc::kDimMismatch: return "DimMismatch";
    case Errc::kTooFewPoints: return "TooFewPoints";
    case Errc::kDegenerateCovariance: return "DegenerateCovariance";
    case Errc::kEmptySource: return "EmptySource";
    case Errc::kEmptyClass: return "EmptyClass";
    case Errc::kMissingPoints: return "MissingPoints";
    case Errc::kNotFitted: return "NotFitted";
  }
  return "Unknown";
}

ErrorCategory CategoryOf(Errc code) {
  switch (code) {
    case Errc::kInvalidArgument:
      return ErrorCategory::kUsage;
    case Errc::kZeroEmbedding:
    case Errc::kNonFiniteLoss:
    case Errc::kDegenerateCovariance:
      return ErrorCategory::kNumerical;
    default:
      return ErrorCategory::kData;
  }
}

}  // namespace asdkit
