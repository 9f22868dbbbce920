// Copyright 2026 The embprobe Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef EMBPROBE_ERROR_HPP_
#define EMBPROBE_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace embprobe {

enum class ErrorCode {
  kIo,
  kInvalidArgument,
  // corpus
  kDuplicateKey,
  kMissingColumn,
  kBadValue,
  kBadMagic,
  kDimMismatch,
  kNonFinite,
  kMissingEmbedding,
  kOrphanEmbedding,
  kSingletonSpeaker,
  // simmetrics
  kZeroVector,
  kInsufficientPairs,
  kDegenerateTrials,
  kEmptyGroup,
  // probes
  kSingleClass,
  kConstantTarget,
  kLengthMismatch,
  kZeroVariance,
  // projection
  kDegenerateDistances,
  // synthbench
  kSpecInvalid,
  // report
  kEmptyReport,
  kLabelMissing,
};

std::string_view ToString(ErrorCode code);

/// Domain error raised by every module. The message carries file/row context
/// where it is known; code() is what tests and the CLI dispatch on.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace embprobe

#endif  // EMBPROBE_ERROR_HPP_
