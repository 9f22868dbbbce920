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

#include "embprobe/error.hpp"

namespace embprobe {

std::string_view ToString(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDuplicateKey: return "DuplicateKey";
    case ErrorCode::kMissingColumn: return "MissingColumn";
    case ErrorCode::kBadValue: return "BadValue";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kDimMismatch: return "DimMismatch";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kMissingEmbedding: return "MissingEmbedding";
    case ErrorCode::kOrphanEmbedding: return "OrphanEmbedding";
    case ErrorCode::kSingletonSpeaker: return "SingletonSpeaker";
    case ErrorCode::kZeroVector: return "ZeroVector";
    case ErrorCode::kInsufficientPairs: return "InsufficientPairs";
    case ErrorCode::kDegenerateTrials: return "DegenerateTrials";
    case ErrorCode::kEmptyGroup: return "EmptyGroup";
    case ErrorCode::kSingleClass: return "SingleClass";
    case ErrorCode::kConstantTarget: return "ConstantTarget";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kZeroVariance: return "ZeroVariance";
    case ErrorCode::kDegenerateDistances: return "DegenerateDistances";
    case ErrorCode::kSpecInvalid: return "SpecInvalid";
    case ErrorCode::kEmptyReport: return "EmptyReport";
    case ErrorCode::kLabelMissing: return "LabelMissing";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string &message)
    : std::runtime_error(std::string(ToString(code)) + ": " + message),
      code_(code) {}

}  // namespace embprobe
