// Copyright 2026 The uncset Authors
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

#include "uncset/error.h"

namespace uncset {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch:
      return "DimensionMismatch";
    case ErrorCode::kInvalidArgument:
      return "InvalidArgument";
    case ErrorCode::kNotPositiveDefinite:
      return "NotPositiveDefinite";
    case ErrorCode::kDiscontinuousActivation:
      return "DiscontinuousActivation";
    case ErrorCode::kIndexOutOfRange:
      return "IndexOutOfRange";
    case ErrorCode::kDegenerateData:
      return "DegenerateData";
    case ErrorCode::kIterationLimit:
      return "IterationLimit";
    case ErrorCode::kCutLimit:
      return "CutLimit";
    case ErrorCode::kTooLarge:
      return "TooLarge";
    case ErrorCode::kNoConvergence:
      return "NoConvergence";
    case ErrorCode::kEmptyBoundary:
      return "EmptyBoundary";
    case ErrorCode::kUnreachable:
      return "Unreachable";
    case ErrorCode::kMasterInfeasible:
      return "MasterInfeasible";
    case ErrorCode::kParseError:
      return "ParseError";
    case ErrorCode::kIoError:
      return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code) {}

}  // namespace uncset
