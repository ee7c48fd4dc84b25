// Copyright 2026 The dkdrift Authors.
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

#include "dkdrift/error.h"

namespace dkdrift {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyTurns: return "EmptyTurns";
    case ErrorCode::kNonContiguousIndices: return "NonContiguousIndices";
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kEmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorCode::kNoConvergence: return "NoConvergence";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kNoFencedBlock: return "NoFencedBlock";
    case ErrorCode::kMalformedEntry: return "MalformedEntry";
    case ErrorCode::kEmptyExamples: return "EmptyExamples";
    case ErrorCode::kMissingLibrary: return "MissingLibrary";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kTransport: return "Transport";
    case ErrorCode::kHttpStatus: return "HttpStatus";
    case ErrorCode::kMalformedResponse: return "MalformedResponse";
    case ErrorCode::kTimeout: return "Timeout";
    case ErrorCode::kRetriesExhausted: return "RetriesExhausted";
    case ErrorCode::kAmbiguousVerdict: return "AmbiguousVerdict";
    case ErrorCode::kNoVerdict: return "NoVerdict";
    case ErrorCode::kNoClassMarker: return "NoClassMarker";
    case ErrorCode::kNonRealTrainingConversation: return "NonRealTrainingConversation";
    case ErrorCode::kMissingGold: return "MissingGold";
    case ErrorCode::kEmptyCounts: return "EmptyCounts";
    case ErrorCode::kMalformedRow: return "MalformedRow";
    case ErrorCode::kUnknownLabel: return "UnknownLabel";
    case ErrorCode::kMalformedLine: return "MalformedLine";
    case ErrorCode::kDatasetMismatch: return "DatasetMismatch";
    case ErrorCode::kMalformedDocument: return "MalformedDocument";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string &detail)
    : std::runtime_error(std::string(ErrorCodeName(code)) +
                         (detail.empty() ? "" : ": " + detail)),
      code_(code),
      detail_(detail) {}

}  // namespace dkdrift
