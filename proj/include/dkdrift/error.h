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

#ifndef DKDRIFT_ERROR_H_
#define DKDRIFT_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace dkdrift {

enum class ErrorCode {
  // core model
  kEmptyTurns,
  kNonContiguousIndices,
  kDuplicateId,
  // numerics
  kDimensionMismatch,
  kEmptyTrainingSet,
  kNoConvergence,
  kInvalidConfig,
  // knowledge
  kNoFencedBlock,
  kMalformedEntry,
  kEmptyExamples,
  kMissingLibrary,
  kIndexOutOfRange,
  // gateway
  kTransport,
  kHttpStatus,
  kMalformedResponse,
  kTimeout,
  kRetriesExhausted,
  kAmbiguousVerdict,
  kNoVerdict,
  kNoClassMarker,
  // pipeline
  kNonRealTrainingConversation,
  // evaluation
  kMissingGold,
  kEmptyCounts,
  kMalformedRow,
  kUnknownLabel,
  kMalformedLine,
  kDatasetMismatch,
  kMalformedDocument,
  kIo,
};

std::string_view ErrorCodeName(ErrorCode code);

// Every failure in the library surfaces as this exception. The message is
// prefixed with the code name so logs stay greppable.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &detail);

  ErrorCode code() const { return code_; }
  const std::string &detail() const { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace dkdrift

#endif  // DKDRIFT_ERROR_H_
