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

#include "dkdrift/model.h"

#include <algorithm>
#include <cctype>
#include <string>
#include <unordered_set>

#include "dkdrift/error.h"

namespace dkdrift {
namespace {

std::string Lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

}  // namespace

std::string_view LabelName(Label label) {
  return label == Label::kFake ? "fake" : "real";
}

Label LabelFromName(std::string_view text) {
  const std::string lower = Lower(text);
  if (lower == "fake") return Label::kFake;
  if (lower == "real") return Label::kReal;
  throw Error(ErrorCode::kUnknownLabel, std::string(text));
}

std::string_view DriftClassName(DriftClass drift) {
  return drift == DriftClass::kAdversarial ? "adversarial" : "benign";
}

DriftClass DriftClassFromName(std::string_view text) {
  const std::string lower = Lower(text);
  if (lower == "adversarial") return DriftClass::kAdversarial;
  if (lower == "benign") return DriftClass::kBenign;
  throw Error(ErrorCode::kUnknownLabel, std::string(text));
}

const Conversation &ValidateConversation(const Conversation &conv,
                                         bool allow_empty_text) {
  if (conv.turns.empty()) {
    throw Error(ErrorCode::kEmptyTurns, "conversation " + conv.id);
  }
  for (std::size_t i = 0; i < conv.turns.size(); ++i) {
    const Turn &turn = conv.turns[i];
    if (turn.index != i) {
      throw Error(ErrorCode::kNonContiguousIndices,
                  "conversation " + conv.id + ": turn at position " +
                      std::to_string(i) + " has index " +
                      std::to_string(turn.index));
    }
    if (!allow_empty_text && turn.text.empty()) {
      throw Error(ErrorCode::kEmptyTurns, "conversation " + conv.id +
                                              ": turn " + std::to_string(i) +
                                              " has empty text");
    }
  }
  return conv;
}

void ValidateDataset(std::span<const Conversation> convs,
                     bool allow_empty_text) {
  std::unordered_set<std::string> seen;
  for (const Conversation &conv : convs) {
    ValidateConversation(conv, allow_empty_text);
    if (!seen.insert(conv.id).second) {
      throw Error(ErrorCode::kDuplicateId, conv.id);
    }
  }
}

bool VerdictIsConsistent(const Verdict &verdict) {
  if (verdict.drift_class && !verdict.drift_detected) return false;
  if (verdict.drift_turn_index.has_value() != verdict.drift_detected) {
    return false;
  }
  if (verdict.drift_detected && verdict.label != Label::kFake) return false;
  return true;
}

}  // namespace dkdrift
