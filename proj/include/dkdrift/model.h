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

#ifndef DKDRIFT_MODEL_H_
#define DKDRIFT_MODEL_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dkdrift {

enum class Label { kReal, kFake };

// Benign drift is spam-like; adversarial covers fraud, phishing and
// manipulation.
enum class DriftClass { kBenign, kAdversarial };

std::string_view LabelName(Label label);             // "real" / "fake"
Label LabelFromName(std::string_view text);             // case-insensitive
std::string_view DriftClassName(DriftClass drift);   // "benign" / "adversarial"
DriftClass DriftClassFromName(std::string_view text);  // case-insensitive

struct Turn {
  std::size_t index = 0;
  std::string speaker;
  std::string text;
};

struct Conversation {
  std::string id;
  std::vector<Turn> turns;
  std::optional<Label> gold_label;
  std::optional<DriftClass> gold_drift_class;
};

struct Review {
  std::string id;
  std::string text;
  std::optional<Label> gold_label;
};

// Final per-item output of the pipeline.
struct Verdict {
  std::string conversation_id;
  Label label = Label::kReal;
  bool dk_enabled = false;
  bool drift_detected = false;
  std::optional<std::size_t> drift_turn_index;
  std::optional<DriftClass> drift_class;
  std::string rationale;
  std::pair<std::string, std::string> backend_ids;

  bool operator==(const Verdict &) const = default;
};

// Returns the conversation unchanged when its turns are non-empty and indexed
// 0..n-1; throws kEmptyTurns or kNonContiguousIndices otherwise. Empty turn
// text is rejected with kEmptyTurns unless allow_empty_text is set.
const Conversation &ValidateConversation(const Conversation &conv,
                                         bool allow_empty_text = true);

// Validates every conversation and additionally rejects repeated ids
// (kDuplicateId).
void ValidateDataset(std::span<const Conversation> convs,
                     bool allow_empty_text = true);

// Checks the routing invariants a verdict must satisfy: a drift class or a
// drift turn implies drift was detected, and detected drift implies Fake.
bool VerdictIsConsistent(const Verdict &verdict);

}  // namespace dkdrift

#endif  // DKDRIFT_MODEL_H_
