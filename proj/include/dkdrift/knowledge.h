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

#ifndef DKDRIFT_KNOWLEDGE_H_
#define DKDRIFT_KNOWLEDGE_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dkdrift/model.h"

namespace dkdrift {

struct DkPattern {
  std::string name;
  std::string description;
  std::string example;
  std::vector<std::string> cue_terms;  // lowercase

  bool operator==(const DkPattern &) const = default;
};

struct PatternLibrary {
  std::string domain;  // "reviews" or "conversations"
  std::vector<DkPattern> patterns;
  std::vector<std::string> recommendations;
  std::string version;  // content hash prefix, see LibraryVersion()

  bool operator==(const PatternLibrary &) const = default;
};

// Prefix of the FNV-1a hash of the library content (everything but the
// version field), as 12 lowercase hex digits.
std::string LibraryVersion(const PatternLibrary &library);

// Fake review categories with examples and detection recommendations.
const PatternLibrary &SeedReviewLibrary();
// Manipulation cues for multi-turn conversations.
const PatternLibrary &SeedConversationCues();

// JSON file form with stable key order:
// {domain, version, patterns:[{name, description, example, cue_terms}],
//  recommendations:[...]}
std::string LibraryToJson(const PatternLibrary &library);
PatternLibrary LibraryFromJson(const std::string &text);
PatternLibrary LoadLibrary(const std::string &path);
void SaveLibrary(const PatternLibrary &library, const std::string &path);

// Machine-readable fenced block used in discovery replies:
//
//   ```dk-patterns
//   pattern: <name>
//   description: <one sentence>
//   example: <snippet>
//   cue_terms: <term> | <term>        (optional)
//
//   recommendation: <text>            (any number, anywhere in the block)
//   ```
std::string RenderFencedLibrary(const PatternLibrary &library);

// Parses the first fenced block of an LLM reply. The version is recomputed
// from content. Throws kNoFencedBlock or kMalformedEntry (with the 1-based
// line number in the reply).
PatternLibrary ParsePatternLibrary(std::string_view llm_text,
                                   std::string_view domain);

inline constexpr std::string_view kPatternsSlot = "{patterns}";
inline constexpr std::string_view kInputSlot = "{input}";

struct PromptTemplate {
  std::string id;
  std::string body;
  std::vector<std::string> placeholders;
  std::string output_contract;  // appended after the rendered body

  // Every declared placeholder must occur exactly once. Throws
  // kInvalidConfig.
  void Validate() const;
};

enum class TemplateKind { kDiscovery, kReviewClassification,
                          kConversationClassification, kDrift };

const PromptTemplate &DefaultTemplate(TemplateKind kind);

// Reads a UTF-8 template file. The placeholders required by `kind` are
// declared and validated; the output contract is left empty so the file owns
// the full prompt text.
PromptTemplate LoadTemplate(const std::string &path, TemplateKind kind);

// Substitutes slots in one pass (substituted text is never rescanned).
std::string RenderTemplate(const PromptTemplate &tmpl,
                           std::string_view patterns, std::string_view input);

// Library as "- name: description (e.g. example)" bullets under a heading;
// empty string for an empty library.
std::string RenderPatternBlock(const PatternLibrary &library);

// One "speaker: text" line per turn, in order. Newlines inside turn text are
// folded to spaces.
std::string RenderConversation(const Conversation &conv);

// Throws kEmptyExamples for an empty list or an example without a gold label.
std::string RenderDiscoveryPrompt(std::span<const Review> examples,
                                  const PromptTemplate &tmpl);

// With dk_enabled the patterns slot carries the library; without it the slot
// is empty. Throws kMissingLibrary when dk_enabled and library is null.
std::string RenderClassificationPrompt(const Review &review,
                                       const PatternLibrary *library,
                                       bool dk_enabled,
                                       const PromptTemplate &tmpl);
std::string RenderClassificationPrompt(const Conversation &conv,
                                       const PatternLibrary *library,
                                       bool dk_enabled,
                                       const PromptTemplate &tmpl);

// Line prefix marking the turn where drift was detected.
inline constexpr std::string_view kDriftMarker = ">> ";

// Throws kIndexOutOfRange.
std::string RenderDriftPrompt(const Conversation &conv,
                              std::size_t drift_turn_index,
                              const PatternLibrary &library,
                              const PromptTemplate &tmpl);

}  // namespace dkdrift

#endif  // DKDRIFT_KNOWLEDGE_H_
