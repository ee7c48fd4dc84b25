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

#include "dkdrift/knowledge.h"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <map>

#include "dkdrift/error.h"
#include "dkdrift/featurize.h"
#include "dkdrift/file_util.h"
#include "json.hpp"

namespace dkdrift {
namespace {

using nlohmann::ordered_json;

constexpr std::string_view kFenceInfo = "dk-patterns";

std::string Trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string Lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string SingleLine(std::string_view s) {
  std::string out(s);
  for (char &c : out) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return out;
}

std::vector<std::string> SplitLines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(start, end - start));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    start = end + 1;
  }
  return lines;
}

ordered_json ContentJson(const PatternLibrary &library) {
  ordered_json patterns = ordered_json::array();
  for (const DkPattern &p : library.patterns) {
    patterns.push_back(ordered_json{{"name", p.name},
                                    {"description", p.description},
                                    {"example", p.example},
                                    {"cue_terms", p.cue_terms}});
  }
  return ordered_json{{"domain", library.domain},
                      {"patterns", std::move(patterns)},
                      {"recommendations", library.recommendations}};
}

PatternLibrary Finalize(PatternLibrary library) {
  library.version = LibraryVersion(library);
  return library;
}

PatternLibrary MakeReviewLibrary() {
  PatternLibrary lib;
  lib.domain = "reviews";
  lib.patterns = {
      {"Overly Positive Reviews", "Exaggerated praise with superlatives.",
       "Best experience ever! Everything was perfect!",
       {"best experience ever", "everything was perfect", "best ever"}},
      {"Copy-Pasted Content", "Reused text across platforms.",
       "Generic review found verbatim in multiple places.", {}},
      {"Fake Expert Claims", "Posing as professionals without credibility.",
       "As a food critic, I guarantee...",
       {"as a food critic", "i guarantee"}},
      {"Buzzword Overuse", "Trendy terms lacking substance.",
       "Instagrammable, artisanal, obsessed!",
       {"instagrammable", "artisanal", "obsessed"}},
      {"Unnatural Language", "Awkward or overly formal phrasing.",
       "I am pleased to report...", {"i am pleased to report"}},
      {"Inconsistent Sentiment", "Mixed praise and criticism.",
       "Great food but terrible experience.", {"but terrible"}},
      {"Suspicious Timing", "Multiple reviews in short bursts.",
       "Clustered 5-star reviews within 24 hours.", {}},
      {"Lack of Details", "Vague statements with no specifics.",
       "It was good. I recommend it.", {"it was good", "i recommend it"}},
  };
  lib.recommendations = {
      "Linguistic Cues: Flag exaggerated or robotic phrasing.",
      "Linguistic Cues: Detect inconsistent sentiment within a single review.",
      "Temporal Patterns: Analyze timestamps for clustered activity.",
      "Temporal Patterns: Flag review bursts during unusual hours.",
      "Sentiment Analysis: Identify tonal contradictions or extreme polarity.",
      "Sentiment Analysis: Flag reviews exhibiting abrupt emotional shifts.",
      "Specificity and Contextuality: Detect vague or generic reviews lacking "
      "concrete details.",
      "Specificity and Contextuality: Compare sentiment with peer reviews for "
      "deviation.",
      "Common Red Flags: Overuse of superlatives (e.g., \"amazing,\" \"best "
      "ever\").",
      "Common Red Flags: Generic enthusiasm with no substance.",
      "Common Red Flags: Contradictory claims without logical support.",
      "Integration with ML Pipelines: Use labeled review patterns to train "
      "supervised models.",
      "Integration with ML Pipelines: Incorporate prompt-derived cues as "
      "structured input to LLMs.",
  };
  return Finalize(std::move(lib));
}

PatternLibrary MakeConversationCues() {
  PatternLibrary lib;
  lib.domain = "conversations";
  lib.patterns = {
      {"Flattery and Persuasion",
       "Use of excessive flattery or persuasive language.",
       "Someone as talented as you deserves this exclusive chance, trust me.",
       {"trust me", "exclusive chance", "rare opportunity", "only you"}},
      {"PII Requests",
       "Requests for personally identifiable information (PII).",
       "Could you confirm your home address and credit card details so I can "
       "register you?",
       {"credit card", "social security", "password", "date of birth",
        "bank account", "home address"}},
      {"Payment or Access Urgency",
       "Expressions of urgency related to payment or access.",
       "Pay the nominal fee today to activate the secure portal or the offer "
       "is gone.",
       {"nominal fee", "secure portal", "immediately", "urgent",
        "within one hour"}},
      {"Abrupt Tone or Topic Shift",
       "Abrupt or unnatural shifts in tone or topic.",
       "Anyway, forget the project, I need you to do something for me right "
       "now.",
       {"anyway", "by the way", "forget the"}},
  };
  return Finalize(std::move(lib));
}

std::map<TemplateKind, PromptTemplate> MakeDefaultTemplates() {
  std::map<TemplateKind, PromptTemplate> out;
  out[TemplateKind::kDiscovery] = PromptTemplate{
      "discovery-v1",
      "You are analysing labeled reviews to discover the linguistic patterns "
      "and categories that distinguish fake reviews from real ones.\n\n"
      "Labeled examples:\n{input}\n\n"
      "Group the characteristics of the fake reviews into categories. For "
      "each category give a short name, a one-sentence description and a "
      "representative example. Then list practical detection "
      "recommendations.",
      {std::string(kInputSlot)},
      "Reply with a single fenced block in exactly this format, one entry per "
      "category separated by blank lines:\n"
      "```dk-patterns\n"
      "pattern: <category name>\n"
      "description: <one sentence>\n"
      "example: <short snippet>\n"
      "cue_terms: <optional lowercase term> | <another term>\n"
      "\n"
      "recommendation: <one recommendation per line>\n"
      "```"};
  out[TemplateKind::kReviewClassification] = PromptTemplate{
      "review-classification-v1",
      "You are a fake review detection system.\n\n"
      "{patterns}Review:\n{input}\n\n"
      "Decide whether this review is FAKE or REAL.",
      {std::string(kPatternsSlot), std::string(kInputSlot)},
      "Respond only with True if the review is fake or False if it is real."};
  out[TemplateKind::kConversationClassification] = PromptTemplate{
      "conversation-classification-v1",
      "You are a fake conversation detection system.\n\n"
      "{patterns}Conversation:\n{input}\n\n"
      "Decide whether this conversation is FAKE (deceptive or malicious) or "
      "REAL.",
      {std::string(kPatternsSlot), std::string(kInputSlot)},
      "Respond only with True for a fake conversation or False for a real "
      "conversation."};
  out[TemplateKind::kDrift] = PromptTemplate{
      "drift-classification-v1",
      "You analyse concept drift in multi-turn conversations that were "
      "already flagged as deceptive. A statistical drift detector located a "
      "semantic shift in the conversation below.\n\n"
      "{patterns}Conversation:\n{input}\n\n"
      "Classify the drift as either a fraudulent attempt (phishing, scam or "
      "manipulation) or spamming (unsolicited repetition or irrelevant "
      "promotion). Examine the semantic flow, abrupt shifts in tone or topic, "
      "urgency, persuasion and requests for sensitive information.",
      {std::string(kPatternsSlot), std::string(kInputSlot)},
      "Explain the clues you used step by step, then finish with one final "
      "sentence naming the class: 'fraudulent' or 'spam'."};
  return out;
}

std::vector<std::string> RequiredSlots(TemplateKind kind) {
  if (kind == TemplateKind::kDiscovery) return {std::string(kInputSlot)};
  return {std::string(kPatternsSlot), std::string(kInputSlot)};
}

std::size_t CountOccurrences(std::string_view haystack, std::string_view needle) {
  std::size_t count = 0;
  for (std::size_t pos = haystack.find(needle); pos != std::string_view::npos;
       pos = haystack.find(needle, pos + needle.size())) {
    ++count;
  }
  return count;
}

std::string ConversationLines(const Conversation &conv,
                              std::optional<std::size_t> marked) {
  std::string out;
  for (const Turn &turn : conv.turns) {
    if (marked && *marked == turn.index) out += kDriftMarker;
    out += SingleLine(turn.speaker);
    out += ": ";
    out += SingleLine(turn.text);
    out += '\n';
  }
  if (!out.empty()) out.pop_back();
  return out;
}

[[noreturn]] void Malformed(std::size_t line, const std::string &what) {
  throw Error(ErrorCode::kMalformedEntry,
              "line " + std::to_string(line) + ": " + what);
}

}  // namespace

std::string LibraryVersion(const PatternLibrary &library) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(
                    Fnv1a64(ContentJson(library).dump())));
  return std::string(buf, 12);
}

const PatternLibrary &SeedReviewLibrary() {
  static const PatternLibrary library = MakeReviewLibrary();
  return library;
}

const PatternLibrary &SeedConversationCues() {
  static const PatternLibrary library = MakeConversationCues();
  return library;
}

std::string LibraryToJson(const PatternLibrary &library) {
  ordered_json content = ContentJson(library);
  ordered_json doc;
  doc["domain"] = content["domain"];
  doc["version"] = library.version.empty() ? LibraryVersion(library)
                                           : library.version;
  doc["patterns"] = content["patterns"];
  doc["recommendations"] = content["recommendations"];
  return doc.dump(2) + "\n";
}

PatternLibrary LibraryFromJson(const std::string &text) {
  PatternLibrary lib;
  try {
    const auto doc = nlohmann::json::parse(text);
    lib.domain = doc.at("domain").get<std::string>();
    for (const auto &p : doc.at("patterns")) {
      DkPattern pattern;
      pattern.name = p.at("name").get<std::string>();
      pattern.description = p.at("description").get<std::string>();
      pattern.example = p.at("example").get<std::string>();
      if (p.contains("cue_terms")) {
        pattern.cue_terms = p.at("cue_terms").get<std::vector<std::string>>();
      }
      lib.patterns.push_back(std::move(pattern));
    }
    if (doc.contains("recommendations")) {
      lib.recommendations =
          doc.at("recommendations").get<std::vector<std::string>>();
    }
    const std::string computed = LibraryVersion(lib);
    const std::string stored =
        doc.contains("version") ? doc.at("version").get<std::string>() : "";
    if (!stored.empty() && stored != computed) {
      throw Error(ErrorCode::kMalformedDocument,
                  "library version " + stored +
                      " does not match its content (" + computed + ")");
    }
    lib.version = computed;
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kMalformedDocument,
                std::string("library document: ") + e.what());
  }
  std::vector<std::string> names;
  for (const DkPattern &p : lib.patterns) {
    if (std::find(names.begin(), names.end(), p.name) != names.end()) {
      throw Error(ErrorCode::kMalformedDocument,
                  "duplicate pattern name " + p.name);
    }
    names.push_back(p.name);
  }
  return lib;
}

PatternLibrary LoadLibrary(const std::string &path) {
  return LibraryFromJson(internal::ReadFile(path));
}

void SaveLibrary(const PatternLibrary &library, const std::string &path) {
  internal::WriteFile(path, LibraryToJson(library));
}

std::string RenderFencedLibrary(const PatternLibrary &library) {
  std::string out = "```" + std::string(kFenceInfo) + "\n";
  for (std::size_t i = 0; i < library.patterns.size(); ++i) {
    const DkPattern &p = library.patterns[i];
    if (i > 0) out += "\n";
    out += "pattern: " + SingleLine(p.name) + "\n";
    out += "description: " + SingleLine(p.description) + "\n";
    out += "example: " + SingleLine(p.example) + "\n";
    if (!p.cue_terms.empty()) {
      out += "cue_terms: ";
      for (std::size_t k = 0; k < p.cue_terms.size(); ++k) {
        if (k > 0) out += " | ";
        out += SingleLine(p.cue_terms[k]);
      }
      out += "\n";
    }
  }
  if (!library.recommendations.empty()) out += "\n";
  for (const std::string &rec : library.recommendations) {
    out += "recommendation: " + SingleLine(rec) + "\n";
  }
  out += "```\n";
  return out;
}

PatternLibrary ParsePatternLibrary(std::string_view llm_text,
                                   std::string_view domain) {
  const std::vector<std::string> lines = SplitLines(llm_text);
  std::size_t open = lines.size();
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (Trim(lines[i]).rfind("```", 0) == 0) {
      open = i;
      break;
    }
  }
  std::size_t close = lines.size();
  for (std::size_t i = open + 1; i < lines.size(); ++i) {
    if (Trim(lines[i]) == "```") {
      close = i;
      break;
    }
  }
  if (open == lines.size() || close == lines.size()) {
    throw Error(ErrorCode::kNoFencedBlock, "reply has no complete ``` block");
  }

  PatternLibrary lib;
  lib.domain = std::string(domain);
  struct Pending {
    DkPattern pattern;
    std::size_t line = 0;
    bool has_description = false, has_example = false, has_cues = false;
  };
  std::optional<Pending> current;
  auto flush = [&]() {
    if (!current) return;
    if (!current->has_description) Malformed(current->line, "missing description");
    if (!current->has_example) Malformed(current->line, "missing example");
    for (const DkPattern &p : lib.patterns) {
      if (p.name == current->pattern.name) {
        Malformed(current->line, "duplicate pattern " + p.name);
      }
    }
    lib.patterns.push_back(std::move(current->pattern));
    current.reset();
  };

  for (std::size_t i = open + 1; i < close; ++i) {
    const std::size_t line_no = i + 1;
    const std::string line = Trim(lines[i]);
    if (line.empty()) continue;
    const std::size_t colon = line.find(':');
    if (colon == std::string::npos) Malformed(line_no, "expected 'key: value'");
    const std::string key = Lower(Trim(std::string_view(line).substr(0, colon)));
    const std::string value = Trim(std::string_view(line).substr(colon + 1));

    if (key == "pattern" || key == "name") {
      flush();
      if (value.empty()) Malformed(line_no, "empty pattern name");
      current = Pending{};
      current->pattern.name = value;
      current->line = line_no;
    } else if (key == "recommendation") {
      if (value.empty()) Malformed(line_no, "empty recommendation");
      lib.recommendations.push_back(value);
    } else if (key == "description" || key == "example" || key == "cue_terms") {
      if (!current) Malformed(line_no, key + " outside a pattern entry");
      bool &seen = key == "description" ? current->has_description
                   : key == "example"   ? current->has_example
                                        : current->has_cues;
      if (seen) Malformed(line_no, "repeated " + key);
      seen = true;
      if (key == "description") {
        current->pattern.description = value;
      } else if (key == "example") {
        current->pattern.example = value;
      } else {
        std::size_t start = 0;
        while (start <= value.size()) {
          std::size_t bar = value.find('|', start);
          if (bar == std::string::npos) bar = value.size();
          std::string term = Lower(Trim(std::string_view(value).substr(start, bar - start)));
          if (!term.empty()) current->pattern.cue_terms.push_back(std::move(term));
          start = bar + 1;
        }
      }
    } else {
      Malformed(line_no, "unknown key '" + key + "'");
    }
  }
  flush();
  if (lib.patterns.empty()) Malformed(open + 1, "block has no pattern entries");
  return Finalize(std::move(lib));
}

void PromptTemplate::Validate() const {
  for (const std::string &slot : placeholders) {
    const std::size_t count = CountOccurrences(body, slot);
    if (count != 1) {
      throw Error(ErrorCode::kInvalidConfig,
                  "template " + id + ": placeholder " + slot + " occurs " +
                      std::to_string(count) + " times, expected once");
    }
  }
}

const PromptTemplate &DefaultTemplate(TemplateKind kind) {
  static const std::map<TemplateKind, PromptTemplate> templates =
      MakeDefaultTemplates();
  return templates.at(kind);
}

PromptTemplate LoadTemplate(const std::string &path, TemplateKind kind) {
  PromptTemplate tmpl{path, internal::ReadFile(path), RequiredSlots(kind), ""};
  tmpl.Validate();
  return tmpl;
}

std::string RenderTemplate(const PromptTemplate &tmpl,
                           std::string_view patterns, std::string_view input) {
  std::string out;
  out.reserve(tmpl.body.size() + patterns.size() + input.size() +
              tmpl.output_contract.size() + 2);
  std::string_view body = tmpl.body;
  std::size_t pos = 0;
  while (pos < body.size()) {
    const std::size_t p = body.find(kPatternsSlot, pos);
    const std::size_t q = body.find(kInputSlot, pos);
    const std::size_t next = std::min(p, q);
    if (next == std::string_view::npos) {
      out.append(body.substr(pos));
      break;
    }
    out.append(body.substr(pos, next - pos));
    if (next == p) {
      out.append(patterns);
      pos = next + kPatternsSlot.size();
    } else {
      out.append(input);
      pos = next + kInputSlot.size();
    }
  }
  if (!tmpl.output_contract.empty()) {
    out += "\n\n";
    out += tmpl.output_contract;
  }
  return out;
}

std::string RenderPatternBlock(const PatternLibrary &library) {
  if (library.patterns.empty() && library.recommendations.empty()) return "";
  std::string out = "Known patterns and categories of deceptive " +
                    (library.domain.empty() ? std::string("content")
                                            : library.domain) +
                    ":\n";
  for (const DkPattern &p : library.patterns) {
    out += "- " + SingleLine(p.name) + ": " + SingleLine(p.description) +
           " Example: " + SingleLine(p.example) + "\n";
  }
  if (!library.recommendations.empty()) {
    out += "Detection recommendations:\n";
    for (const std::string &rec : library.recommendations) {
      out += "- " + SingleLine(rec) + "\n";
    }
  }
  out += "Use these patterns when judging the input.\n\n";
  return out;
}

std::string RenderConversation(const Conversation &conv) {
  return ConversationLines(conv, std::nullopt);
}

std::string RenderDiscoveryPrompt(std::span<const Review> examples,
                                  const PromptTemplate &tmpl) {
  if (examples.empty()) {
    throw Error(ErrorCode::kEmptyExamples, "no labeled examples");
  }
  std::string input;
  std::size_t n = 0;
  for (const Review &r : examples) {
    if (!r.gold_label) {
      throw Error(ErrorCode::kEmptyExamples,
                  "example " + r.id + " has no gold label");
    }
    input += std::to_string(++n) + ". [" +
             std::string(LabelName(*r.gold_label)) + "] " + SingleLine(r.text) +
             "\n";
  }
  input.pop_back();
  return RenderTemplate(tmpl, "", input);
}

std::string RenderClassificationPrompt(const Review &review,
                                       const PatternLibrary *library,
                                       bool dk_enabled,
                                       const PromptTemplate &tmpl) {
  if (dk_enabled && library == nullptr) {
    throw Error(ErrorCode::kMissingLibrary, "review " + review.id);
  }
  return RenderTemplate(tmpl, dk_enabled ? RenderPatternBlock(*library) : "",
                        review.text);
}

std::string RenderClassificationPrompt(const Conversation &conv,
                                       const PatternLibrary *library,
                                       bool dk_enabled,
                                       const PromptTemplate &tmpl) {
  if (dk_enabled && library == nullptr) {
    throw Error(ErrorCode::kMissingLibrary, "conversation " + conv.id);
  }
  return RenderTemplate(tmpl, dk_enabled ? RenderPatternBlock(*library) : "",
                        RenderConversation(conv));
}

std::string RenderDriftPrompt(const Conversation &conv,
                              std::size_t drift_turn_index,
                              const PatternLibrary &library,
                              const PromptTemplate &tmpl) {
  if (drift_turn_index >= conv.turns.size()) {
    throw Error(ErrorCode::kIndexOutOfRange,
                "drift turn " + std::to_string(drift_turn_index) +
                    " in a conversation of " +
                    std::to_string(conv.turns.size()) + " turns");
  }
  const std::string input =
      "(The turn where drift was detected is prefixed with \">>\".)\n" +
      ConversationLines(conv, drift_turn_index);
  return RenderTemplate(tmpl, RenderPatternBlock(library), input);
}

}  // namespace dkdrift
