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

#ifndef DKDRIFT_EVAL_H_
#define DKDRIFT_EVAL_H_

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dkdrift/model.h"
#include "dkdrift/pipeline.h"

namespace dkdrift {

// Binary counts with Fake as the positive class.
struct ConfusionCounts {
  long long tp = 0;
  long long fp = 0;
  long long fn = 0;
  long long tn = 0;

  long long total() const { return tp + fp + fn + tn; }
  bool operator==(const ConfusionCounts &) const = default;
};

struct Metrics {
  double accuracy = 0;
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

// Throws kMissingGold for a verdict whose id has no gold label.
ConfusionCounts Accumulate(std::span<const Verdict> verdicts,
                           const std::map<std::string, Label> &golds);

// Zero-denominator precision, recall and f1 are 0. Throws kEmptyCounts.
Metrics ComputeMetrics(const ConfusionCounts &counts);

// Fraction to integer percent, rounding half up.
int RoundPercent(double fraction);

// ---- datasets ----

// CSV with a header naming the columns id, text and label (any order).
// Labels are real/fake, case-insensitive; an empty label means unlabeled.
// Throws kMalformedRow or kUnknownLabel with the 1-based line number.
std::vector<Review> LoadReviews(const std::string &path);
std::vector<Review> ParseReviewsCsv(const std::string &text);
std::string RenderReviewsCsv(std::span<const Review> reviews);

struct ReviewClassCounts {
  std::size_t real = 0;
  std::size_t fake = 0;
  std::size_t unlabeled = 0;
};
ReviewClassCounts CountReviewClasses(std::span<const Review> reviews);

enum class Split { kTrain, kTest };

struct ConversationRecord {
  Conversation conv;
  Split split = Split::kTest;
};

// JSONL, one conversation per line:
// {id, split: train|test, label: real|fake, turns: [{speaker, text}],
//  drift_class?: benign|adversarial}. Turn indices follow position.
// Throws kMalformedLine or kUnknownLabel with the 1-based line number.
std::vector<ConversationRecord> LoadConversations(const std::string &path);
std::vector<ConversationRecord> ParseConversationsJsonl(const std::string &text);
std::string RenderConversationsJsonl(std::span<const ConversationRecord> records);

struct SplitCounts {
  std::size_t train_real = 0, train_fake = 0, test_real = 0, test_fake = 0;
};
SplitCounts CountSplits(std::span<const ConversationRecord> records);

// Converts a CSV with columns id, split, label, dialogue (and optionally
// drift_class) where dialogue holds one "speaker: text" line per turn.
std::vector<ConversationRecord> ConvertDialogueCsv(const std::string &text);

std::string DatasetDigest(std::span<const Review> reviews);
std::string DatasetDigest(std::span<const Conversation> convs);

// ---- verdicts and reports ----

std::string VerdictToJsonLine(const Verdict &verdict);
Verdict VerdictFromJsonLine(const std::string &line);

struct ErrorEntry {
  std::string id;
  std::string message;
};

struct EvalReport {
  std::string run_id;
  std::string task;  // "reviews" or "conversations"
  std::string config_digest;
  std::string dataset_digest;
  std::string llm1_id;
  std::string llm2_id;
  bool dk_enabled = false;
  ConfusionCounts counts;
  Metrics metrics;
  std::vector<ErrorEntry> errors;  // excluded from counts

  std::size_t error_count() const { return errors.size(); }
};

// Errored items are excluded from the counts and listed in the report.
// Throws kMissingGold, kEmptyCounts when nothing was scored.
EvalReport BuildReport(const CorpusResult &result,
                       const std::map<std::string, Label> &golds,
                       const std::string &task, const std::string &config_digest,
                       const std::string &dataset_digest,
                       const std::string &llm1_id, const std::string &llm2_id,
                       bool dk_enabled);

std::string ReportToJson(const EvalReport &report);
EvalReport ReportFromJson(const std::string &text);

// Integer percentages published for other systems, shown as context rows.
struct ReferenceRow {
  std::string model;
  std::optional<std::array<int, 4>> without_dk;  // acc, prec, rec, f1
  std::optional<std::array<int, 4>> with_dk;
};
std::span<const ReferenceRow> ReportedConversationResults();
std::span<const ReferenceRow> ReportedReviewAccuracy();  // accuracy only

std::string RenderReportText(const EvalReport &report,
                             std::span<const ReferenceRow> references = {});

struct MetricDeltas {
  double accuracy = 0, precision = 0, recall = 0, f1 = 0;
};

// b - a for each metric. Throws kDatasetMismatch when the dataset digests
// differ.
MetricDeltas CompareRuns(const EvalReport &a, const EvalReport &b);

// Two metric blocks (one per report, titled by its DK setting) plus signed
// deltas in percentage points.
std::string RenderComparison(const EvalReport &a, const EvalReport &b,
                             std::span<const ReferenceRow> references = {});

}  // namespace dkdrift

#endif  // DKDRIFT_EVAL_H_
