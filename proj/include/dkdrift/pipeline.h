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

#ifndef DKDRIFT_PIPELINE_H_
#define DKDRIFT_PIPELINE_H_

#include <atomic>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dkdrift/error.h"
#include "dkdrift/featurize.h"
#include "dkdrift/knowledge.h"
#include "dkdrift/llm_gateway.h"
#include "dkdrift/model.h"
#include "dkdrift/ocdd.h"
#include "dkdrift/ocsvm.h"

namespace dkdrift {

struct PipelineConfig {
  std::shared_ptr<LlmBackend> llm1;
  std::shared_ptr<LlmBackend> llm2;
  bool dk_enabled = false;
  std::optional<PatternLibrary> review_library;
  std::optional<PatternLibrary> conversation_library;
  OcddConfig ocdd;
  FeaturizerConfig featurizer;
  int parallelism = 4;
  PromptTemplate review_template =
      DefaultTemplate(TemplateKind::kReviewClassification);
  PromptTemplate conversation_template =
      DefaultTemplate(TemplateKind::kConversationClassification);
  PromptTemplate drift_template = DefaultTemplate(TemplateKind::kDrift);

  // Throws kInvalidConfig for missing backends or bad numeric settings.
  void Validate() const;
};

// Featurizes every non-empty turn of the training conversations and fits the
// normal-behaviour OCSVM. All conversations must be labelled Real
// (kNonRealTrainingConversation); kEmptyTrainingSet when no turn has
// features.
OcsvmModel TrainNormalModel(std::span<const Conversation> training,
                            const PipelineConfig &config);

struct CorpusItem {
  std::string id;
  std::optional<Verdict> verdict;
  std::optional<ErrorCode> error_code;
  std::string error;
};

struct CorpusResult {
  std::vector<CorpusItem> items;  // input order

  std::vector<Verdict> verdicts() const;
  std::size_t error_count() const;
};

// Orchestrates the two LLM stages around the drift detector. The object is
// safe to share between worker threads.
class Pipeline {
 public:
  explicit Pipeline(PipelineConfig config);

  // Stage-1 review screening only. Errors carry the review id.
  Verdict ClassifyReview(const Review &review) const;

  // LLM-1 screening; flagged conversations stream their turns through a
  // fresh drift detector; detected drift goes to LLM-2 for classification.
  // Errors carry the conversation id and stage.
  Verdict AnalyzeConversation(const Conversation &conv,
                              const std::shared_ptr<const OcsvmModel> &model) const;

  // Up to config.parallelism analyses run concurrently; per-item failures
  // are recorded instead of aborting the run. Throws kDuplicateId.
  CorpusResult RunCorpus(std::span<const Conversation> convs,
                         const std::shared_ptr<const OcsvmModel> &model) const;
  CorpusResult RunReviews(std::span<const Review> reviews) const;

  const PipelineConfig &config() const { return config_; }
  long long ocdd_runs() const { return ocdd_runs_.load(); }

 private:
  std::pair<std::string, std::string> BackendIds() const;

  PipelineConfig config_;
  PatternLibrary empty_library_;
  mutable std::atomic<long long> ocdd_runs_{0};
};

}  // namespace dkdrift

#endif  // DKDRIFT_PIPELINE_H_
