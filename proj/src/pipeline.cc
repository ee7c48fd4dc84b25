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

#include "dkdrift/pipeline.h"

#include <functional>
#include <thread>
#include <unordered_set>

namespace dkdrift {
namespace {

[[noreturn]] void Rethrow(const Error &e, const std::string &context) {
  throw Error(e.code(), context + ": " + e.detail());
}

std::string AskOne(LlmBackend &backend, std::string prompt) {
  const ChatMessage message{ChatRole::kUser, std::move(prompt)};
  return backend.Complete(std::span<const ChatMessage>(&message, 1));
}

// Runs task(i) for i in [0, n) on up to `parallelism` threads.
void ParallelFor(std::size_t n, int parallelism,
                 const std::function<void(std::size_t)> &task) {
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, parallelism)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) task(i);
    });
  }
}

template <typename Fn>
CorpusItem Capture(const std::string &id, Fn &&fn) {
  CorpusItem item;
  item.id = id;
  try {
    item.verdict = fn();
  } catch (const Error &e) {
    item.error_code = e.code();
    item.error = e.what();
  } catch (const std::exception &e) {
    item.error = e.what();
  }
  return item;
}

}  // namespace

void PipelineConfig::Validate() const {
  if (!llm1 || !llm2) {
    throw Error(ErrorCode::kInvalidConfig, "pipeline needs llm1 and llm2");
  }
  if (parallelism <= 0) {
    throw Error(ErrorCode::kInvalidConfig, "parallelism must be positive");
  }
  ocdd.Validate();
  featurizer.Validate();
  review_template.Validate();
  conversation_template.Validate();
  drift_template.Validate();
}

std::vector<Verdict> CorpusResult::verdicts() const {
  std::vector<Verdict> out;
  for (const CorpusItem &item : items) {
    if (item.verdict) out.push_back(*item.verdict);
  }
  return out;
}

std::size_t CorpusResult::error_count() const {
  std::size_t n = 0;
  for (const CorpusItem &item : items) n += item.verdict ? 0 : 1;
  return n;
}

OcsvmModel TrainNormalModel(std::span<const Conversation> training,
                            const PipelineConfig &config) {
  std::vector<FeatureVector> points;
  for (const Conversation &conv : training) {
    if (conv.gold_label != Label::kReal) {
      throw Error(ErrorCode::kNonRealTrainingConversation, conv.id);
    }
    for (const Turn &turn : conv.turns) {
      FeatureVector v = Featurize(turn.text, config.featurizer);
      if (Norm(v) > 0) points.push_back(std::move(v));
    }
  }
  if (points.empty()) {
    throw Error(ErrorCode::kEmptyTrainingSet,
                "no training turn produced features");
  }
  return FitOcsvm(points, config.ocdd.svm);
}

Pipeline::Pipeline(PipelineConfig config) : config_(std::move(config)) {
  config_.Validate();
  empty_library_.domain = "conversations";
}

std::pair<std::string, std::string> Pipeline::BackendIds() const {
  return {config_.llm1->descriptor().id, config_.llm2->descriptor().id};
}

Verdict Pipeline::ClassifyReview(const Review &review) const {
  const std::string context = "review " + review.id;
  try {
    const PatternLibrary *library =
        config_.review_library ? &*config_.review_library : nullptr;
    const std::string prompt = RenderClassificationPrompt(
        review, library, config_.dk_enabled, config_.review_template);
    const std::string reply = AskOne(*config_.llm1, prompt);
    Verdict verdict;
    verdict.conversation_id = review.id;
    verdict.label = ParseBinaryVerdict(reply);
    verdict.dk_enabled = config_.dk_enabled;
    verdict.rationale = reply;
    verdict.backend_ids = {config_.llm1->descriptor().id, ""};
    return verdict;
  } catch (const Error &e) {
    Rethrow(e, context);
  }
}

Verdict Pipeline::AnalyzeConversation(
    const Conversation &conv,
    const std::shared_ptr<const OcsvmModel> &model) const {
  std::string context = "conversation " + conv.id;
  try {
    ValidateConversation(conv);
    if (!model || model->dimension() != config_.featurizer.dimension()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "model dimension " +
                      std::to_string(model ? model->dimension() : 0) +
                      " vs featurizer " +
                      std::to_string(config_.featurizer.dimension()));
    }

    Verdict verdict;
    verdict.conversation_id = conv.id;
    verdict.dk_enabled = config_.dk_enabled;
    verdict.backend_ids = BackendIds();

    context += " stage 1 (" + config_.llm1->descriptor().id + ")";
    const PatternLibrary *cues = config_.conversation_library
                                     ? &*config_.conversation_library
                                     : nullptr;
    const std::string reply1 = AskOne(
        *config_.llm1, RenderClassificationPrompt(conv, cues, config_.dk_enabled,
                                                  config_.conversation_template));
    verdict.label = ParseBinaryVerdict(reply1);
    verdict.rationale = reply1;
    if (verdict.label == Label::kReal) return verdict;

    context = "conversation " + conv.id + " stage 2 (ocdd)";
    ++ocdd_runs_;
    OcddDetector detector(model, config_.ocdd);
    std::optional<std::size_t> drift_turn;
    for (const Turn &turn : conv.turns) {
      const ObserveResult r = detector.Observe(Featurize(turn.text, config_.featurizer));
      if (r.drift_fired) {
        drift_turn = r.drift_index;
        break;
      }
    }
    if (!drift_turn) return verdict;

    context = "conversation " + conv.id + " stage 3 (" +
              config_.llm2->descriptor().id + ")";
    const PatternLibrary &library =
        config_.dk_enabled && cues != nullptr ? *cues : empty_library_;
    const std::string reply2 = AskOne(
        *config_.llm2,
        RenderDriftPrompt(conv, *drift_turn, library, config_.drift_template));
    auto [drift_class, rationale] = ParseDriftClass(reply2);
    verdict.drift_detected = true;
    verdict.drift_turn_index = drift_turn;
    verdict.drift_class = drift_class;
    verdict.rationale = std::move(rationale);
    return verdict;
  } catch (const Error &e) {
    Rethrow(e, context);
  }
}

CorpusResult Pipeline::RunCorpus(
    std::span<const Conversation> convs,
    const std::shared_ptr<const OcsvmModel> &model) const {
  std::unordered_set<std::string> ids;
  for (const Conversation &conv : convs) {
    if (!ids.insert(conv.id).second) throw Error(ErrorCode::kDuplicateId, conv.id);
  }
  CorpusResult result;
  result.items.resize(convs.size());
  ParallelFor(convs.size(), config_.parallelism, [&](std::size_t i) {
    result.items[i] = Capture(convs[i].id, [&] {
      return AnalyzeConversation(convs[i], model);
    });
  });
  return result;
}

CorpusResult Pipeline::RunReviews(std::span<const Review> reviews) const {
  std::unordered_set<std::string> ids;
  for (const Review &review : reviews) {
    if (!ids.insert(review.id).second) throw Error(ErrorCode::kDuplicateId, review.id);
  }
  CorpusResult result;
  result.items.resize(reviews.size());
  ParallelFor(reviews.size(), config_.parallelism, [&](std::size_t i) {
    result.items[i] = Capture(reviews[i].id, [&] {
      return ClassifyReview(reviews[i]);
    });
  });
  return result;
}

}  // namespace dkdrift
