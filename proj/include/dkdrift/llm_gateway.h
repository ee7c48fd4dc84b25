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

#ifndef DKDRIFT_LLM_GATEWAY_H_
#define DKDRIFT_LLM_GATEWAY_H_

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dkdrift/model.h"

namespace dkdrift {

// Reply rule for the offline backend: matches when any term occurs as a
// case-insensitive substring of the last user message.
struct MockRule {
  std::vector<std::string> terms;
  std::string reply;
};

struct MockRuleSet {
  std::vector<MockRule> rules;  // first match wins
  std::string default_reply;
};

// {"rules": [{"terms": [...], "reply": "..."}], "default_reply": "..."}
MockRuleSet MockRuleSetFromJson(const std::string &text);
MockRuleSet LoadMockRuleSet(const std::string &path);

enum class BackendKind { kHttp, kMock };

struct BackendDescriptor {
  std::string id;
  BackendKind kind = BackendKind::kMock;
  std::string endpoint;    // full URL of the chat-completions route
  std::string model_name;
  double temperature = 0;
  int max_tokens = 512;
  std::chrono::milliseconds timeout{60000};
  int max_retries = 2;
  std::string api_key_env;  // credential is read from this variable
  std::chrono::milliseconds backoff_initial{500};
  int max_in_flight = 4;
  MockRuleSet mock;

  // Throws kInvalidConfig.
  void Validate() const;
};

enum class ChatRole { kSystem, kUser, kAssistant };

struct ChatMessage {
  ChatRole role = ChatRole::kUser;
  std::string content;
};

std::string_view ChatRoleName(ChatRole role);

// Deterministic reply of the mock backend.
std::string MockComplete(const MockRuleSet &rules,
                         std::span<const ChatMessage> messages);

// Request body of the chat-completion wire protocol.
std::string BuildChatRequest(const BackendDescriptor &backend,
                             std::span<const ChatMessage> messages);
// Content of the first choice. Throws kMalformedResponse.
std::string ExtractChatContent(const std::string &response_body);

// Shareable handle to one backend. Bounds concurrent in-flight requests to
// max_in_flight; retries of a single request run inside its slot.
class LlmBackend {
 public:
  explicit LlmBackend(BackendDescriptor descriptor);
  LlmBackend(const LlmBackend &) = delete;
  LlmBackend &operator=(const LlmBackend &) = delete;

  // Http: POST with retry and exponential backoff on transport errors, 429
  // and 5xx; other 4xx fail at once. Errors: kTransport, kHttpStatus,
  // kMalformedResponse, kTimeout, kRetriesExhausted (after one or more
  // retries). Mock: MockComplete.
  std::string Complete(std::span<const ChatMessage> messages);

  const BackendDescriptor &descriptor() const { return descriptor_; }
  // Completed Complete() calls, successful or not.
  long long call_count() const { return calls_.load(); }
  // HTTP requests sent, counting retries.
  long long request_count() const { return requests_.load(); }

 private:
  std::string CompleteHttp(std::span<const ChatMessage> messages);

  BackendDescriptor descriptor_;
  std::mutex mutex_;
  std::condition_variable slot_free_;
  int in_flight_ = 0;
  std::atomic<long long> calls_{0};
  std::atomic<long long> requests_{0};
};

// Standalone "true" means Fake, "false" means Real (case-insensitive, whole
// tokens only). Throws kAmbiguousVerdict or kNoVerdict.
Label ParseBinaryVerdict(std::string_view reply);

// The marker family of the last class marker in the reply decides:
// fraud/fraudulent/phishing/scam/adversarial/manipulation vs
// spam/spamming/benign/promotional. The rationale is the full reply.
// Throws kNoClassMarker.
std::pair<DriftClass, std::string> ParseDriftClass(std::string_view reply);

}  // namespace dkdrift

#endif  // DKDRIFT_LLM_GATEWAY_H_
