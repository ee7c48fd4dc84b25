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

#include "dkdrift/llm_gateway.h"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <thread>

#include "dkdrift/error.h"
#include "dkdrift/file_util.h"
#include "httplib.h"
#include "json.hpp"

namespace dkdrift {
namespace {

constexpr std::size_t kBodyExcerpt = 512;
constexpr std::chrono::milliseconds kMaxBackoff{30000};

std::string Lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

bool IsAlnum(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

struct ParsedUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

ParsedUrl ParseUrl(const std::string &url) {
  const std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::kInvalidConfig, "endpoint has no scheme: " + url);
  }
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw Error(ErrorCode::kInvalidConfig, "endpoint scheme must be http or https: " + url);
  }
  const std::size_t path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

// One attempt's failure, kept so the final error can name the last cause.
struct AttemptError {
  ErrorCode code;
  std::string detail;
  bool transient;
};

class Slot {
 public:
  Slot(std::mutex &mutex, std::condition_variable &cv, int &in_flight, int max)
      : mutex_(mutex), cv_(cv), in_flight_(in_flight) {
    std::unique_lock lock(mutex_);
    cv_.wait(lock, [&] { return in_flight_ < max; });
    ++in_flight_;
  }
  ~Slot() {
    {
      std::lock_guard lock(mutex_);
      --in_flight_;
    }
    cv_.notify_one();
  }

 private:
  std::mutex &mutex_;
  std::condition_variable &cv_;
  int &in_flight_;
};

}  // namespace

MockRuleSet MockRuleSetFromJson(const std::string &text) {
  try {
    const auto doc = nlohmann::json::parse(text);
    MockRuleSet set;
    if (doc.contains("rules")) {
      for (const auto &r : doc.at("rules")) {
        set.rules.push_back(MockRule{r.at("terms").get<std::vector<std::string>>(),
                                     r.at("reply").get<std::string>()});
      }
    }
    set.default_reply = doc.value("default_reply", std::string());
    return set;
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kMalformedDocument,
                std::string("mock rules: ") + e.what());
  }
}

MockRuleSet LoadMockRuleSet(const std::string &path) {
  return MockRuleSetFromJson(internal::ReadFile(path));
}

void BackendDescriptor::Validate() const {
  if (id.empty()) throw Error(ErrorCode::kInvalidConfig, "backend id is empty");
  if (kind == BackendKind::kHttp) {
    if (endpoint.empty() || model_name.empty()) {
      throw Error(ErrorCode::kInvalidConfig,
                  "backend " + id + ": http backends need endpoint and model");
    }
    ParseUrl(endpoint);
  }
  if (temperature < 0) {
    throw Error(ErrorCode::kInvalidConfig, "backend " + id + ": temperature < 0");
  }
  if (max_tokens <= 0) {
    throw Error(ErrorCode::kInvalidConfig, "backend " + id + ": max_tokens <= 0");
  }
  if (max_retries < 0 || timeout.count() <= 0 || max_in_flight <= 0) {
    throw Error(ErrorCode::kInvalidConfig,
                "backend " + id + ": retries, timeout and in-flight bound "
                                  "must be positive");
  }
}

std::string_view ChatRoleName(ChatRole role) {
  switch (role) {
    case ChatRole::kSystem: return "system";
    case ChatRole::kUser: return "user";
    case ChatRole::kAssistant: return "assistant";
  }
  return "user";
}

std::string MockComplete(const MockRuleSet &rules,
                         std::span<const ChatMessage> messages) {
  std::string last_user;
  for (const ChatMessage &m : messages) {
    if (m.role == ChatRole::kUser) last_user = m.content;
  }
  const std::string haystack = Lower(last_user);
  for (const MockRule &rule : rules.rules) {
    for (const std::string &term : rule.terms) {
      if (!term.empty() && haystack.find(Lower(term)) != std::string::npos) {
        return rule.reply;
      }
    }
  }
  return rules.default_reply;
}

std::string BuildChatRequest(const BackendDescriptor &backend,
                             std::span<const ChatMessage> messages) {
  nlohmann::ordered_json body;
  body["model"] = backend.model_name;
  body["messages"] = nlohmann::ordered_json::array();
  for (const ChatMessage &m : messages) {
    body["messages"].push_back(
        {{"role", std::string(ChatRoleName(m.role))}, {"content", m.content}});
  }
  body["temperature"] = backend.temperature;
  body["max_tokens"] = backend.max_tokens;
  return body.dump();
}

std::string ExtractChatContent(const std::string &response_body) {
  try {
    const auto doc = nlohmann::json::parse(response_body);
    const auto &content = doc.at("choices").at(0).at("message").at("content");
    if (!content.is_string()) {
      throw Error(ErrorCode::kMalformedResponse, "content is not a string");
    }
    return content.get<std::string>();
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kMalformedResponse,
                std::string(e.what()) + "; body: " +
                    response_body.substr(0, kBodyExcerpt));
  }
}

LlmBackend::LlmBackend(BackendDescriptor descriptor)
    : descriptor_(std::move(descriptor)) {
  descriptor_.Validate();
}

std::string LlmBackend::Complete(std::span<const ChatMessage> messages) {
  if (messages.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "no messages to send");
  }
  for (const ChatMessage &m : messages) {
    if (m.role == ChatRole::kUser && m.content.empty()) {
      throw Error(ErrorCode::kInvalidConfig, "empty user message");
    }
  }
  struct CountOnExit {
    std::atomic<long long> &calls;
    ~CountOnExit() { ++calls; }
  } count_on_exit{calls_};

  if (descriptor_.kind == BackendKind::kMock) {
    return MockComplete(descriptor_.mock, messages);
  }
  Slot slot(mutex_, slot_free_, in_flight_, descriptor_.max_in_flight);
  return CompleteHttp(messages);
}

std::string LlmBackend::CompleteHttp(std::span<const ChatMessage> messages) {
  const ParsedUrl url = ParseUrl(descriptor_.endpoint);
  const std::string body = BuildChatRequest(descriptor_, messages);

  httplib::Headers headers;
  if (!descriptor_.api_key_env.empty()) {
    if (const char *key = std::getenv(descriptor_.api_key_env.c_str());
        key != nullptr && *key != '\0') {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
  }

  const auto timeout = descriptor_.timeout;
  const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  const auto micros =
      std::chrono::duration_cast<std::chrono::microseconds>(timeout - seconds);

  AttemptError last{ErrorCode::kTransport, "", true};
  std::chrono::milliseconds backoff = descriptor_.backoff_initial;
  for (int attempt = 0; attempt <= descriptor_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff);
      backoff = std::min(backoff * 2, kMaxBackoff);
    }
    httplib::Client client(url.origin);
    client.set_connection_timeout(seconds.count(), micros.count());
    client.set_read_timeout(seconds.count(), micros.count());
    client.set_write_timeout(seconds.count(), micros.count());

    ++requests_;
    const auto started = std::chrono::steady_clock::now();
    auto result = client.Post(url.path, headers, body, "application/json");
    const auto elapsed = std::chrono::steady_clock::now() - started;

    if (!result) {
      const httplib::Error err = result.error();
      const bool timed_out = err == httplib::Error::ConnectionTimeout ||
                             (err == httplib::Error::Read && elapsed >= timeout);
      last = AttemptError{timed_out ? ErrorCode::kTimeout : ErrorCode::kTransport,
                          httplib::to_string(err), true};
      continue;
    }
    const int status = result->status;
    if (status >= 200 && status < 300) {
      return ExtractChatContent(result->body);
    }
    last = AttemptError{
        ErrorCode::kHttpStatus,
        std::to_string(status) + " " + result->body.substr(0, kBodyExcerpt),
        status == 429 || status >= 500};
    if (!last.transient) break;
  }

  if (!last.transient || descriptor_.max_retries == 0) {
    throw Error(last.code, descriptor_.id + ": " + last.detail);
  }
  throw Error(ErrorCode::kRetriesExhausted,
              descriptor_.id + ": " + std::to_string(descriptor_.max_retries) +
                  " retries, last error " +
                  std::string(ErrorCodeName(last.code)) + ": " + last.detail);
}

Label ParseBinaryVerdict(std::string_view reply) {
  bool saw_true = false, saw_false = false;
  std::size_t i = 0;
  while (i < reply.size()) {
    while (i < reply.size() && !IsAlnum(reply[i])) ++i;
    const std::size_t start = i;
    while (i < reply.size() && IsAlnum(reply[i])) ++i;
    if (i == start) continue;
    const std::string token = Lower(reply.substr(start, i - start));
    saw_true |= token == "true";
    saw_false |= token == "false";
  }
  if (saw_true && saw_false) {
    throw Error(ErrorCode::kAmbiguousVerdict,
                std::string(reply.substr(0, kBodyExcerpt)));
  }
  if (saw_true) return Label::kFake;
  if (saw_false) return Label::kReal;
  throw Error(ErrorCode::kNoVerdict, std::string(reply.substr(0, kBodyExcerpt)));
}

std::pair<DriftClass, std::string> ParseDriftClass(std::string_view reply) {
  static const std::pair<std::string_view, DriftClass> kMarkers[] = {
      {"fraud", DriftClass::kAdversarial},
      {"fraudulent", DriftClass::kAdversarial},
      {"phishing", DriftClass::kAdversarial},
      {"scam", DriftClass::kAdversarial},
      {"adversarial", DriftClass::kAdversarial},
      {"manipulation", DriftClass::kAdversarial},
      {"spam", DriftClass::kBenign},
      {"spamming", DriftClass::kBenign},
      {"benign", DriftClass::kBenign},
      {"promotional", DriftClass::kBenign},
  };
  const std::string text = Lower(reply);
  std::size_t best_pos = std::string::npos;
  DriftClass best = DriftClass::kBenign;
  for (const auto &[marker, cls] : kMarkers) {
    for (std::size_t pos = text.rfind(marker); pos != std::string::npos;
         pos = pos == 0 ? std::string::npos : text.rfind(marker, pos - 1)) {
      // Markers must start a word.
      if (pos > 0 && std::isalpha(static_cast<unsigned char>(text[pos - 1]))) {
        continue;
      }
      if (best_pos == std::string::npos || pos > best_pos) {
        best_pos = pos;
        best = cls;
      }
      break;
    }
  }
  if (best_pos == std::string::npos) {
    throw Error(ErrorCode::kNoClassMarker,
                std::string(reply.substr(0, kBodyExcerpt)));
  }
  return {best, std::string(reply)};
}

}  // namespace dkdrift
