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

#include "dkdrift/config.h"

#include <charconv>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>

#include "dkdrift/error.h"
#include "dkdrift/file_util.h"
#include "dkdrift/knowledge.h"
#include "json.hpp"

namespace dkdrift {
namespace {

using nlohmann::ordered_json;

std::string Trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

[[noreturn]] void Fail(std::size_t line, const std::string &msg) {
  throw Error(ErrorCode::kInvalidConfig, "line " + std::to_string(line) + ": " + msg);
}

long long ToInt(const std::string &v, std::size_t line) {
  long long out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) Fail(line, "not an integer: " + v);
  return out;
}

double ToReal(const std::string &v, std::size_t line) {
  std::istringstream in(v);
  in.imbue(std::locale::classic());
  double out = 0;
  in >> out;
  if (in.fail() || !in.eof()) Fail(line, "not a number: " + v);
  return out;
}

bool ToBool(const std::string &v, std::size_t line) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  Fail(line, "not a boolean: " + v);
}

std::string Resolve(const std::string &base_dir, const std::string &path) {
  if (path.empty() || base_dir.empty()) return path;
  const std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

void SetBackend(BackendDescriptor &b, const std::string &key, const std::string &v,
                std::size_t line, const std::string &base_dir) {
  if (key == "id") {
    b.id = v;
  } else if (key == "kind") {
    if (v == "mock") {
      b.kind = BackendKind::kMock;
    } else if (v == "http") {
      b.kind = BackendKind::kHttp;
    } else {
      Fail(line, "kind must be mock or http");
    }
  } else if (key == "endpoint") {
    b.endpoint = v;
  } else if (key == "model") {
    b.model_name = v;
  } else if (key == "temperature") {
    b.temperature = ToReal(v, line);
  } else if (key == "max_tokens") {
    b.max_tokens = static_cast<int>(ToInt(v, line));
  } else if (key == "timeout_ms") {
    b.timeout = std::chrono::milliseconds(ToInt(v, line));
  } else if (key == "retries") {
    b.max_retries = static_cast<int>(ToInt(v, line));
  } else if (key == "api_key_env") {
    b.api_key_env = v;
  } else if (key == "backoff_ms") {
    b.backoff_initial = std::chrono::milliseconds(ToInt(v, line));
  } else if (key == "max_in_flight") {
    b.max_in_flight = static_cast<int>(ToInt(v, line));
  } else if (key == "mock_rules") {
    try {
      b.mock = LoadMockRuleSet(Resolve(base_dir, v));
    } catch (const Error &e) {
      Fail(line, "mock_rules: " + std::string(e.what()));
    }
  } else {
    Fail(line, "unknown key '" + key + "'");
  }
}

void SetOcdd(OcddConfig &c, const std::string &key, const std::string &v,
             std::size_t line) {
  if (key == "window_size") {
    c.window_size = static_cast<std::size_t>(ToInt(v, line));
  } else if (key == "drift_threshold") {
    c.drift_threshold = ToReal(v, line);
  } else if (key == "min_fill") {
    c.min_fill = static_cast<std::size_t>(ToInt(v, line));
  } else if (key == "nu") {
    c.svm.nu = ToReal(v, line);
  } else if (key == "gamma") {
    c.svm.kernel.gamma = ToReal(v, line);
  } else if (key == "tol") {
    c.svm.tol = ToReal(v, line);
  } else if (key == "max_iter") {
    c.svm.max_iter = static_cast<int>(ToInt(v, line));
  } else {
    Fail(line, "unknown key '" + key + "'");
  }
}

void SetFeaturizer(FeaturizerConfig &c, const std::string &key,
                   const std::string &v, std::size_t line) {
  if (key == "dim_log2") {
    c.dim_log2 = static_cast<int>(ToInt(v, line));
  } else if (key == "ngram_orders") {
    c.ngram_orders.clear();
    std::string item;
    std::istringstream in(v);
    while (std::getline(in, item, ',')) {
      c.ngram_orders.insert(static_cast<int>(ToInt(Trim(item), line)));
    }
  } else if (key == "lowercase") {
    c.lowercase = ToBool(v, line);
  } else {
    Fail(line, "unknown key '" + key + "'");
  }
}

ordered_json BackendJson(const BackendDescriptor &b) {
  ordered_json rules = ordered_json::array();
  for (const MockRule &r : b.mock.rules) {
    rules.push_back({{"terms", r.terms}, {"reply", r.reply}});
  }
  return {{"id", b.id},
          {"kind", b.kind == BackendKind::kHttp ? "http" : "mock"},
          {"endpoint", b.endpoint},
          {"model", b.model_name},
          {"temperature", b.temperature},
          {"max_tokens", b.max_tokens},
          {"timeout_ms", b.timeout.count()},
          {"retries", b.max_retries},
          {"api_key_env", b.api_key_env},
          {"backoff_ms", b.backoff_initial.count()},
          {"max_in_flight", b.max_in_flight},
          {"mock", {{"rules", rules}, {"default_reply", b.mock.default_reply}}}};
}

}  // namespace

void RunConfig::Validate() const {
  llm1.Validate();
  llm2.Validate();
  ocdd.Validate();
  featurizer.Validate();
  if (parallelism <= 0) throw Error(ErrorCode::kInvalidConfig, "parallelism <= 0");
}

RunConfig ParseRunConfig(const std::string &text, const std::string &base_dir) {
  static const std::set<std::string> kSections = {"llm1", "llm2", "ocdd",
                                                  "featurizer", "paths", "run"};
  RunConfig config;
  config.llm1.id = "llm1";
  config.llm2.id = "llm2";
  std::string section;
  std::set<std::pair<std::string, std::string>> seen;
  std::istringstream in(text);
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = Trim(raw);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']') Fail(line, "malformed section header");
      section = Trim(std::string_view(s).substr(1, s.size() - 2));
      if (!kSections.count(section)) Fail(line, "unknown section '" + section + "'");
      continue;
    }
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos) Fail(line, "expected key = value");
    const std::string key = Trim(std::string_view(s).substr(0, eq));
    const std::string value = Trim(std::string_view(s).substr(eq + 1));
    if (section.empty()) Fail(line, "key '" + key + "' outside a section");
    if (!seen.insert({section, key}).second) {
      Fail(line, "duplicate key '" + key + "' in [" + section + "]");
    }
    if (section == "llm1") {
      SetBackend(config.llm1, key, value, line, base_dir);
    } else if (section == "llm2") {
      SetBackend(config.llm2, key, value, line, base_dir);
    } else if (section == "ocdd") {
      SetOcdd(config.ocdd, key, value, line);
    } else if (section == "featurizer") {
      SetFeaturizer(config.featurizer, key, value, line);
    } else if (section == "paths") {
      const std::map<std::string, std::string *> slots = {
          {"review_library", &config.review_library},
          {"conversation_library", &config.conversation_library},
          {"discovery_template", &config.discovery_template},
          {"review_template", &config.review_template},
          {"conversation_template", &config.conversation_template},
          {"drift_template", &config.drift_template},
          {"output_dir", &config.output_dir}};
      const auto it = slots.find(key);
      if (it == slots.end()) Fail(line, "unknown key '" + key + "'");
      *it->second = Resolve(base_dir, value);
    } else {  // run
      if (key == "parallelism") {
        config.parallelism = static_cast<int>(ToInt(value, line));
      } else if (key == "seed") {
        config.seed = static_cast<std::uint64_t>(ToInt(value, line));
      } else {
        Fail(line, "unknown key '" + key + "'");
      }
    }
  }
  config.Validate();
  return config;
}

RunConfig LoadRunConfig(const std::string &path) {
  const std::string text = internal::ReadFile(path);
  return ParseRunConfig(text, std::filesystem::path(path).parent_path().string());
}

std::string CanonicalConfig(const RunConfig &c) {
  ordered_json doc;
  doc["llm1"] = BackendJson(c.llm1);
  doc["llm2"] = BackendJson(c.llm2);
  doc["ocdd"] = {{"window_size", c.ocdd.window_size},
                 {"drift_threshold", c.ocdd.drift_threshold},
                 {"min_fill", c.ocdd.min_fill},
                 {"nu", c.ocdd.svm.nu},
                 {"gamma", c.ocdd.svm.kernel.gamma},
                 {"tol", c.ocdd.svm.tol},
                 {"max_iter", c.ocdd.svm.max_iter}};
  doc["featurizer"] = {{"dim_log2", c.featurizer.dim_log2},
                       {"ngram_orders", c.featurizer.ngram_orders},
                       {"lowercase", c.featurizer.lowercase}};
  doc["paths"] = {{"review_library", c.review_library},
                  {"conversation_library", c.conversation_library},
                  {"discovery_template", c.discovery_template},
                  {"review_template", c.review_template},
                  {"conversation_template", c.conversation_template},
                  {"drift_template", c.drift_template}};
  doc["run"] = {{"parallelism", c.parallelism}, {"seed", c.seed}};
  return doc.dump();
}

std::string ConfigDigest(const RunConfig &config) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(Fnv1a64(CanonicalConfig(config))));
  return buf;
}

PipelineConfig MakePipelineConfig(const RunConfig &config, bool dk_enabled,
                                  bool require_review_library,
                                  bool require_conversation_library) {
  config.Validate();
  PipelineConfig p;
  p.llm1 = std::make_shared<LlmBackend>(config.llm1);
  p.llm2 = std::make_shared<LlmBackend>(config.llm2);
  p.dk_enabled = dk_enabled;
  p.ocdd = config.ocdd;
  p.featurizer = config.featurizer;
  p.parallelism = config.parallelism;
  if (dk_enabled) {
    if (require_review_library && config.review_library.empty()) {
      throw Error(ErrorCode::kInvalidConfig,
                  "--dk needs [paths] review_library");
    }
    if (require_conversation_library && config.conversation_library.empty()) {
      throw Error(ErrorCode::kInvalidConfig,
                  "--dk needs [paths] conversation_library");
    }
    if (!config.review_library.empty()) {
      p.review_library = LoadLibrary(config.review_library);
    }
    if (!config.conversation_library.empty()) {
      p.conversation_library = LoadLibrary(config.conversation_library);
    }
  }
  if (!config.review_template.empty()) {
    p.review_template =
        LoadTemplate(config.review_template, TemplateKind::kReviewClassification);
  }
  if (!config.conversation_template.empty()) {
    p.conversation_template = LoadTemplate(
        config.conversation_template, TemplateKind::kConversationClassification);
  }
  if (!config.drift_template.empty()) {
    p.drift_template = LoadTemplate(config.drift_template, TemplateKind::kDrift);
  }
  p.Validate();
  return p;
}

}  // namespace dkdrift
