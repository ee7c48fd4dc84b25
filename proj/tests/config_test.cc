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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <string>

#include "dkdrift/config.h"
#include "dkdrift/error.h"
#include "support/test_support.h"

namespace dkdrift {
namespace {

using testing::DataPath;

std::string ErrorOf(const std::string &text) {
  try {
    ParseRunConfig(text, DKDRIFT_TEST_DATA_DIR);
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kInvalidConfig);
    return e.detail();
  }
  FAIL("config accepted");
  return "";
}

TEST_CASE("fixture config loads") {
  const RunConfig c = LoadRunConfig(DataPath("run.ini"));
  CHECK(c.llm1.id == "mock-screen");
  CHECK(c.llm1.kind == BackendKind::kMock);
  CHECK(c.llm1.mock.default_reply == "False");
  CHECK(c.llm2.mock.rules.size() == 1);
  CHECK(c.ocdd.window_size == 25);
  CHECK(c.ocdd.svm.nu == 0.05);
  CHECK(c.featurizer.ngram_orders == std::set<int>{1, 2});
  CHECK(c.review_library == DataPath("review_library.json"));
  CHECK(c.parallelism == 4);
  CHECK(c.seed == 20240917u);
}

TEST_CASE("defaults and http backends") {
  const RunConfig c = ParseRunConfig(
      "[llm1]\nkind = http\nendpoint = https://api.example.com/v1/chat/completions\n"
      "model = m-large\ntimeout_ms = 1500\nretries = 5\napi_key_env = EXAMPLE_KEY\n"
      "temperature = 0.2\nmax_tokens = 100\nbackoff_ms = 10\nmax_in_flight = 2\n");
  CHECK(c.llm1.kind == BackendKind::kHttp);
  CHECK(c.llm1.model_name == "m-large");
  CHECK(c.llm1.timeout.count() == 1500);
  CHECK(c.llm1.max_retries == 5);
  CHECK(c.llm1.api_key_env == "EXAMPLE_KEY");
  CHECK(c.llm1.temperature == 0.2);
  CHECK(c.llm2.kind == BackendKind::kMock);
  CHECK(c.ocdd.drift_threshold == 0.3);
  CHECK(c.featurizer.dim_log2 == 14);
}

TEST_CASE("rejections name the line") {
  CHECK(ErrorOf("[llm1]\nflavour = x\n").find("line 2") != std::string::npos);
  CHECK(ErrorOf("[llm3]\n").find("unknown section") != std::string::npos);
  CHECK(ErrorOf("kind = mock\n").find("outside a section") != std::string::npos);
  CHECK(ErrorOf("[ocdd]\nnu = lots\n").find("not a number") != std::string::npos);
  CHECK(ErrorOf("[ocdd]\nwindow_size = 3\nwindow_size = 4\n").find("duplicate") !=
        std::string::npos);
  CHECK(ErrorOf("[run]\nparallelism = 0\n").find("parallelism") != std::string::npos);
  CHECK(ErrorOf("[ocdd]\nmin_fill = 30\n").size() > 0);
  CHECK(ErrorOf("[llm1]\nkind = http\n").find("endpoint") != std::string::npos);
  CHECK(ErrorOf("[featurizer]\nlowercase = maybe\n").find("boolean") != std::string::npos);
  CHECK(ErrorOf("[llm1]\napi_key = sk-123\n").find("unknown key") != std::string::npos);
}

TEST_CASE("digest tracks settings but not formatting") {
  const RunConfig a = ParseRunConfig("[ocdd]\nnu = 0.1\n");
  const RunConfig b = ParseRunConfig("# comment\n[ocdd]\n  nu=0.1  \n");
  const RunConfig c = ParseRunConfig("[ocdd]\nnu = 0.2\n");
  CHECK(ConfigDigest(a) == ConfigDigest(b));
  CHECK(ConfigDigest(a) != ConfigDigest(c));
  CHECK(ConfigDigest(a).size() == 16);
}

TEST_CASE("pipeline config from run config") {
  const RunConfig c = LoadRunConfig(DataPath("run.ini"));
  const PipelineConfig dk = MakePipelineConfig(c, true, true, true);
  CHECK(dk.dk_enabled);
  REQUIRE(dk.review_library.has_value());
  CHECK(dk.review_library->patterns.size() == 8);
  CHECK(dk.conversation_library->patterns.size() == 4);
  CHECK(dk.llm1->descriptor().id == "mock-screen");

  RunConfig bare = c;
  bare.review_library.clear();
  CHECK_THROWS_WITH_AS(MakePipelineConfig(bare, true, true, false),
                       doctest::Contains("review_library"), Error);
  // Analysis only needs the conversation cues.
  CHECK_NOTHROW(MakePipelineConfig(bare, true, false, true));
  CHECK_NOTHROW(MakePipelineConfig(bare, false, true, true));
}

}  // namespace
}  // namespace dkdrift
