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

#include <cmath>
#include <string>
#include <vector>

#include "dkdrift/error.h"
#include "dkdrift/featurize.h"

namespace dkdrift {
namespace {

FeaturizerConfig Config(int dim_log2, std::set<int> orders) {
  FeaturizerConfig c;
  c.dim_log2 = dim_log2;
  c.ngram_orders = std::move(orders);
  return c;
}

TEST_CASE("fnv-1a 64 reference values") {
  CHECK(Fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(Fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("tokenize splits on non-alphanumerics and lowercases") {
  const auto c = Config(6, {1});
  CHECK(Tokenize("Hello, World!  it's 2pm", c) ==
        std::vector<std::string>{"hello", "world", "it", "s", "2pm"});
  CHECK(Tokenize("", c).empty());
  CHECK(Tokenize("  ...  ", c).empty());

  FeaturizerConfig keep = c;
  keep.lowercase = false;
  CHECK(Tokenize("Hello World", keep) == std::vector<std::string>{"Hello", "World"});
}

TEST_CASE("non-ascii bytes stay inside tokens") {
  const auto tokens = Tokenize("caf\xc3\xa9 ol\xc3\xa9", Config(6, {1}));
  REQUIRE(tokens.size() == 2);
  CHECK(tokens[0] == "caf\xc3\xa9");
}

TEST_CASE("bigrams follow unigrams and use the separator byte") {
  const auto tokens = Tokenize("a b c", Config(6, {1, 2}));
  const std::string sep(1, kNgramSeparator);
  CHECK(tokens == std::vector<std::string>{"a", "b", "c", "a" + sep + "b", "b" + sep + "c"});
  CHECK(Tokenize("solo", Config(6, {2})).empty());
}

TEST_CASE("golden vector: unigrams in 16 dimensions") {
  // free -> 11 (+), prize -> 15 (+), click -> 15 (-), here -> 11 (+).
  const FeatureVector v = Featurize("free prize click here", Config(4, {1}));
  REQUIRE(v.size() == 16);
  for (std::size_t i = 0; i < 16; ++i) CHECK(v.values[i] == (i == 11 ? 1.0 : 0.0));
}

TEST_CASE("golden vector: unigrams and bigrams in 32 dimensions") {
  const FeatureVector v =
      Featurize("Secure portal: verify your card now", Config(5, {1, 2}));
  const double w = 0.30151134457776363;
  const std::set<std::size_t> pos = {3, 4, 6, 11, 17, 23};
  const std::set<std::size_t> neg = {9, 10, 16, 24, 31};
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double expect = pos.count(i) ? w : neg.count(i) ? -w : 0.0;
    CHECK(v.values[i] == doctest::Approx(expect).epsilon(1e-15));
  }
  CHECK(Norm(v) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("empty text gives the zero vector") {
  const FeatureVector v = Featurize("", Config(6, {1, 2}));
  CHECK(v.size() == 64);
  CHECK(Norm(v) == 0.0);
}

TEST_CASE("featurize is deterministic and unit length") {
  const auto c = Config(10, {1, 2});
  const FeatureVector a = Featurize("please confirm the wire transfer today", c);
  const FeatureVector b = Featurize("please confirm the wire transfer today", c);
  CHECK(a == b);
  CHECK(Norm(a) == doctest::Approx(1.0));
}

TEST_CASE("tokenize examples") {
  CHECK(Tokenize("Best experience EVER!", Config(6, {1})) ==
        std::vector<std::string>{"best", "experience", "ever"});
  const std::string sep(1, kNgramSeparator);
  CHECK(Tokenize("secure portal", Config(6, {1, 2})) ==
        std::vector<std::string>{"secure", "portal", "secure" + sep + "portal"});
}

TEST_CASE("separator whitespace does not matter") {
  const auto c = Config(12, {1, 2});
  CHECK(Featurize("pay  the\tfee\n now", c) == Featurize("pay the fee now", c));
}

TEST_CASE("random unrelated texts are nearly orthogonal") {
  // 1000 pairs of random two-token texts with disjoint vocabularies.
  std::uint64_t state = 12345;
  auto next_word = [&state](char prefix) {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    return std::string(1, prefix) + std::to_string(state >> 40);
  };
  const auto c = Config(14, {1, 2});
  double total = 0;
  for (int i = 0; i < 1000; ++i) {
    const FeatureVector a = Featurize(next_word('a') + " " + next_word('a'), c);
    const FeatureVector b = Featurize(next_word('b') + " " + next_word('b'), c);
    total += std::fabs(Dot(a, b));
  }
  CHECK(total / 1000 < 0.05);
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(Config(5, {1}).Validate(), Error);
  CHECK_THROWS_AS(Config(23, {1}).Validate(), Error);
  CHECK_THROWS_AS(Config(8, {}).Validate(), Error);
  CHECK_THROWS_AS(Config(8, {3}).Validate(), Error);
  CHECK_NOTHROW(Config(22, {1, 2}).Validate());
}

TEST_CASE("dot rejects mismatched dimensions") {
  const FeatureVector a = Featurize("x", Config(6, {1}));
  const FeatureVector b = Featurize("x", Config(7, {1}));
  try {
    (void)Dot(a, b);
    FAIL("expected an error");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kDimensionMismatch);
  }
  CHECK(Dot(a, a) == doctest::Approx(1.0));
}

}  // namespace
}  // namespace dkdrift
