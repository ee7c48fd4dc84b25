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

#ifndef DKDRIFT_FEATURIZE_H_
#define DKDRIFT_FEATURIZE_H_

#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace dkdrift {

// Joins adjacent tokens of an n-gram (ASCII unit separator).
inline constexpr char kNgramSeparator = '\x1f';

struct FeaturizerConfig {
  int dim_log2 = 14;  // vector dimension is 2^dim_log2, dim_log2 in [6, 22]
  std::set<int> ngram_orders = {1, 2};
  bool lowercase = true;

  std::size_t dimension() const { return std::size_t{1} << dim_log2; }
  // Throws kInvalidConfig.
  void Validate() const;
};

// Dense feature vector. Featurize() yields either the zero vector or a unit
// L2 vector; other producers (synthetic streams, tests) may use any values.
struct FeatureVector {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  bool operator==(const FeatureVector &) const = default;
};

// 64-bit FNV-1a over the raw bytes.
std::uint64_t Fnv1a64(std::string_view bytes);

// Splits text into maximal alphanumeric runs (bytes >= 0x80 count as word
// characters so UTF-8 words stay whole), then emits every n-gram of each
// configured order, lowest order first.
std::vector<std::string> Tokenize(std::string_view text,
                                  const FeaturizerConfig &config);

// Signed feature hashing of Tokenize() output followed by L2 normalization.
// Empty text (or text with no tokens) maps to the zero vector.
FeatureVector Featurize(std::string_view text, const FeaturizerConfig &config);

double Dot(const FeatureVector &a, const FeatureVector &b);
double Norm(const FeatureVector &v);

}  // namespace dkdrift

#endif  // DKDRIFT_FEATURIZE_H_
