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

#include "dkdrift/featurize.h"

#include <cmath>

#include "dkdrift/error.h"

namespace dkdrift {
namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

bool IsWordByte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
         (c >= 'A' && c <= 'Z') || c >= 0x80;
}

}  // namespace

void FeaturizerConfig::Validate() const {
  if (dim_log2 < 6 || dim_log2 > 22) {
    throw Error(ErrorCode::kInvalidConfig,
                "dim_log2 must be in [6, 22], got " + std::to_string(dim_log2));
  }
  if (ngram_orders.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "ngram_orders must be non-empty");
  }
  for (int order : ngram_orders) {
    if (order != 1 && order != 2) {
      throw Error(ErrorCode::kInvalidConfig,
                  "ngram orders must be 1 or 2, got " + std::to_string(order));
    }
  }
}

std::uint64_t Fnv1a64(std::string_view bytes) {
  std::uint64_t hash = kFnvOffset;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= kFnvPrime;
  }
  return hash;
}

std::vector<std::string> Tokenize(std::string_view text,
                                  const FeaturizerConfig &config) {
  std::vector<std::string> words;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && !IsWordByte(text[i])) ++i;
    const std::size_t start = i;
    while (i < text.size() && IsWordByte(text[i])) ++i;
    if (i > start) {
      std::string word(text.substr(start, i - start));
      if (config.lowercase) {
        for (char &c : word) {
          if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        }
      }
      words.push_back(std::move(word));
    }
  }

  std::vector<std::string> grams;
  for (int order : config.ngram_orders) {
    const auto n = static_cast<std::size_t>(order);
    for (std::size_t start = 0; start + n <= words.size(); ++start) {
      std::string gram = words[start];
      for (std::size_t k = 1; k < n; ++k) {
        gram.push_back(kNgramSeparator);
        gram += words[start + k];
      }
      grams.push_back(std::move(gram));
    }
  }
  return grams;
}

FeatureVector Featurize(std::string_view text, const FeaturizerConfig &config) {
  const std::size_t dim = config.dimension();
  FeatureVector out{std::vector<double>(dim, 0.0)};
  for (const std::string &gram : Tokenize(text, config)) {
    const std::uint64_t hash = Fnv1a64(gram);
    const double sign = (hash >> 63) ? -1.0 : 1.0;
    out.values[hash & (dim - 1)] += sign;
  }
  const double norm = Norm(out);
  if (norm > 0) {
    for (double &v : out.values) v /= norm;
  }
  return out;
}

double Dot(const FeatureVector &a, const FeatureVector &b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  double sum = 0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a.values[i] * b.values[i];
  return sum;
}

double Norm(const FeatureVector &v) {
  double sum = 0;
  for (double x : v.values) sum += x * x;
  return std::sqrt(sum);
}

}  // namespace dkdrift
