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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "dkdrift/error.h"
#include "dkdrift/ocsvm.h"
#include "support/test_support.h"

namespace dkdrift {
namespace {

using testing::BruteForceOcsvmDual;
using testing::SplitMix64;

FeatureVector P(std::vector<double> v) { return FeatureVector{std::move(v)}; }

OcsvmConfig Cfg(double nu, double gamma) {
  OcsvmConfig c;
  c.nu = nu;
  c.kernel.gamma = gamma;
  return c;
}

ErrorCode CodeOf(auto &&fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::kIo;
}

TEST_CASE("rbf kernel") {
  KernelConfig k;
  k.gamma = 0.5;
  CHECK(KernelEval(k, P({0, 0}), P({1, 1})) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(KernelEval(k, P({0.3, 2}), P({0.3, 2})) == 1.0);
  CHECK(KernelEval(k, P({1, 2}), P({3, -1})) == KernelEval(k, P({3, -1}), P({1, 2})));
  CHECK(CodeOf([&] { KernelEval(k, P({1}), P({1, 2})); }) == ErrorCode::kDimensionMismatch);
}

TEST_CASE("one point") {
  const std::vector<FeatureVector> pts = {P({0.4, -0.2})};
  const OcsvmModel m = FitOcsvm(pts, Cfg(0.5, 1.0));
  REQUIRE(m.alphas.size() == 1);
  CHECK(m.alphas[0] == doctest::Approx(1.0));
  CHECK(m.rho == doctest::Approx(1.0));
  CHECK(Decision(m, pts[0]) == doctest::Approx(0.0));
  CHECK_FALSE(PredictOutlier(m, pts[0]));
  // Far away the kernel vanishes and the decision tends to -rho.
  CHECK(Decision(m, P({100, 100})) == doctest::Approx(-m.rho));
  CHECK(PredictOutlier(m, P({100, 100})));
}

TEST_CASE("two symmetric points") {
  const std::vector<FeatureVector> pts = {P({0, 0}), P({1, 0})};
  const OcsvmModel m = FitOcsvm(pts, Cfg(0.5, 1.0));
  REQUIRE(m.alphas.size() == 2);
  CHECK(m.alphas[0] == doctest::Approx(0.5));
  CHECK(m.alphas[1] == doctest::Approx(0.5));
  CHECK(Decision(m, pts[0]) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(Decision(m, pts[1]) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("boundary decision counts as inlier") {
  OcsvmModel m;
  m.support_points = {P({0, 0})};
  m.alphas = {1.0};
  m.rho = 1.0;
  m.n_train = 1;
  CHECK(Decision(m, P({0, 0})) == 0.0);
  CHECK_FALSE(PredictOutlier(m, P({0, 0})));
  m.rho = 0.8;
  CHECK_FALSE(PredictOutlier(m, P({0, 0})));
  m.rho = 1.1;
  CHECK(PredictOutlier(m, P({0, 0})));
}

TEST_CASE("five clustered points match the convex solver") {
  // Objective frozen from an interior-point solve of the same dual.
  const std::vector<FeatureVector> pts = {P({0, 0}), P({0.3, 0.1}), P({0.1, 0.4}),
                                          P({0.5, 0.5}), P({0.2, 0.25})};
  const OcsvmModel m = FitOcsvm(pts, Cfg(0.4, 1.0));
  CHECK(DualObjective(m) == doctest::Approx(0.401632664928159).epsilon(1e-9));
  CHECK(std::fabs(DualObjective(m) - 0.401632664928159) < 1e-6);
  // Both support vectors sit at the box bound, so rho falls back to the mean
  // over all support vectors.
  CHECK(m.alphas.size() == 2);
  CHECK(m.rho == doctest::Approx(0.80326533).epsilon(1e-7));

  const auto oracle = BruteForceOcsvmDual(pts, 0.4, 1.0);
  CHECK(oracle.objective == doctest::Approx(0.401632664928159).epsilon(1e-12));
}

TEST_CASE("randomized instances agree with the enumeration oracle") {
  SplitMix64 rng(7);
  const double nus[] = {0.3, 0.5, 0.8};
  for (int inst = 0; inst < 24; ++inst) {
    const int n = 3 + static_cast<int>(rng.Next() % 6);
    const int d = 1 + static_cast<int>(rng.Next() % 4);
    const double nu = nus[inst % 3];
    const double gamma = 0.5 + rng.Uniform() * 2.0;
    const auto pts = testing::RandomPoints(rng, n, d);
    const OcsvmModel m = FitOcsvm(pts, Cfg(nu, gamma));
    const auto oracle = BruteForceOcsvmDual(pts, nu, gamma);
    CAPTURE(inst);
    CHECK(std::fabs(DualObjective(m) - oracle.objective) < 1e-6);
  }
}

TEST_CASE("dual feasibility") {
  SplitMix64 rng(11);
  const auto pts = testing::RandomPoints(rng, 30, 3);
  const OcsvmConfig cfg = Cfg(0.2, 1.0);
  const OcsvmModel m = FitOcsvm(pts, cfg);
  const double upper = 1.0 / (0.2 * 30);
  const double sum = std::accumulate(m.alphas.begin(), m.alphas.end(), 0.0);
  // Dropped alphas are each below tol.
  CHECK(std::fabs(sum - 1.0) <= cfg.tol * 30);
  for (double a : m.alphas) {
    CHECK(a > 0);
    CHECK(a <= upper + 1e-12);
  }
  CHECK(m.diagnostics.converged);
  CHECK(m.n_train == 30);
}

TEST_CASE("nu bounds outliers and support vectors") {
  SplitMix64 rng(99);
  for (double nu : {0.1, 0.3, 0.5}) {
    for (int rep = 0; rep < 10; ++rep) {
      const auto pts = testing::RandomPoints(rng, 20, 2);
      const OcsvmConfig cfg = Cfg(nu, 1.0);
      const OcsvmModel m = FitOcsvm(pts, cfg);
      int outliers = 0;
      for (const auto &p : pts) outliers += Decision(m, p) < -cfg.tol ? 1 : 0;
      CHECK(outliers <= nu * 20 + 1);
      CHECK(static_cast<double>(m.alphas.size()) >= nu * 20 - 1);
    }
  }
}

TEST_CASE("decision does not depend on training order") {
  SplitMix64 rng(5);
  auto pts = testing::RandomPoints(rng, 12, 2);
  const OcsvmModel a = FitOcsvm(pts, Cfg(0.3, 1.0));
  std::reverse(pts.begin(), pts.end());
  const OcsvmModel b = FitOcsvm(pts, Cfg(0.3, 1.0));
  for (int i = 0; i < 10; ++i) {
    const FeatureVector probe = P({rng.Uniform() * 2 - 1, rng.Uniform() * 2 - 1});
    CHECK(Decision(a, probe) == doctest::Approx(Decision(b, probe)).epsilon(1e-5));
  }
}

TEST_CASE("fit errors and warnings") {
  CHECK(CodeOf([] { FitOcsvm(std::vector<FeatureVector>{}, Cfg(0.5, 1)); }) ==
        ErrorCode::kEmptyTrainingSet);
  CHECK(CodeOf([] {
          FitOcsvm(std::vector<FeatureVector>{P({1, 2}), P({1})}, Cfg(0.5, 1));
        }) == ErrorCode::kDimensionMismatch);
  CHECK(CodeOf([] { Cfg(0.0, 1).Validate(); }) == ErrorCode::kInvalidConfig);
  CHECK(CodeOf([] { Cfg(1.5, 1).Validate(); }) == ErrorCode::kInvalidConfig);
  CHECK(CodeOf([] { Cfg(0.5, 0).Validate(); }) == ErrorCode::kInvalidConfig);

  // nu * n < 1 is allowed with a warning.
  const OcsvmModel m = FitOcsvm(std::vector<FeatureVector>{P({0}), P({1})}, Cfg(0.1, 1));
  CHECK_FALSE(m.diagnostics.warnings.empty());
}

TEST_CASE("iteration cap reports non-convergence") {
  SplitMix64 rng(3);
  const auto pts = testing::RandomPoints(rng, 40, 2);
  OcsvmConfig cfg = Cfg(0.1, 5.0);
  cfg.max_iter = 1;
  cfg.tol = 1e-12;
  const OcsvmModel m = FitOcsvm(pts, cfg);
  CHECK_FALSE(m.diagnostics.converged);
  CHECK_FALSE(m.diagnostics.warnings.empty());
}

TEST_CASE("model json round-trip") {
  SplitMix64 rng(21);
  const auto pts = testing::RandomPoints(rng, 15, 3);
  const OcsvmModel m = FitOcsvm(pts, Cfg(0.3, 0.7));
  const std::string json = OcsvmModelToJson(m);
  const OcsvmModel back = OcsvmModelFromJson(json);
  CHECK(back.rho == m.rho);
  CHECK(back.alphas == m.alphas);
  CHECK(back.support_points == m.support_points);
  CHECK(back.n_train == m.n_train);
  CHECK(back.config.nu == m.config.nu);
  CHECK(OcsvmModelToJson(back) == json);
  for (const auto &p : pts) CHECK(Decision(back, p) == Decision(m, p));

  CHECK(CodeOf([] { OcsvmModelFromJson("{\"version\": 1}"); }) ==
        ErrorCode::kMalformedDocument);
  CHECK(CodeOf([] { OcsvmModelFromJson("not json"); }) == ErrorCode::kMalformedDocument);
}

}  // namespace
}  // namespace dkdrift
