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

#ifndef DKDRIFT_OCSVM_H_
#define DKDRIFT_OCSVM_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dkdrift/featurize.h"

namespace dkdrift {

enum class KernelKind { kRbf };

struct KernelConfig {
  KernelKind kind = KernelKind::kRbf;
  double gamma = 0.5;
};

struct OcsvmConfig {
  double nu = 0.05;  // in (0, 1]
  KernelConfig kernel;
  double tol = 1e-6;      // KKT tolerance
  int max_iter = 10000;   // sweeps; one sweep is n pair updates

  // Throws kInvalidConfig.
  void Validate() const;
};

struct FitDiagnostics {
  long long updates = 0;
  double max_violation = 0;
  bool converged = true;
  std::vector<std::string> warnings;
};

// nu-one-class SVM in the dual form with sum(alpha) = 1 and box 1/(nu*n).
// Only points whose alpha exceeds tol are kept as support points.
struct OcsvmModel {
  std::vector<FeatureVector> support_points;
  std::vector<double> alphas;
  double rho = 0;
  OcsvmConfig config;
  std::size_t n_train = 0;
  FitDiagnostics diagnostics;

  std::size_t dimension() const {
    return support_points.empty() ? 0 : support_points.front().size();
  }
};

// exp(-gamma * |x - y|^2). Throws kDimensionMismatch.
double KernelEval(const KernelConfig &kernel, const FeatureVector &x,
                  const FeatureVector &y);

// Solves min 1/2 a'Ka s.t. 0 <= a_i <= 1/(nu n), sum a = 1 by pairwise
// coordinate descent from the uniform point. Throws kEmptyTrainingSet or
// kDimensionMismatch. Hitting max_iter with violation above 10*tol does not
// throw: the model is returned with diagnostics.converged = false.
OcsvmModel FitOcsvm(std::span<const FeatureVector> points,
                    const OcsvmConfig &config);

// f(x) = sum_i alpha_i k(x_i, x) - rho. Negative means outlier.
double Decision(const OcsvmModel &model, const FeatureVector &x);

// Decision(model, x) < 0; the boundary itself counts as an inlier.
bool PredictOutlier(const OcsvmModel &model, const FeatureVector &x);

// 1/2 a'Ka over the retained support points.
double DualObjective(const OcsvmModel &model);

// Versioned JSON document; see README for the layout.
std::string OcsvmModelToJson(const OcsvmModel &model);
OcsvmModel OcsvmModelFromJson(const std::string &text);

}  // namespace dkdrift

#endif  // DKDRIFT_OCSVM_H_
