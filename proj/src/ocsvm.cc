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

#include "dkdrift/ocsvm.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dkdrift/error.h"
#include "json.hpp"

namespace dkdrift {
namespace {

constexpr int kModelFormatVersion = 1;
constexpr double kMinCurvature = 1e-12;

void CheckDimension(std::size_t expected, std::size_t got) {
  if (expected != got) {
    throw Error(ErrorCode::kDimensionMismatch,
                "expected " + std::to_string(expected) + ", got " +
                    std::to_string(got));
  }
}

}  // namespace

void OcsvmConfig::Validate() const {
  if (!(nu > 0 && nu <= 1)) {
    throw Error(ErrorCode::kInvalidConfig, "nu must be in (0, 1]");
  }
  if (!(kernel.gamma > 0)) {
    throw Error(ErrorCode::kInvalidConfig, "gamma must be positive");
  }
  if (!(tol > 0)) throw Error(ErrorCode::kInvalidConfig, "tol must be positive");
  if (max_iter <= 0) {
    throw Error(ErrorCode::kInvalidConfig, "max_iter must be positive");
  }
}

double KernelEval(const KernelConfig &kernel, const FeatureVector &x,
                  const FeatureVector &y) {
  CheckDimension(x.size(), y.size());
  double dist2 = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x.values[i] - y.values[i];
    dist2 += d * d;
  }
  return std::exp(-kernel.gamma * dist2);
}

OcsvmModel FitOcsvm(std::span<const FeatureVector> points,
                    const OcsvmConfig &config) {
  config.Validate();
  if (points.empty()) throw Error(ErrorCode::kEmptyTrainingSet, "no points");
  const std::size_t n = points.size();
  const std::size_t dim = points.front().size();
  for (const FeatureVector &p : points) CheckDimension(dim, p.size());

  OcsvmModel model;
  model.config = config;
  model.n_train = n;
  FitDiagnostics &diag = model.diagnostics;
  if (config.nu * static_cast<double>(n) < 1.0) {
    diag.warnings.push_back("nu * n < 1: the box constraint is inactive");
  }

  // Kernel matrix, row-major.
  std::vector<double> q(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    q[i * n + i] = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double k = KernelEval(config.kernel, points[i], points[j]);
      q[i * n + j] = k;
      q[j * n + i] = k;
    }
  }

  const double upper = 1.0 / (config.nu * static_cast<double>(n));
  std::vector<double> alpha(n, 1.0 / static_cast<double>(n));
  std::vector<double> grad(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) grad[i] += q[i * n + j] * alpha[j];
  }

  const long long max_updates =
      static_cast<long long>(config.max_iter) * static_cast<long long>(n);
  double violation = 0;
  for (;;) {
    // Maximal violating pair: grow the coordinate with the smallest gradient
    // that is below the box, shrink the one with the largest gradient that is
    // above zero.
    std::size_t up = n, down = n;
    double g_up = std::numeric_limits<double>::infinity();
    double g_down = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
      if (alpha[t] < upper && grad[t] < g_up) {
        g_up = grad[t];
        up = t;
      }
      if (alpha[t] > 0 && grad[t] > g_down) {
        g_down = grad[t];
        down = t;
      }
    }
    violation = (up == n || down == n) ? 0.0 : g_down - g_up;
    if (violation <= config.tol) break;
    if (diag.updates >= max_updates) break;

    const double curvature = std::max(
        q[up * n + up] + q[down * n + down] - 2 * q[up * n + down],
        kMinCurvature);
    double step = violation / curvature;
    const double room_up = upper - alpha[up];
    const double room_down = alpha[down];
    bool up_at_bound = false, down_at_zero = false;
    if (step >= room_up) {
      step = room_up;
      up_at_bound = true;
    }
    if (step >= room_down) {
      step = room_down;
      down_at_zero = true;
      up_at_bound = step >= room_up;
    }
    alpha[up] = up_at_bound ? upper : alpha[up] + step;
    alpha[down] = down_at_zero ? 0.0 : alpha[down] - step;
    for (std::size_t t = 0; t < n; ++t) {
      grad[t] += step * (q[t * n + up] - q[t * n + down]);
    }
    ++diag.updates;
  }
  diag.max_violation = violation;
  if (violation > 10 * config.tol) {
    diag.converged = false;
    diag.warnings.push_back("no convergence: KKT violation " +
                            std::to_string(violation) + " after " +
                            std::to_string(diag.updates) + " updates");
  }

  // rho from margin support vectors, else from all support vectors.
  double margin_sum = 0, sv_sum = 0;
  std::size_t margin_count = 0, sv_count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (alpha[i] > config.tol) {
      sv_sum += grad[i];
      ++sv_count;
      if (alpha[i] < upper - config.tol) {
        margin_sum += grad[i];
        ++margin_count;
      }
    }
  }
  model.rho = margin_count > 0 ? margin_sum / static_cast<double>(margin_count)
                               : sv_sum / static_cast<double>(sv_count);

  for (std::size_t i = 0; i < n; ++i) {
    if (alpha[i] > config.tol) {
      model.support_points.push_back(points[i]);
      model.alphas.push_back(alpha[i]);
    }
  }
  return model;
}

double Decision(const OcsvmModel &model, const FeatureVector &x) {
  CheckDimension(model.dimension(), x.size());
  double sum = 0;
  for (std::size_t i = 0; i < model.support_points.size(); ++i) {
    sum += model.alphas[i] *
           KernelEval(model.config.kernel, model.support_points[i], x);
  }
  return sum - model.rho;
}

bool PredictOutlier(const OcsvmModel &model, const FeatureVector &x) {
  return Decision(model, x) < 0;
}

double DualObjective(const OcsvmModel &model) {
  const std::size_t n = model.support_points.size();
  double sum = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      sum += model.alphas[i] * model.alphas[j] *
             KernelEval(model.config.kernel, model.support_points[i],
                        model.support_points[j]);
    }
  }
  return 0.5 * sum;
}

std::string OcsvmModelToJson(const OcsvmModel &model) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["version"] = kModelFormatVersion;
  doc["config"] = {
      {"nu", model.config.nu},
      {"kernel", {{"kind", "rbf"}, {"gamma", model.config.kernel.gamma}}},
      {"tol", model.config.tol},
      {"max_iter", model.config.max_iter},
  };
  doc["n_train"] = model.n_train;
  doc["rho"] = model.rho;
  doc["alphas"] = model.alphas;
  // Support points are stored sparsely: hashed text vectors are mostly zero.
  ordered_json points = ordered_json::array();
  for (const FeatureVector &p : model.support_points) {
    ordered_json indices = ordered_json::array();
    ordered_json values = ordered_json::array();
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p.values[i] != 0.0) {
        indices.push_back(i);
        values.push_back(p.values[i]);
      }
    }
    points.push_back(ordered_json{{"dim", p.size()},
                                  {"indices", std::move(indices)},
                                  {"values", std::move(values)}});
  }
  doc["support_points"] = std::move(points);
  return doc.dump(2) + "\n";
}

OcsvmModel OcsvmModelFromJson(const std::string &text) {
  try {
    const auto doc = nlohmann::json::parse(text);
    if (doc.at("version").get<int>() != kModelFormatVersion) {
      throw Error(ErrorCode::kMalformedDocument,
                  "unsupported model version " + doc.at("version").dump());
    }
    OcsvmModel model;
    const auto &cfg = doc.at("config");
    model.config.nu = cfg.at("nu").get<double>();
    if (cfg.at("kernel").at("kind").get<std::string>() != "rbf") {
      throw Error(ErrorCode::kInvalidConfig, "only the rbf kernel is supported");
    }
    model.config.kernel.gamma = cfg.at("kernel").at("gamma").get<double>();
    model.config.tol = cfg.at("tol").get<double>();
    model.config.max_iter = cfg.at("max_iter").get<int>();
    model.config.Validate();
    model.n_train = doc.at("n_train").get<std::size_t>();
    model.rho = doc.at("rho").get<double>();
    model.alphas = doc.at("alphas").get<std::vector<double>>();
    for (const auto &p : doc.at("support_points")) {
      FeatureVector v{std::vector<double>(p.at("dim").get<std::size_t>(), 0.0)};
      const auto indices = p.at("indices").get<std::vector<std::size_t>>();
      const auto values = p.at("values").get<std::vector<double>>();
      if (indices.size() != values.size()) {
        throw Error(ErrorCode::kMalformedDocument,
                    "support point indices/values length mismatch");
      }
      for (std::size_t k = 0; k < indices.size(); ++k) {
        if (indices[k] >= v.size()) {
          throw Error(ErrorCode::kMalformedDocument,
                      "support point index out of range");
        }
        v.values[indices[k]] = values[k];
      }
      model.support_points.push_back(std::move(v));
    }
    if (model.support_points.size() != model.alphas.size()) {
      throw Error(ErrorCode::kMalformedDocument,
                  "alphas and support_points differ in length");
    }
    return model;
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kMalformedDocument,
                std::string("model document: ") + e.what());
  }
}

}  // namespace dkdrift
