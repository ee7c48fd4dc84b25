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

// Helpers shared by the unit tests and the acceptance binary.

#ifndef DKDRIFT_TESTS_SUPPORT_TEST_SUPPORT_H_
#define DKDRIFT_TESTS_SUPPORT_TEST_SUPPORT_H_

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include "dkdrift/featurize.h"
#include "dkdrift/ocsvm.h"
#include "httplib.h"

namespace dkdrift::testing {

inline std::string DataPath(const std::string &name) {
  return std::string(DKDRIFT_TEST_DATA_DIR) + "/" + name;
}

// Portable generator; the Python oracles use the same stream.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t Next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  double Uniform() { return static_cast<double>(Next() >> 11) * 0x1.0p-53; }

  double Normal() {
    const double u1 = 1.0 - Uniform();
    const double u2 = Uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t state_;
};

inline std::vector<FeatureVector> GaussianCluster(SplitMix64 &rng,
                                                  const std::vector<double> &center,
                                                  double sd, int count) {
  std::vector<FeatureVector> out;
  for (int i = 0; i < count; ++i) {
    FeatureVector v;
    for (double c : center) v.values.push_back(c + sd * rng.Normal());
    out.push_back(std::move(v));
  }
  return out;
}

// Solution of the one-class dual by enumerating every assignment of the
// variables to {lower bound, upper bound, free}. Small n only (3^n systems).
struct QpSolution {
  std::vector<double> alpha;
  double objective = std::numeric_limits<double>::infinity();
  double rho_lo = 0, rho_hi = 0;  // admissible offsets
};

inline bool SolveLinear(std::vector<std::vector<double>> a, std::vector<double> b,
                        std::vector<double> &x) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
    }
    if (std::fabs(a[pivot][col]) < 1e-14) return false;
    std::swap(a[pivot], a[col]);
    std::swap(b[pivot], b[col]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  x.resize(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return true;
}

inline QpSolution BruteForceOcsvmDual(const std::vector<FeatureVector> &points,
                                      double nu, double gamma) {
  const std::size_t n = points.size();
  const double upper = 1.0 / (nu * static_cast<double>(n));
  KernelConfig kernel;
  kernel.gamma = gamma;
  std::vector<std::vector<double>> k(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) k[i][j] = KernelEval(kernel, points[i], points[j]);
  }
  QpSolution best;
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= 3;
  std::vector<int> state(n);
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    std::vector<std::size_t> free_set;
    std::size_t at_upper = 0;
    for (std::size_t i = 0; i < n; ++i) {
      state[i] = static_cast<int>(c % 3);
      c /= 3;
      if (state[i] == 2) free_set.push_back(i);
      if (state[i] == 1) ++at_upper;
    }
    const double remaining = 1.0 - static_cast<double>(at_upper) * upper;
    std::vector<double> alpha(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) alpha[i] = state[i] == 1 ? upper : 0.0;
    double lambda = 0;
    if (free_set.empty()) {
      if (std::fabs(remaining) > 1e-12) continue;
    } else {
      // Stationarity on the free set plus the equality constraint.
      const std::size_t m = free_set.size();
      std::vector<std::vector<double>> a(m + 1, std::vector<double>(m + 1, 0.0));
      std::vector<double> b(m + 1, 0.0);
      for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t cc = 0; cc < m; ++cc) a[r][cc] = k[free_set[r]][free_set[cc]];
        a[r][m] = -1.0;
        for (std::size_t j = 0; j < n; ++j) {
          if (state[j] == 1) b[r] -= k[free_set[r]][j] * upper;
        }
      }
      for (std::size_t cc = 0; cc < m; ++cc) a[m][cc] = 1.0;
      b[m] = remaining;
      std::vector<double> x;
      if (!SolveLinear(a, b, x)) continue;
      bool feasible = true;
      for (std::size_t r = 0; r < m; ++r) {
        if (x[r] < -1e-12 || x[r] > upper + 1e-12) feasible = false;
        alpha[free_set[r]] = std::clamp(x[r], 0.0, upper);
      }
      if (!feasible) continue;
      lambda = x[m];
    }
    double objective = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) objective += 0.5 * alpha[i] * k[i][j] * alpha[j];
    }
    if (objective < best.objective - 1e-15) {
      best.objective = objective;
      best.alpha = alpha;
      std::vector<double> grad(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) grad[i] += k[i][j] * alpha[j];
      }
      if (!free_set.empty()) {
        best.rho_lo = best.rho_hi = lambda;
      } else {
        // Any offset between the bound groups satisfies the KKT conditions.
        best.rho_lo = -std::numeric_limits<double>::infinity();
        best.rho_hi = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
          if (state[i] == 1) best.rho_lo = std::max(best.rho_lo, grad[i]);
          if (state[i] == 0) best.rho_hi = std::min(best.rho_hi, grad[i]);
        }
      }
    }
  }
  return best;
}

// Kernel expansion of the oracle solution at x, without the offset.
inline double OracleScore(const std::vector<FeatureVector> &points,
                          const QpSolution &sol, double gamma,
                          const FeatureVector &x) {
  KernelConfig kernel;
  kernel.gamma = gamma;
  double s = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    s += sol.alpha[i] * KernelEval(kernel, points[i], x);
  }
  return s;
}

inline std::vector<FeatureVector> RandomPoints(SplitMix64 &rng, int n, int d) {
  std::vector<FeatureVector> out(n);
  for (auto &p : out) {
    for (int j = 0; j < d; ++j) p.values.push_back(rng.Uniform() * 2.0 - 1.0);
  }
  return out;
}

// Local chat-completions stand-in running on an ephemeral port.
class StubServer {
 public:
  StubServer() = default;
  StubServer(const StubServer &) = delete;
  StubServer &operator=(const StubServer &) = delete;
  ~StubServer() { Stop(); }

  httplib::Server &server() { return server_; }

  void Start() {
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  void Stop() {
    if (thread_.joinable()) {
      server_.stop();
      thread_.join();
    }
  }

  std::string Url(const std::string &path) const {
    return "http://127.0.0.1:" + std::to_string(port_) + path;
  }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

inline std::string ChatReply(const std::string &content) {
  return std::string(R"({"id":"x","choices":[{"index":0,"message":{"role":"assistant","content":)") +
         "\"" + content + "\"}}]}";
}

}  // namespace dkdrift::testing

#endif  // DKDRIFT_TESTS_SUPPORT_TEST_SUPPORT_H_
