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

#ifndef DKDRIFT_OCDD_H_
#define DKDRIFT_OCDD_H_

#include <cstddef>
#include <deque>
#include <memory>
#include <optional>
#include <span>

#include "dkdrift/featurize.h"
#include "dkdrift/ocsvm.h"

namespace dkdrift {

struct OcddConfig {
  std::size_t window_size = 25;   // trailing flag window
  double drift_threshold = 0.3;   // outlier ratio that fires drift, in (0, 1)
  std::size_t min_fill = 3;       // observations required before firing
  OcsvmConfig svm;

  // Throws kInvalidConfig.
  void Validate() const;
};

struct ObserveResult {
  bool outlier = false;
  double ratio = 0;
  bool drift_fired = false;
  std::optional<std::size_t> drift_index;

  bool operator==(const ObserveResult &) const = default;
};

// One-class concept drift detector: an OCSVM fitted on normal data scores
// each observation, and drift fires once the outlier ratio over the trailing
// window reaches the threshold. The detector freezes after firing; further
// observations return the drift record unchanged.
class OcddDetector {
 public:
  OcddDetector(const OcsvmModel &model, const OcddConfig &config);
  // Shares a fitted model between detectors (one detector per stream).
  OcddDetector(std::shared_ptr<const OcsvmModel> model,
               const OcddConfig &config);

  // Fits the model on `training` first. Propagates FitOcsvm errors.
  static OcddDetector Train(std::span<const FeatureVector> training,
                            const OcddConfig &config);

  ObserveResult Observe(const FeatureVector &x);

  const OcsvmModel &model() const { return *model_; }
  const OcddConfig &config() const { return config_; }
  std::size_t observed() const { return observed_; }
  bool drifted() const { return drifted_; }
  std::optional<std::size_t> drift_index() const { return drift_index_; }
  const std::deque<bool> &flags() const { return flags_; }

 private:
  std::shared_ptr<const OcsvmModel> model_;
  OcddConfig config_;
  std::deque<bool> flags_;
  std::size_t outliers_in_window_ = 0;
  std::size_t observed_ = 0;
  bool drifted_ = false;
  std::optional<std::size_t> drift_index_;
  ObserveResult drift_record_;
};

}  // namespace dkdrift

#endif  // DKDRIFT_OCDD_H_
