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

#include "dkdrift/ocdd.h"

#include "dkdrift/error.h"

namespace dkdrift {

void OcddConfig::Validate() const {
  if (window_size == 0) {
    throw Error(ErrorCode::kInvalidConfig, "window_size must be positive");
  }
  if (!(drift_threshold > 0 && drift_threshold < 1)) {
    throw Error(ErrorCode::kInvalidConfig, "drift_threshold must be in (0, 1)");
  }
  if (min_fill == 0 || min_fill > window_size) {
    throw Error(ErrorCode::kInvalidConfig,
                "min_fill must be in [1, window_size]");
  }
  svm.Validate();
}

OcddDetector::OcddDetector(const OcsvmModel &model, const OcddConfig &config)
    : OcddDetector(std::make_shared<const OcsvmModel>(model), config) {}

OcddDetector::OcddDetector(std::shared_ptr<const OcsvmModel> model,
                           const OcddConfig &config)
    : model_(std::move(model)), config_(config) {
  config_.Validate();
}

OcddDetector OcddDetector::Train(std::span<const FeatureVector> training,
                                 const OcddConfig &config) {
  config.Validate();
  return OcddDetector(
      std::make_shared<const OcsvmModel>(FitOcsvm(training, config.svm)),
      config);
}

ObserveResult OcddDetector::Observe(const FeatureVector &x) {
  if (drifted_) return drift_record_;

  const bool outlier = PredictOutlier(*model_, x);
  const std::size_t ordinal = observed_++;
  flags_.push_back(outlier);
  if (outlier) ++outliers_in_window_;
  if (flags_.size() > config_.window_size) {
    if (flags_.front()) --outliers_in_window_;
    flags_.pop_front();
  }

  ObserveResult result;
  result.outlier = outlier;
  result.ratio = static_cast<double>(outliers_in_window_) /
                 static_cast<double>(flags_.size());
  if (observed_ >= config_.min_fill &&
      result.ratio >= config_.drift_threshold) {
    result.drift_fired = true;
    result.drift_index = ordinal;
    drifted_ = true;
    drift_index_ = ordinal;
    drift_record_ = result;
  }
  return result;
}

}  // namespace dkdrift
