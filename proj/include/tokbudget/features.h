// Copyright 2026 The tokbudget Authors.
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

#ifndef TOKBUDGET_FEATURES_H_
#define TOKBUDGET_FEATURES_H_

#include <Eigen/Dense>

#include "tokbudget/video.h"

namespace tokbudget {

inline constexpr int kFeaturesPerBlock = 5;

inline int feature_dimension(int blocks) { return kFeaturesPerBlock * blocks + 1; }

// Per block, in order: mean intensity; intensity variance; mean absolute
// forward-difference spatial gradient; mean squared frame-to-frame difference,
// where the first frame is compared with the block's causal predictor frame;
// mean squared residual against the causal predictor frame. The causal
// predictor frame is the last source frame of the previous block (a constant
// 0.5 frame for block 0). A trailing constant 1 acts as the bias input.
Eigen::VectorXd extract_features(const BlockVideo& x);

// Per-feature standardization fitted on a training split. The bias input is
// passed through unchanged, as is any feature with zero spread.
struct FeatureScaler {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;

  static FeatureScaler identity(int dim);
  // `features` is dim x n, one column per sample.
  static FeatureScaler fit(const Eigen::MatrixXd& features);

  Eigen::MatrixXd apply(const Eigen::MatrixXd& features) const {
    return (features.colwise() - mean).array().colwise() / scale.array();
  }
};

}  // namespace tokbudget

#endif  // TOKBUDGET_FEATURES_H_
