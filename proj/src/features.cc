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

#include "tokbudget/features.h"

#include <cmath>

namespace tokbudget {

Eigen::VectorXd extract_features(const BlockVideo& x) {
  const VideoShape& s = x.shape();
  Eigen::VectorXd out(feature_dimension(s.blocks));
  Frame predictor = Frame::Constant(s.height, s.width, 0.5);
  const double n = s.block_pixels();

  for (int b = 0; b < s.blocks; ++b) {
    double sum = 0;
    for (int f = 0; f < s.frames; ++f) sum += x.frame(b, f).cast<double>().sum();
    const double mean = sum / n;

    double var = 0, grad = 0, tdiff = 0, resid = 0;
    Frame prev = predictor;
    for (int f = 0; f < s.frames; ++f) {
      const Frame fr = x.frame(b, f).cast<double>();
      var += (fr.array() - mean).square().sum();
      double g = 0;
      if (s.width > 1) {
        g += (fr.rightCols(s.width - 1) - fr.leftCols(s.width - 1)).cwiseAbs().sum();
      }
      if (s.height > 1) {
        g += (fr.bottomRows(s.height - 1) - fr.topRows(s.height - 1)).cwiseAbs().sum();
      }
      const double pairs = static_cast<double>(s.height * (s.width - 1) +
                                               (s.height - 1) * s.width);
      grad += pairs > 0 ? g / pairs : 0.0;
      tdiff += (fr - prev).squaredNorm() / s.frame_pixels();
      resid += (fr - predictor).squaredNorm();
      prev = fr;
    }
    const int base = b * kFeaturesPerBlock;
    out(base + 0) = mean;
    out(base + 1) = var / n;
    out(base + 2) = grad / s.frames;
    out(base + 3) = tdiff / s.frames;
    out(base + 4) = resid / n;
    predictor = x.frame(b, s.frames - 1).cast<double>();
  }
  out(out.size() - 1) = 1.0;
  return out;
}

FeatureScaler FeatureScaler::identity(int dim) {
  return {Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Ones(dim)};
}

FeatureScaler FeatureScaler::fit(const Eigen::MatrixXd& features) {
  const Eigen::Index dim = features.rows();
  const auto n = static_cast<double>(features.cols());
  FeatureScaler s = identity(static_cast<int>(dim));
  if (features.cols() == 0) return s;
  for (Eigen::Index i = 0; i + 1 < dim; ++i) {
    const double mean = features.row(i).sum() / n;
    const double var = (features.row(i).array() - mean).square().sum() / n;
    const double sd = std::sqrt(var);
    if (sd > 1e-12) {
      s.mean(i) = mean;
      s.scale(i) = sd;
    }
  }
  return s;
}

}  // namespace tokbudget
