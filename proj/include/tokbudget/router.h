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

// Router: a one-hidden-layer tanh network with a joint m^T-way softmax that
// predicts the max-reward assignment class from video features. Gradients
// are written out by hand; grad_check compares them with central finite
// differences.

#ifndef TOKBUDGET_ROUTER_H_
#define TOKBUDGET_ROUTER_H_

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tokbudget/core.h"
#include "tokbudget/features.h"
#include "tokbudget/reward.h"

namespace tokbudget {

struct RouterParams {
  Eigen::MatrixXd w1;  // hidden x inputs
  Eigen::VectorXd b1;  // hidden
  Eigen::MatrixXd w2;  // classes x hidden
  Eigen::VectorXd b2;  // classes

  static RouterParams zeros(int inputs, int hidden, int classes);
  // Glorot-uniform first layer, small uniform output layer, zero biases.
  static RouterParams random(int inputs, int hidden, int classes,
                             std::uint64_t seed);

  int inputs() const { return static_cast<int>(w1.cols()); }
  int hidden() const { return static_cast<int>(w1.rows()); }
  int classes() const { return static_cast<int>(w2.rows()); }
  std::int64_t size() const {
    return w1.size() + b1.size() + w2.size() + b2.size();
  }

  // Flat view order: w1 (column-major), b1, w2 (column-major), b2.
  double& at(std::int64_t flat);
  double at(std::int64_t flat) const;
  // Name of the group a flat index falls in ("w1", "b1", "w2", "b2").
  std::string group_of(std::int64_t flat) const;

  bool all_finite() const;
  bool operator==(const RouterParams& other) const;
};

using RouterGradients = RouterParams;

// Logits (classes x n) for standardized inputs (inputs x n).
Eigen::MatrixXd router_logits(const RouterParams& p, const Eigen::MatrixXd& x);

// Column-wise softmax with max subtraction.
Eigen::MatrixXd softmax_columns(const Eigen::MatrixXd& logits);

// Mean cross-entropy over the columns of x; fills `grad` when non-null.
double router_loss(const RouterParams& p, const Eigen::MatrixXd& x,
                   std::span<const AssignmentIndex> labels,
                   RouterGradients* grad);

struct TrainHyper {
  int hidden = 64;
  int batch = 64;
  double learning_rate = 0.05;
  double momentum = 0.9;
  int epochs = 200;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const TrainHyper&) const = default;
};

struct RouterModel {
  std::vector<int> levels;
  int blocks = 0;
  RewardWeights weights;  // weights the training labels were curated with
  TrainHyper hyper;
  FeatureScaler scaler;
  RouterParams params;

  // Class probabilities for raw (unstandardized) features. Throws
  // ValidationError on a dimension mismatch.
  Eigen::VectorXd forward(const Eigen::VectorXd& features) const;
  // Highest-probability class; ties go to the smaller index.
  AssignmentIndex predict(const Eigen::VectorXd& features) const;

  bool operator==(const RouterModel& other) const;
};

// Probabilities (classes) for one feature vector under a model.
inline Eigen::VectorXd forward(const RouterModel& model,
                               const Eigen::VectorXd& features) {
  return model.forward(features);
}

struct TrainingData {
  Eigen::MatrixXd train_x;  // raw features, dim x n
  std::vector<AssignmentIndex> train_y;
  Eigen::MatrixXd val_x;
  std::vector<AssignmentIndex> val_y;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0;
  double val_loss = 0;
  double val_top1 = 0;  // percent
};

struct TrainingResult {
  RouterModel model;  // best-validation checkpoint
  std::vector<EpochRecord> history;
  int best_epoch = 0;
};

// Minibatch SGD with momentum on mean cross-entropy. Deterministic for a
// given hyper.seed. The checkpoint kept is the epoch with the highest
// validation top-1 accuracy (ties: lower validation loss, then earlier);
// without a validation split it is the last epoch. Throws DivergenceError
// with the offending step on a non-finite loss.
TrainingResult train_router(const TrainingData& data, const TrainHyper& hyper,
                            const CandidateLevels& levels,
                            const RewardWeights& weights);

using GradientFn = std::function<RouterGradients(
    const RouterParams&, const Eigen::MatrixXd&, std::span<const AssignmentIndex>)>;

// Backprop gradients (the default for grad_check).
RouterGradients analytic_gradients(const RouterParams& p,
                                   const Eigen::MatrixXd& x,
                                   std::span<const AssignmentIndex> labels);

struct GradCheckReport {
  double max_relative_error = 0;
  std::string worst_group;
  std::int64_t worst_flat_index = -1;
  int checked = 0;
};

// Central differences with `step` on `per_group` random coordinates of each
// parameter group (>= 50 in total by default). Relative error is
// |analytic - numeric| / max(|analytic|, |numeric|, 1e-6).
GradCheckReport grad_check(const RouterParams& p, const Eigen::MatrixXd& x,
                           std::span<const AssignmentIndex> labels,
                           std::uint64_t seed, int per_group = 16,
                           double step = 1e-5,
                           const GradientFn& gradients = analytic_gradients);

// router.v1 text format.
std::string serialize_model(const RouterModel& model);
RouterModel parse_model(const std::string& text);
void write_model_file(const std::string& path, const RouterModel& model);
RouterModel read_model_file(const std::string& path);

}  // namespace tokbudget

#endif  // TOKBUDGET_ROUTER_H_
