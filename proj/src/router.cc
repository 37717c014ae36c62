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

#include "tokbudget/router.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "tokbudget/errors.h"
#include "tokbudget/random.h"
#include "tokbudget/text.h"

namespace tokbudget {
namespace {

constexpr const char* kModelFormat = "router.v1";

void fill_uniform(Eigen::Ref<Eigen::MatrixXd> m, double limit, Rng& rng) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = rng.uniform(-limit, limit);
  }
}

AssignmentIndex argmax_column(const Eigen::MatrixXd& m, Eigen::Index col) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < m.rows(); ++i) {
    if (m(i, col) > m(best, col)) best = i;
  }
  return best;
}

Eigen::MatrixXd gather_columns(const Eigen::MatrixXd& x,
                               std::span<const std::int64_t> cols) {
  Eigen::MatrixXd out(x.rows(), static_cast<Eigen::Index>(cols.size()));
  for (size_t j = 0; j < cols.size(); ++j) out.col(j) = x.col(cols[j]);
  return out;
}

struct SplitMetrics {
  double loss = 0;
  double top1 = 0;
};

SplitMetrics split_metrics(const RouterParams& p, const Eigen::MatrixXd& x,
                           std::span<const AssignmentIndex> y) {
  SplitMetrics m;
  if (x.cols() == 0) return m;
  m.loss = router_loss(p, x, y, nullptr);
  const Eigen::MatrixXd logits = router_logits(p, x);
  std::int64_t hits = 0;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    if (argmax_column(logits, j) == y[j]) ++hits;
  }
  m.top1 = 100.0 * static_cast<double>(hits) / static_cast<double>(x.cols());
  return m;
}

// Space-separated values of a matrix in column-major order.
std::string values_text(const double* data, Eigen::Index n) {
  std::string out;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i) out += ' ';
    out += format_double(data[i]);
  }
  return out;
}

void read_values(const std::string& text, double* data, Eigen::Index n,
                 const std::string& where) {
  std::istringstream in(text);
  std::string token;
  Eigen::Index i = 0;
  while (in >> token) {
    if (i >= n) throw ValidationError(where + ": too many values");
    data[i++] = parse_double(token, where);
  }
  if (i != n) throw ValidationError(where + ": expected " + std::to_string(n) +
                                    " values, got " + std::to_string(i));
}

}  // namespace

RouterParams RouterParams::zeros(int inputs, int hidden, int classes) {
  RouterParams p;
  p.w1 = Eigen::MatrixXd::Zero(hidden, inputs);
  p.b1 = Eigen::VectorXd::Zero(hidden);
  p.w2 = Eigen::MatrixXd::Zero(classes, hidden);
  p.b2 = Eigen::VectorXd::Zero(classes);
  return p;
}

RouterParams RouterParams::random(int inputs, int hidden, int classes,
                                  std::uint64_t seed) {
  RouterParams p = zeros(inputs, hidden, classes);
  Rng rng(derive_seed(seed, "router.init"));
  fill_uniform(p.w1, std::sqrt(6.0 / (inputs + hidden)), rng);
  fill_uniform(p.w2, 0.1 / std::sqrt(static_cast<double>(hidden)), rng);
  return p;
}

double& RouterParams::at(std::int64_t flat) {
  if (flat < w1.size()) return w1.data()[flat];
  flat -= w1.size();
  if (flat < b1.size()) return b1.data()[flat];
  flat -= b1.size();
  if (flat < w2.size()) return w2.data()[flat];
  flat -= w2.size();
  if (flat < b2.size()) return b2.data()[flat];
  throw RangeError("parameter index out of range");
}

double RouterParams::at(std::int64_t flat) const {
  return const_cast<RouterParams*>(this)->at(flat);
}

std::string RouterParams::group_of(std::int64_t flat) const {
  if (flat < w1.size()) return "w1";
  flat -= w1.size();
  if (flat < b1.size()) return "b1";
  flat -= b1.size();
  if (flat < w2.size()) return "w2";
  return "b2";
}

bool RouterParams::all_finite() const {
  return w1.allFinite() && b1.allFinite() && w2.allFinite() && b2.allFinite();
}

bool RouterParams::operator==(const RouterParams& o) const {
  auto same = [](const auto& a, const auto& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
  };
  return same(w1, o.w1) && same(b1, o.b1) && same(w2, o.w2) && same(b2, o.b2);
}

Eigen::MatrixXd router_logits(const RouterParams& p, const Eigen::MatrixXd& x) {
  const Eigen::MatrixXd h = ((p.w1 * x).colwise() + p.b1).array().tanh().matrix();
  return (p.w2 * h).colwise() + p.b2;
}

Eigen::MatrixXd softmax_columns(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd out =
      (logits.rowwise() - logits.colwise().maxCoeff()).array().exp().matrix();
  out.array().rowwise() /= out.colwise().sum().array();
  return out;
}

double router_loss(const RouterParams& p, const Eigen::MatrixXd& x,
                   std::span<const AssignmentIndex> labels,
                   RouterGradients* grad) {
  const Eigen::Index n = x.cols();
  if (static_cast<Eigen::Index>(labels.size()) != n || n == 0) {
    throw ValidationError("router_loss: label count must match a nonempty batch");
  }
  if (x.rows() != p.inputs()) {
    throw ValidationError("router_loss: input dimension mismatch");
  }
  const Eigen::MatrixXd h = ((p.w1 * x).colwise() + p.b1).array().tanh().matrix();
  const Eigen::MatrixXd z = (p.w2 * h).colwise() + p.b2;
  const Eigen::RowVectorXd zmax = z.colwise().maxCoeff();
  const Eigen::MatrixXd e = (z.rowwise() - zmax).array().exp().matrix();
  const Eigen::RowVectorXd denom = e.colwise().sum();

  double loss = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const AssignmentIndex y = labels[j];
    if (y < 0 || y >= p.classes()) throw ValidationError("label out of range");
    loss += std::log(denom(j)) - (z(y, j) - zmax(j));
  }
  loss /= static_cast<double>(n);

  if (grad) {
    Eigen::MatrixXd dz = e.array().rowwise() / denom.array();
    for (Eigen::Index j = 0; j < n; ++j) dz(labels[j], j) -= 1.0;
    dz /= static_cast<double>(n);
    grad->w2 = dz * h.transpose();
    grad->b2 = dz.rowwise().sum();
    const Eigen::MatrixXd da =
        ((p.w2.transpose() * dz).array() * (1.0 - h.array().square())).matrix();
    grad->w1 = da * x.transpose();
    grad->b1 = da.rowwise().sum();
  }
  return loss;
}

RouterGradients analytic_gradients(const RouterParams& p,
                                   const Eigen::MatrixXd& x,
                                   std::span<const AssignmentIndex> labels) {
  RouterGradients g;
  router_loss(p, x, labels, &g);
  return g;
}

void TrainHyper::validate() const {
  if (hidden < 1 || batch < 1 || epochs < 1) {
    throw ValidationError("router hidden/batch/epochs must be >= 1");
  }
  if (!(learning_rate > 0) || !(momentum >= 0 && momentum < 1)) {
    throw ValidationError("router learning rate must be > 0, momentum in [0, 1)");
  }
}

Eigen::VectorXd RouterModel::forward(const Eigen::VectorXd& features) const {
  if (features.size() != params.inputs() ||
      scaler.mean.size() != params.inputs()) {
    throw ValidationError("router input has dimension " +
                          std::to_string(features.size()) + ", model expects " +
                          std::to_string(params.inputs()));
  }
  const Eigen::MatrixXd x = scaler.apply(features);
  return softmax_columns(router_logits(params, x)).col(0);
}

AssignmentIndex RouterModel::predict(const Eigen::VectorXd& features) const {
  const Eigen::VectorXd prob = forward(features);
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < prob.size(); ++i) {
    if (prob(i) > prob(best)) best = i;
  }
  return best;
}

bool RouterModel::operator==(const RouterModel& o) const {
  return levels == o.levels && blocks == o.blocks && weights == o.weights &&
         hyper == o.hyper && scaler.mean == o.scaler.mean &&
         scaler.scale == o.scaler.scale && params == o.params;
}

TrainingResult train_router(const TrainingData& data, const TrainHyper& hyper,
                            const CandidateLevels& levels,
                            const RewardWeights& weights) {
  hyper.validate();
  const Eigen::Index n = data.train_x.cols();
  if (n == 0) throw ValidationError("training split is empty");
  if (static_cast<Eigen::Index>(data.train_y.size()) != n ||
      static_cast<Eigen::Index>(data.val_y.size()) != data.val_x.cols()) {
    throw ValidationError("feature and label counts differ");
  }
  const int classes = static_cast<int>(levels.num_assignments());
  for (auto y : data.train_y) {
    if (y < 0 || y >= classes) throw ValidationError("training label out of range");
  }
  const int inputs = static_cast<int>(data.train_x.rows());

  TrainingResult result;
  RouterModel& model = result.model;
  model.levels = levels.values();
  model.blocks = levels.blocks();
  model.weights = weights;
  model.hyper = hyper;
  model.scaler = FeatureScaler::fit(data.train_x);
  model.params = RouterParams::random(inputs, hyper.hidden, classes, hyper.seed);

  const Eigen::MatrixXd train_x = model.scaler.apply(data.train_x);
  const Eigen::MatrixXd val_x = data.val_x.cols() > 0
                                    ? model.scaler.apply(data.val_x)
                                    : Eigen::MatrixXd(inputs, 0);

  RouterParams params = model.params;
  RouterParams velocity = RouterParams::zeros(inputs, hyper.hidden, classes);
  RouterGradients grad;
  std::vector<std::int64_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(hyper.seed, "router.shuffle"));
  std::vector<AssignmentIndex> batch_y;
  std::int64_t step = 0;
  bool have_best = false;
  SplitMetrics best_val;

  for (int epoch = 1; epoch <= hyper.epochs; ++epoch) {
    for (std::int64_t i = n - 1; i > 0; --i) {
      std::swap(order[i], order[rng.uniform_int(0, i)]);
    }
    double loss_sum = 0;
    for (std::int64_t start = 0; start < n; start += hyper.batch) {
      const std::int64_t len = std::min<std::int64_t>(hyper.batch, n - start);
      const std::span<const std::int64_t> cols(order.data() + start, len);
      const Eigen::MatrixXd bx = gather_columns(train_x, cols);
      batch_y.resize(len);
      for (std::int64_t j = 0; j < len; ++j) batch_y[j] = data.train_y[cols[j]];
      const double loss = router_loss(params, bx, batch_y, &grad);
      if (!std::isfinite(loss)) {
        throw DivergenceError(step, "router training loss is not finite");
      }
      loss_sum += loss * static_cast<double>(len);
      auto update = [&](auto& v, auto& p, const auto& g) {
        v = hyper.momentum * v - hyper.learning_rate * g;
        p += v;
      };
      update(velocity.w1, params.w1, grad.w1);
      update(velocity.b1, params.b1, grad.b1);
      update(velocity.w2, params.w2, grad.w2);
      update(velocity.b2, params.b2, grad.b2);
      ++step;
    }
    if (!params.all_finite()) {
      throw DivergenceError(step, "router parameters are not finite");
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(n);
    const SplitMetrics val = split_metrics(params, val_x, data.val_y);
    rec.val_loss = val.loss;
    rec.val_top1 = val.top1;
    result.history.push_back(rec);

    const bool improved =
        val_x.cols() == 0 || !have_best || val.top1 > best_val.top1 ||
        (val.top1 == best_val.top1 && val.loss < best_val.loss);
    if (improved) {
      have_best = true;
      best_val = val;
      model.params = params;
      result.best_epoch = epoch;
    }
  }
  return result;
}

GradCheckReport grad_check(const RouterParams& p, const Eigen::MatrixXd& x,
                           std::span<const AssignmentIndex> labels,
                           std::uint64_t seed, int per_group, double step,
                           const GradientFn& gradients) {
  const RouterGradients analytic = gradients(p, x, labels);
  RouterParams probe = p;
  Rng rng(derive_seed(seed, "grad_check"));
  GradCheckReport report;

  const std::int64_t sizes[4] = {p.w1.size(), p.b1.size(), p.w2.size(),
                                 p.b2.size()};
  std::int64_t offset = 0;
  for (std::int64_t group_size : sizes) {
    for (int s = 0; s < per_group && group_size > 0; ++s) {
      const std::int64_t flat = offset + rng.uniform_int(0, group_size - 1);
      const double saved = probe.at(flat);
      probe.at(flat) = saved + step;
      const double up = router_loss(probe, x, labels, nullptr);
      probe.at(flat) = saved - step;
      const double down = router_loss(probe, x, labels, nullptr);
      probe.at(flat) = saved;
      const double numeric = (up - down) / (2 * step);
      const double a = analytic.at(flat);
      const double denom =
          std::max({std::abs(a), std::abs(numeric), 1e-6});
      const double rel = std::abs(a - numeric) / denom;
      ++report.checked;
      if (report.worst_flat_index < 0 || rel > report.max_relative_error) {
        report.max_relative_error = rel;
        report.worst_flat_index = flat;
        report.worst_group = p.group_of(flat);
      }
    }
    offset += group_size;
  }
  return report;
}

std::string serialize_model(const RouterModel& m) {
  std::ostringstream out;
  auto ints = [](const std::vector<int>& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
  };
  out << "format = " << kModelFormat << "\n";
  out << "inputs = " << m.params.inputs() << "\n";
  out << "hidden = " << m.params.hidden() << "\n";
  out << "classes = " << m.params.classes() << "\n";
  out << "activation = tanh\n";
  out << "levels = " << ints(m.levels) << "\n";
  out << "blocks = " << m.blocks << "\n";
  out << "weights = " << format_double(m.weights.quality) << ","
      << format_double(m.weights.length) << "\n";
  out << "seed = " << m.hyper.seed << "\n";
  out << "train.batch = " << m.hyper.batch << "\n";
  out << "train.learning_rate = " << format_double(m.hyper.learning_rate) << "\n";
  out << "train.momentum = " << format_double(m.hyper.momentum) << "\n";
  out << "train.epochs = " << m.hyper.epochs << "\n";
  out << "feature_mean = " << values_text(m.scaler.mean.data(), m.scaler.mean.size()) << "\n";
  out << "feature_scale = " << values_text(m.scaler.scale.data(), m.scaler.scale.size()) << "\n";
  out << "w1 = " << values_text(m.params.w1.data(), m.params.w1.size()) << "\n";
  out << "b1 = " << values_text(m.params.b1.data(), m.params.b1.size()) << "\n";
  out << "w2 = " << values_text(m.params.w2.data(), m.params.w2.size()) << "\n";
  out << "b2 = " << values_text(m.params.b2.data(), m.params.b2.size()) << "\n";
  return out.str();
}

RouterModel parse_model(const std::string& text) {
  const KeyValueText kv = KeyValueText::parse(text, "model");
  if (kv.get("format") != kModelFormat) {
    throw ValidationError("unsupported model format '" + kv.get("format") + "'");
  }
  if (kv.get("activation") != "tanh") {
    throw ValidationError("unsupported activation '" + kv.get("activation") + "'");
  }
  const auto inputs = static_cast<int>(parse_int64(kv.get("inputs"), "inputs"));
  const auto hidden = static_cast<int>(parse_int64(kv.get("hidden"), "hidden"));
  const auto classes = static_cast<int>(parse_int64(kv.get("classes"), "classes"));
  if (inputs < 1 || hidden < 1 || classes < 1) {
    throw ValidationError("model dimensions must be positive");
  }
  RouterModel m;
  m.levels = parse_int_list(kv.get("levels"));
  m.blocks = static_cast<int>(parse_int64(kv.get("blocks"), "blocks"));
  const CandidateLevels lv(m.levels, m.blocks);
  if (lv.num_assignments() != classes) {
    throw ValidationError("model classes differ from m^T");
  }
  const auto w = parse_double_list(kv.get("weights"), "weights");
  if (w.size() != 2) throw ValidationError("weights needs two values");
  m.weights = {w[0], w[1]};
  m.hyper.hidden = hidden;
  m.hyper.seed = parse_uint64(kv.get("seed"), "seed");
  m.hyper.batch = static_cast<int>(parse_int64(kv.get("train.batch"), "train.batch"));
  m.hyper.learning_rate = parse_double(kv.get("train.learning_rate"), "train.learning_rate");
  m.hyper.momentum = parse_double(kv.get("train.momentum"), "train.momentum");
  m.hyper.epochs = static_cast<int>(parse_int64(kv.get("train.epochs"), "train.epochs"));
  m.scaler = FeatureScaler::identity(inputs);
  read_values(kv.get("feature_mean"), m.scaler.mean.data(), inputs, kv.where("feature_mean"));
  read_values(kv.get("feature_scale"), m.scaler.scale.data(), inputs, kv.where("feature_scale"));
  m.params = RouterParams::zeros(inputs, hidden, classes);
  read_values(kv.get("w1"), m.params.w1.data(), m.params.w1.size(), kv.where("w1"));
  read_values(kv.get("b1"), m.params.b1.data(), m.params.b1.size(), kv.where("b1"));
  read_values(kv.get("w2"), m.params.w2.data(), m.params.w2.size(), kv.where("w2"));
  read_values(kv.get("b2"), m.params.b2.data(), m.params.b2.size(), kv.where("b2"));
  if (!m.params.all_finite()) throw ValidationError("model has non-finite parameters");
  return m;
}

void write_model_file(const std::string& path, const RouterModel& model) {
  write_file(path, serialize_model(model));
}

RouterModel read_model_file(const std::string& path) {
  try {
    return parse_model(read_file(path));
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

}  // namespace tokbudget
