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

#include "tokbudget/dataset.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "tokbudget/codec.h"
#include "tokbudget/errors.h"
#include "tokbudget/features.h"
#include "tokbudget/numeric.h"
#include "tokbudget/parallel.h"
#include "tokbudget/random.h"
#include "tokbudget/search.h"
#include "tokbudget/text.h"

namespace tokbudget {
namespace {

using nlohmann::json;

constexpr const char* kDatasetFormat = "dataset.v1";

json scene_to_json(const SceneSpec& s) {
  return {{"kind", std::string(to_string(s.kind))},
          {"amplitude", s.amplitude},
          {"period", s.period},
          {"velocity", s.velocity},
          {"texture_scale", s.texture_scale},
          {"onset", s.onset},
          {"seed", s.seed}};
}

SceneSpec scene_from_json(const json& j) {
  SceneSpec s;
  s.kind = parse_scene_kind(j.at("kind").get<std::string>());
  s.amplitude = j.at("amplitude").get<double>();
  s.period = j.at("period").get<int>();
  s.velocity = j.at("velocity").get<double>();
  s.texture_scale = j.at("texture_scale").get<double>();
  s.onset = j.at("onset").get<int>();
  s.seed = j.at("seed").get<std::uint64_t>();
  s.validate();
  return s;
}

}  // namespace

std::string_view to_string(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "unknown";
}

Split parse_split(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "val") return Split::kVal;
  if (name == "test") return Split::kTest;
  throw ValidationError("unknown split '" + std::string(name) + "'");
}

void SplitFractions::validate() const {
  if (!(train >= 0 && val >= 0 && test >= 0) ||
      std::abs(train + val + test - 1.0) > 1e-9) {
    throw ValidationError("split fractions must be >= 0 and sum to 1");
  }
}

std::vector<const CuratedRecord*> CuratedDataset::split(Split s) const {
  std::vector<const CuratedRecord*> out;
  for (const auto& r : records) {
    if (r.split == s) out.push_back(&r);
  }
  return out;
}

CuratedRecord curate_record(const SceneSpec& scene, const VideoShape& shape,
                            const CandidateLevels& levels,
                            const NormalizationStats& stats,
                            const RewardWeights& weights) {
  const BlockVideo video = generate_video(scene, shape);
  const AssignmentTable table = evaluate_all(video, levels);
  const SearchResult best = exhaustive_search(table, stats, weights);
  const SearchResult worst = worst_assignment(table, stats, weights);
  const SearchResult uniform = best_uniform(table, stats, weights);
  CuratedRecord r;
  r.scene = scene;
  r.features = extract_features(video);
  r.label = best.index;
  r.reward = best.reward;
  r.diagnostics.distortion = best.distortion;
  r.diagnostics.length = best.length;
  r.diagnostics.worst_reward = worst.reward;
  r.diagnostics.best_uniform_index = uniform.index;
  r.diagnostics.best_uniform_reward = uniform.reward;
  return r;
}

CuratedDataset curate(const CurationRequest& req,
                      const NormalizationStats& stats,
                      const std::string& stats_hash) {
  if (req.size < 1) throw ValidationError("dataset size must be >= 1");
  req.splits.validate();
  req.weights.validate();
  req.scenes.validate();
  const CandidateLevels levels(req.levels, req.shape.blocks);
  stats.check_compatible(levels);

  CuratedDataset ds;
  ds.header.levels = req.levels;
  ds.header.blocks = req.shape.blocks;
  ds.header.shape = req.shape;
  ds.header.weights = req.weights;
  ds.header.stats_hash = stats_hash;
  ds.header.seed = req.seed;
  ds.header.size = req.size;
  ds.records.resize(req.size);

  const auto n_train = static_cast<std::int64_t>(std::llround(req.size * req.splits.train));
  const auto n_val = std::min<std::int64_t>(
      req.size - n_train, std::llround(req.size * req.splits.val));
  const std::uint64_t stream = derive_seed(req.seed, "curate");
  parallel_for(req.size, req.workers, [&](std::int64_t i) {
    const SceneSpec scene = req.scenes.sample(stream, i, req.shape);
    CuratedRecord r = curate_record(scene, req.shape, levels, stats, req.weights);
    r.id = i;
    r.split = i < n_train ? Split::kTrain
              : i < n_train + n_val ? Split::kVal
                                    : Split::kTest;
    ds.records[i] = std::move(r);
  });
  return ds;
}

std::vector<std::int64_t> verify_dataset(const CuratedDataset& ds,
                                         const NormalizationStats& stats,
                                         double fraction, std::uint64_t seed,
                                         int workers) {
  const CandidateLevels levels = ds.levels();
  std::vector<std::int64_t> picked;
  Rng rng(derive_seed(seed, "verify"));
  for (const auto& r : ds.records) {
    if (rng.uniform() < fraction) picked.push_back(static_cast<std::int64_t>(&r - ds.records.data()));
  }
  if (picked.empty() && !ds.records.empty()) picked.push_back(0);
  std::vector<char> bad(picked.size(), 0);
  parallel_for(static_cast<std::int64_t>(picked.size()), workers, [&](std::int64_t k) {
    const CuratedRecord& r = ds.records[picked[k]];
    const CuratedRecord again =
        curate_record(r.scene, ds.header.shape, levels, stats, ds.header.weights);
    bad[k] = again.label != r.label || again.reward != r.reward;
  });
  std::vector<std::int64_t> out;
  for (size_t k = 0; k < picked.size(); ++k) {
    if (bad[k]) out.push_back(ds.records[picked[k]].id);
  }
  return out;
}

std::string serialize_dataset(const CuratedDataset& ds) {
  std::ostringstream out;
  const DatasetHeader& h = ds.header;
  json header = {{"format", kDatasetFormat},
                 {"levels", h.levels},
                 {"blocks", h.blocks},
                 {"shape", {h.shape.blocks, h.shape.frames, h.shape.height, h.shape.width}},
                 {"weights", {h.weights.quality, h.weights.length}},
                 {"stats_hash", h.stats_hash},
                 {"seed", h.seed},
                 {"size", h.size}};
  out << header.dump() << "\n";
  const CandidateLevels levels = ds.levels();
  for (const auto& r : ds.records) {
    std::vector<double> features(r.features.data(), r.features.data() + r.features.size());
    json rec = {
        {"id", r.id},
        {"split", std::string(to_string(r.split))},
        {"scene", scene_to_json(r.scene)},
        {"label", r.label},
        {"assignment", to_string(assignment_from_index(r.label, levels))},
        {"reward", r.reward},
        {"features", features},
        {"diagnostics",
         {{"distortion", r.diagnostics.distortion},
          {"length", r.diagnostics.length},
          {"worst_reward", r.diagnostics.worst_reward},
          {"best_uniform_index", r.diagnostics.best_uniform_index},
          {"best_uniform_reward", r.diagnostics.best_uniform_reward}}}};
    out << rec.dump() << "\n";
  }
  return out.str();
}

CuratedDataset parse_dataset(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  int number = 0;
  CuratedDataset ds;
  auto context = [&] { return source + ":" + std::to_string(number); };
  try {
    if (!std::getline(in, line)) throw ValidationError("empty dataset");
    ++number;
    const json h = json::parse(line);
    if (h.at("format").get<std::string>() != kDatasetFormat) {
      throw ValidationError("unsupported dataset format");
    }
    ds.header.levels = h.at("levels").get<std::vector<int>>();
    ds.header.blocks = h.at("blocks").get<int>();
    const auto shape = h.at("shape").get<std::vector<int>>();
    if (shape.size() != 4) throw ValidationError("shape needs four entries");
    ds.header.shape = {shape[0], shape[1], shape[2], shape[3]};
    ds.header.shape.validate();
    const auto w = h.at("weights").get<std::vector<double>>();
    if (w.size() != 2) throw ValidationError("weights needs two entries");
    ds.header.weights = {w[0], w[1]};
    ds.header.stats_hash = h.at("stats_hash").get<std::string>();
    ds.header.seed = h.at("seed").get<std::uint64_t>();
    ds.header.size = h.at("size").get<std::int64_t>();
    const CandidateLevels levels = ds.levels();
    while (std::getline(in, line)) {
      ++number;
      if (trim_view(line).empty()) continue;
      const json j = json::parse(line);
      CuratedRecord r;
      r.id = j.at("id").get<std::int64_t>();
      r.split = parse_split(j.at("split").get<std::string>());
      r.scene = scene_from_json(j.at("scene"));
      r.label = j.at("label").get<AssignmentIndex>();
      if (r.label < 0 || r.label >= levels.num_assignments()) {
        throw ValidationError("label out of range");
      }
      if (j.contains("assignment") &&
          parse_assignment(j.at("assignment").get<std::string>(), levels) !=
              assignment_from_index(r.label, levels)) {
        throw ValidationError("assignment text disagrees with label");
      }
      r.reward = j.at("reward").get<double>();
      const auto f = j.at("features").get<std::vector<double>>();
      r.features = Eigen::Map<const Eigen::VectorXd>(f.data(), static_cast<Eigen::Index>(f.size()));
      const json& d = j.at("diagnostics");
      r.diagnostics.distortion = d.at("distortion").get<double>();
      r.diagnostics.length = d.at("length").get<int>();
      r.diagnostics.worst_reward = d.at("worst_reward").get<double>();
      r.diagnostics.best_uniform_index = d.at("best_uniform_index").get<AssignmentIndex>();
      r.diagnostics.best_uniform_reward = d.at("best_uniform_reward").get<double>();
      ds.records.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw ValidationError(context() + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(context() + ": " + e.what());
  } catch (const InvalidAssignmentError& e) {
    throw ValidationError(context() + ": " + e.what());
  } catch (const RangeError& e) {
    throw ValidationError(context() + ": " + e.what());
  }
  if (static_cast<std::int64_t>(ds.records.size()) != ds.header.size) {
    throw ValidationError(source + ": header says " + std::to_string(ds.header.size) +
                          " records, found " + std::to_string(ds.records.size()));
  }
  return ds;
}

void write_dataset_file(const std::string& path, const CuratedDataset& ds) {
  write_file(path, serialize_dataset(ds));
}

CuratedDataset read_dataset_file(const std::string& path) {
  return parse_dataset(read_file(path), path);
}

TrainingData training_data(const CuratedDataset& ds) {
  TrainingData data;
  const auto train = ds.split(Split::kTrain);
  const auto val = ds.split(Split::kVal);
  const Eigen::Index dim = ds.records.empty() ? 0 : ds.records.front().features.size();
  auto fill = [dim](const std::vector<const CuratedRecord*>& rs, Eigen::MatrixXd& x,
                    std::vector<AssignmentIndex>& y) {
    x.resize(dim, static_cast<Eigen::Index>(rs.size()));
    y.resize(rs.size());
    for (size_t i = 0; i < rs.size(); ++i) {
      if (rs[i]->features.size() != dim) {
        throw ValidationError("record features have inconsistent dimension");
      }
      x.col(i) = rs[i]->features;
      y[i] = rs[i]->label;
    }
  };
  fill(train, data.train_x, data.train_y);
  fill(val, data.val_x, data.val_y);
  return data;
}

bool in_top_k(const Eigen::VectorXd& prob, AssignmentIndex label, int k) {
  // Rank of `label` = number of classes ordered strictly before it.
  const double p = prob(label);
  int ahead = 0;
  for (Eigen::Index i = 0; i < prob.size(); ++i) {
    if (prob(i) > p || (prob(i) == p && i < label)) ++ahead;
  }
  return ahead < k;
}

RouterMetrics evaluate_router(const RouterModel& model,
                              const std::vector<const CuratedRecord*>& records,
                              const VideoShape& shape,
                              const NormalizationStats& stats,
                              const RewardWeights& weights, int workers) {
  if (records.empty()) throw ValidationError("evaluation split is empty");
  const CandidateLevels levels(model.levels, model.blocks);
  stats.check_compatible(levels);
  const auto n = static_cast<std::int64_t>(records.size());
  const int m = levels.size();

  struct Row {
    bool top1 = false, top5 = false;
    double router_reward = 0, best_reward = 0, worst_reward = 0, uniform_reward = 0;
    double router_tokens = 0, router_mse = 0;
    double best_tokens = 0, best_mse = 0, uniform_tokens = 0;
    std::vector<double> level_mse;
  };
  std::vector<Row> rows(n);
  parallel_for(n, workers, [&](std::int64_t i) {
    const CuratedRecord& rec = *records[i];
    const BlockVideo video = generate_video(rec.scene, shape);
    const AssignmentTable table = evaluate_all(video, levels);
    const Eigen::VectorXd prob = model.forward(extract_features(video));
    Eigen::Index pred = 0;
    for (Eigen::Index c = 1; c < prob.size(); ++c) {
      if (prob(c) > prob(pred)) pred = c;
    }
    const SearchResult routed = score_assignment(table, pred, stats, weights, Strategy::kRouter);
    const SearchResult best = exhaustive_search(table, stats, weights);
    const SearchResult worst = worst_assignment(table, stats, weights);
    const SearchResult uniform = best_uniform(table, stats, weights);
    Row& row = rows[i];
    row.top1 = pred == rec.label;
    row.top5 = in_top_k(prob, rec.label, 5);
    row.router_reward = routed.reward;
    row.best_reward = best.reward;
    row.worst_reward = worst.reward;
    row.uniform_reward = uniform.reward;
    row.router_tokens = routed.length;
    row.router_mse = routed.distortion;
    row.best_tokens = best.length;
    row.best_mse = best.distortion;
    row.uniform_tokens = uniform.length;
    for (const auto& e : uniform_sweep(table)) row.level_mse.push_back(e.quality.mse);
  });

  auto column = [&](auto member) {
    std::vector<double> v(n);
    for (std::int64_t i = 0; i < n; ++i) v[i] = static_cast<double>(rows[i].*member);
    return v;
  };
  auto mean_of = [](const std::vector<double>& v) {
    return pairwise_mean(std::span<const double>(v));
  };

  RouterMetrics out;
  out.n = n;
  out.top1 = 100.0 * mean_of(column(&Row::top1));
  out.top5 = 100.0 * mean_of(column(&Row::top5));
  const auto best = column(&Row::best_reward);
  const auto worst = column(&Row::worst_reward);
  out.percentile = percentile(column(&Row::router_reward), best, worst);
  out.best_uniform_percentile = percentile(column(&Row::uniform_reward), best, worst);
  out.mean_tokens = mean_of(column(&Row::router_tokens));
  out.mean_distortion = mean_of(column(&Row::router_mse));
  out.exhaustive_mean_tokens = mean_of(column(&Row::best_tokens));
  out.exhaustive_mean_distortion = mean_of(column(&Row::best_mse));
  out.best_uniform_mean_tokens = mean_of(column(&Row::uniform_tokens));
  out.savings_vs_max_uniform =
      1.0 - out.mean_tokens / (static_cast<double>(levels.blocks()) * levels.max());
  for (int j = 0; j < m; ++j) {
    std::vector<double> v(n);
    for (std::int64_t i = 0; i < n; ++i) v[i] = rows[i].level_mse[j];
    out.uniform_mean_tokens.push_back(static_cast<double>(levels.blocks()) * levels[j]);
    out.uniform_mean_distortion.push_back(mean_of(v));
  }
  out.matched_uniform_level = levels.max();
  out.matched_uniform_tokens = out.uniform_mean_tokens.back();
  out.matched_uniform_found = false;
  for (int j = 0; j < m; ++j) {
    if (out.uniform_mean_distortion[j] <= out.mean_distortion * 1.05) {
      out.matched_uniform_level = levels[j];
      out.matched_uniform_tokens = out.uniform_mean_tokens[j];
      out.matched_uniform_found = true;
      break;
    }
  }
  return out;
}

}  // namespace tokbudget
