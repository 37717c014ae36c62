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

#include "tokbudget/pipeline.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <ostream>
#include <sstream>
#include <variant>

#include "json.hpp"
#include "tokbudget/errors.h"
#include "tokbudget/features.h"
#include "tokbudget/numeric.h"
#include "tokbudget/parallel.h"
#include "tokbudget/random.h"
#include "tokbudget/search.h"
#include "tokbudget/text.h"

namespace tokbudget {
namespace {

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir + "': " + ec.message());
}

double mean_of(const std::vector<double>& v) {
  return pairwise_mean(std::span<const double>(v));
}

struct Loaded {
  NormalizationStats stats;
  std::string hash;
};

Loaded load_stats(const RunConfig& config, const std::string& stats_path) {
  Loaded l;
  const std::string text = read_file(stats_path);
  l.stats = parse_stats(text);
  l.stats.check_compatible(config.candidate_levels());
  l.hash = fnv1a_hex(text);
  return l;
}

CuratedDataset load_dataset(const RunConfig& config, const std::string& path,
                            const Loaded& stats) {
  CuratedDataset ds = read_dataset_file(path);
  if (ds.header.stats_hash != stats.hash) {
    throw MismatchError(path + ": dataset was curated with stats " + ds.header.stats_hash +
                        ", stats file hashes to " + stats.hash);
  }
  if (!(ds.levels() == config.candidate_levels()) || !(ds.header.shape == config.shape)) {
    throw MismatchError(path + ": dataset levels or shape differ from the config");
  }
  return ds;
}

}  // namespace

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

std::string cmd_calibrate(const RunConfig& config, const std::string& out_dir) {
  config.validate();
  const NormalizationStats stats =
      calibrate(config.scenes, config.shape, config.candidate_levels(), config.calibrate_videos,
                config.calibrate_assignments, config.seed, config.workers);
  ensure_dir(out_dir);
  const std::string path = join_path(out_dir, kStatsFile);
  write_stats_file(path, stats);
  return path;
}

std::string cmd_curate(const RunConfig& config, const std::string& stats_path,
                       const std::string& out_dir) {
  config.validate();
  const Loaded stats = load_stats(config, stats_path);
  CurationRequest req;
  req.scenes = config.scenes;
  req.shape = config.shape;
  req.levels = config.levels;
  req.weights = config.weights;
  req.size = config.dataset_size;
  req.splits = config.splits;
  req.seed = config.seed;
  req.workers = config.workers;
  const CuratedDataset ds = curate(req, stats.stats, stats.hash);
  ensure_dir(out_dir);
  const std::string path = join_path(out_dir, kDatasetFile);
  write_dataset_file(path, ds);
  return path;
}

std::string cmd_train_router(const RunConfig& config, const std::string& dataset_path,
                             const std::string& stats_path, const std::string& out_dir) {
  config.validate();
  const Loaded stats = load_stats(config, stats_path);
  const CuratedDataset ds = load_dataset(config, dataset_path, stats);
  TrainHyper hyper = config.router;
  hyper.seed = config.seed;
  const TrainingResult result =
      train_router(training_data(ds), hyper, ds.levels(), ds.header.weights);
  ensure_dir(out_dir);
  const std::string path = join_path(out_dir, kModelFile);
  write_model_file(path, result.model);
  std::ostringstream history;
  history << "epoch,train_loss,val_loss,val_top1\n";
  for (const auto& e : result.history) {
    history << e.epoch << ',' << format_double(e.train_loss) << ','
            << format_double(e.val_loss) << ',' << format_double(e.val_top1) << '\n';
  }
  write_file(join_path(out_dir, kHistoryFile), history.str());
  return path;
}

std::string metrics_json(const RouterMetrics& m, Split split) {
  nlohmann::ordered_json j;
  j["format"] = "metrics.v1";
  j["split"] = std::string(to_string(split));
  j["n"] = m.n;
  j["top1"] = m.top1;
  j["top5"] = m.top5;
  j["percentile"] = m.percentile;
  j["best_uniform_percentile"] = m.best_uniform_percentile;
  j["router_mean_tokens"] = m.mean_tokens;
  j["router_mean_mse"] = m.mean_distortion;
  j["exhaustive_mean_tokens"] = m.exhaustive_mean_tokens;
  j["exhaustive_mean_mse"] = m.exhaustive_mean_distortion;
  j["best_uniform_mean_tokens"] = m.best_uniform_mean_tokens;
  j["savings_vs_max_uniform"] = m.savings_vs_max_uniform;
  j["uniform_mean_tokens"] = m.uniform_mean_tokens;
  j["uniform_mean_mse"] = m.uniform_mean_distortion;
  j["matched_uniform_level"] = m.matched_uniform_level;
  j["matched_uniform_tokens"] = m.matched_uniform_tokens;
  j["matched_uniform_found"] = m.matched_uniform_found;
  j["savings_vs_matched_uniform"] = 1.0 - m.mean_tokens / m.matched_uniform_tokens;
  return j.dump(2) + "\n";
}

std::string cmd_eval_router(const RunConfig& config, const std::string& model_path,
                            const std::string& dataset_path,
                            const std::string& stats_path, const std::string& out_dir,
                            Split split) {
  config.validate();
  const Loaded stats = load_stats(config, stats_path);
  const CuratedDataset ds = load_dataset(config, dataset_path, stats);
  const RouterModel model = read_model_file(model_path);
  if (!(CandidateLevels(model.levels, model.blocks) == ds.levels())) {
    throw MismatchError(model_path + ": model levels differ from the dataset");
  }
  const RouterMetrics m = evaluate_router(model, ds.split(split), ds.header.shape, stats.stats,
                                          model.weights, config.workers);
  ensure_dir(out_dir);
  const std::string path = join_path(out_dir, kMetricsFile);
  write_file(path, metrics_json(m, split));
  return path;
}

std::vector<SceneSpec> curve_scenes(const RunConfig& config) {
  std::vector<SceneSpec> out;
  const std::uint64_t stream = derive_seed(config.seed, "curves");
  for (std::int64_t i = 0; i < config.curve_videos; ++i) {
    out.push_back(config.scenes.sample(stream, i, config.shape));
  }
  return out;
}

std::vector<double> tau_grid(const std::vector<AssignmentTable>& tables, int points) {
  if (tables.empty() || points < 2) throw ValidationError("tau grid needs videos and >= 2 points");
  const CandidateLevels& levels = tables.front().levels();
  const auto lo_idx = index_from_assignment(uniform_assignment(levels.max(), levels.blocks()), levels);
  const auto hi_idx = index_from_assignment(uniform_assignment(levels.min(), levels.blocks()), levels);
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0;
  for (const auto& t : tables) {
    lo = std::min(lo, t.mse(lo_idx));
    hi = std::max(hi, t.mse(hi_idx));
  }
  lo = std::max(lo, std::numeric_limits<double>::min());
  if (!(hi > lo)) throw DegenerateError("tau grid range is empty");
  std::vector<double> taus(points);
  const double ratio = std::log(hi / lo) / (points - 1);
  for (int i = 0; i < points; ++i) taus[i] = lo * std::exp(ratio * i);
  taus.front() = lo;
  taus.back() = hi;
  return taus;
}

CurveTable compute_curves(const RunConfig& config, const NormalizationStats& stats,
                          const std::vector<RouterModel>& models) {
  config.validate();
  const CandidateLevels levels = config.candidate_levels();
  stats.check_compatible(levels);
  const auto scenes = curve_scenes(config);
  const auto n = static_cast<std::int64_t>(scenes.size());
  std::vector<AssignmentTable> tables;
  tables.reserve(n);
  std::vector<std::optional<AssignmentTable>> slots(n);
  std::vector<Eigen::VectorXd> features(n);
  parallel_for(n, config.workers, [&](std::int64_t i) {
    const BlockVideo video = generate_video(scenes[i], config.shape);
    slots[i].emplace(evaluate_all(video, levels));
    features[i] = extract_features(video);
  });
  for (auto& s : slots) tables.push_back(std::move(*s));

  CurveTable out;
  out.taus = tau_grid(tables, config.tau_points);

  auto add_row = [&](std::string strategy, double parameter, const RewardWeights& w,
                     const std::vector<SearchResult>& picks) {
    std::vector<double> tokens, mse, psnr, reward;
    for (const auto& r : picks) {
      tokens.push_back(r.length);
      mse.push_back(r.distortion);
      psnr.push_back(psnr_from_mse(r.distortion));
      reward.push_back(r.reward);
    }
    out.rows.push_back({std::move(strategy), parameter, w, mean_of(tokens), mean_of(mse),
                        mean_of(psnr), mean_of(reward), n, config.seed});
  };
  auto per_video = [&](auto&& pick) {
    std::vector<SearchResult> picks;
    for (std::int64_t i = 0; i < n; ++i) picks.push_back(pick(i, tables[i]));
    return picks;
  };

  for (int j = 0; j < levels.size(); ++j) {
    const auto idx = index_from_assignment(uniform_assignment(levels[j], levels.blocks()), levels);
    add_row("uniform", levels[j], config.weights, per_video([&](std::int64_t, const auto& t) {
              return score_assignment(t, idx, stats, config.weights, Strategy::kUniform);
            }));
  }
  for (const auto& w : config.curve_weights()) {
    add_row("max_reward", w.quality, w, per_video([&](std::int64_t, const auto& t) {
              return exhaustive_search(t, stats, w);
            }));
    add_row("best_uniform", w.quality, w, per_video([&](std::int64_t, const auto& t) {
              return best_uniform(t, stats, w);
            }));
  }
  for (double tau : out.taus) {
    add_row("threshold", tau, config.weights, per_video([&](std::int64_t, const auto& t) {
              return threshold_search(t, tau, stats, config.weights);
            }));
  }
  for (const auto& model : models) {
    if (!(CandidateLevels(model.levels, model.blocks) == levels)) {
      throw MismatchError("router model levels differ from the config");
    }
    add_row("router", model.weights.quality, model.weights,
            per_video([&](std::int64_t i, const auto& t) {
              return score_assignment(t, model.predict(features[i]), stats, model.weights,
                                      Strategy::kRouter);
            }));
  }
  std::stable_sort(out.rows.begin(), out.rows.end(), [](const CurveRow& a, const CurveRow& b) {
    if (a.strategy != b.strategy) return a.strategy < b.strategy;
    return a.parameter < b.parameter;
  });
  return out;
}

std::string serialize_curves(const CurveTable& table) {
  std::ostringstream out;
  out << "# schema=curves.v1\n"
      << "strategy,parameter,w_q,w_l,mean_tokens,mean_mse,mean_psnr,mean_reward,n_videos,seed\n";
  for (const auto& r : table.rows) {
    out << r.strategy << ',' << format_double(r.parameter) << ','
        << format_double(r.weights.quality) << ',' << format_double(r.weights.length) << ','
        << format_double(r.mean_tokens) << ',' << format_double(r.mean_mse) << ','
        << format_double(r.mean_psnr) << ',' << format_double(r.mean_reward) << ','
        << r.n_videos << ',' << r.seed << '\n';
  }
  return out.str();
}

std::string cmd_curves(const RunConfig& config, const std::string& stats_path,
                       const std::vector<std::string>& model_paths,
                       const std::string& out_dir) {
  config.validate();
  const Loaded stats = load_stats(config, stats_path);
  std::vector<RouterModel> models;
  for (const auto& p : model_paths) {
    if (!std::filesystem::exists(p)) throw IoError("router model '" + p + "' not found");
    models.push_back(read_model_file(p));
  }
  const CurveTable table = compute_curves(config, stats.stats, models);
  ensure_dir(out_dir);
  const std::string path = join_path(out_dir, kCurvesFile);
  write_file(path, serialize_curves(table));
  return path;
}

std::vector<DemoResult> cmd_demo_decode(const RunConfig& config,
                                        const std::optional<Assignment>& forced,
                                        const std::optional<std::string>& model_path,
                                        std::ostream& out) {
  config.validate();
  const CandidateLevels levels = config.candidate_levels();
  const Vocab vocab(config.demo_visual, levels);
  std::optional<RouterModel> model;
  if (model_path) {
    model = read_model_file(*model_path);
    if (!(CandidateLevels(model->levels, model->blocks) == levels)) {
      throw MismatchError(*model_path + ": model levels differ from the config");
    }
  }
  const std::uint64_t stream = derive_seed(config.seed, "demo");
  std::vector<DemoResult> results;
  for (int i = 0; i < config.demo_count; ++i) {
    Rng rng(derive_seed(stream, static_cast<std::uint64_t>(i)));
    std::optional<Assignment> lengths = forced;
    if (!lengths && model) {
      const SceneSpec scene = config.scenes.sample(derive_seed(stream, "scenes"), i, config.shape);
      const BlockVideo video = generate_video(scene, config.shape);
      lengths = assignment_from_index(model->predict(extract_features(video)), levels);
    }
    DemoResult r;
    r.sequence = sample_sequence(vocab, rng, lengths);
    r.debug = debug_string(r.sequence, vocab);
    const auto parsed = decode_sequence(r.sequence, vocab);
    if (const auto* err = std::get_if<DecodeError>(&parsed)) {
      throw ProtocolError("demo " + std::to_string(i) + " failed to parse: " +
                          std::string(to_string(err->kind)) + " at " +
                          std::to_string(err->position));
    }
    r.assignment = std::get<DecodedSequence>(parsed).assignment;
    out << r.debug << "\n"
        << "ok assignment=" << to_string(r.assignment) << " tokens=" << r.sequence.ids.size()
        << "\n";
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace tokbudget
