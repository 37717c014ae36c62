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

// Pipeline stages behind the CLI: calibrate -> curate -> train-router ->
// eval-router, plus curve benchmarks and constrained-decoding demos. Each
// stage reads and writes artifact files; all writes happen after the
// parallel work has been gathered, in a fixed order.

#ifndef TOKBUDGET_PIPELINE_H_
#define TOKBUDGET_PIPELINE_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tokbudget/codec.h"
#include "tokbudget/config.h"
#include "tokbudget/dataset.h"
#include "tokbudget/reward.h"
#include "tokbudget/router.h"
#include "tokbudget/seqmask.h"

namespace tokbudget {

// Default artifact names inside an output directory.
inline constexpr const char* kStatsFile = "stats.v1";
inline constexpr const char* kDatasetFile = "dataset.jsonl";
inline constexpr const char* kModelFile = "router.v1";
inline constexpr const char* kHistoryFile = "history.csv";
inline constexpr const char* kMetricsFile = "metrics.json";
inline constexpr const char* kCurvesFile = "curves.csv";

std::string join_path(const std::string& dir, const std::string& name);

// Returns the path written.
std::string cmd_calibrate(const RunConfig& config, const std::string& out_dir);

// Throws MismatchError when the stats file disagrees with the config.
std::string cmd_curate(const RunConfig& config, const std::string& stats_path,
                       const std::string& out_dir);

// Trains on the train/val splits; writes the model and the per-epoch
// history. Throws MismatchError when the dataset's stats hash differs from
// the stats file.
std::string cmd_train_router(const RunConfig& config, const std::string& dataset_path,
                             const std::string& stats_path, const std::string& out_dir);

std::string metrics_json(const RouterMetrics& m, Split split);

std::string cmd_eval_router(const RunConfig& config, const std::string& model_path,
                            const std::string& dataset_path,
                            const std::string& stats_path, const std::string& out_dir,
                            Split split = Split::kTest);

struct CurveRow {
  std::string strategy;
  double parameter = 0;  // level, w_q, or tau
  RewardWeights weights;
  double mean_tokens = 0;
  double mean_mse = 0;
  double mean_psnr = 0;
  double mean_reward = 0;
  std::int64_t n_videos = 0;
  std::uint64_t seed = 0;
};

struct CurveTable {
  std::vector<CurveRow> rows;  // sorted by (strategy, parameter)
  std::vector<double> taus;
};

// The paired video set every curve strategy is measured on.
std::vector<SceneSpec> curve_scenes(const RunConfig& config);

// Geometric grid from the smallest per-video all-max MSE to the largest
// per-video all-min MSE.
std::vector<double> tau_grid(const std::vector<AssignmentTable>& tables, int points);

CurveTable compute_curves(const RunConfig& config, const NormalizationStats& stats,
                          const std::vector<RouterModel>& models);

std::string serialize_curves(const CurveTable& table);

std::string cmd_curves(const RunConfig& config, const std::string& stats_path,
                       const std::vector<std::string>& model_paths,
                       const std::string& out_dir);

struct DemoResult {
  TokenSequence sequence;
  Assignment assignment;
  std::string debug;
};

// Samples `config.demo_count` sequences from uniform-random logits under the
// decoder mask, prints each with its parse verdict, and throws
// ProtocolError if one fails to parse. `forced` fixes the per-block
// lengths; otherwise a router model (when given) picks them for a sampled
// scene, and otherwise they are sampled too.
std::vector<DemoResult> cmd_demo_decode(const RunConfig& config,
                                        const std::optional<Assignment>& forced,
                                        const std::optional<std::string>& model_path,
                                        std::ostream& out);

}  // namespace tokbudget

#endif  // TOKBUDGET_PIPELINE_H_
