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

// Curated (scene, max-reward assignment) records for router training, stored
// as line-delimited JSON: one header object, then one object per record.
// Records carry scene specs rather than pixels.

#ifndef TOKBUDGET_DATASET_H_
#define TOKBUDGET_DATASET_H_

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "tokbudget/core.h"
#include "tokbudget/reward.h"
#include "tokbudget/router.h"
#include "tokbudget/scene.h"
#include "tokbudget/video.h"

namespace tokbudget {

enum class Split { kTrain, kVal, kTest };

std::string_view to_string(Split s);
Split parse_split(std::string_view name);

struct SplitFractions {
  double train = 0.8;
  double val = 0.1;
  double test = 0.1;
  // Throws ValidationError unless all are >= 0 and they sum to 1.
  void validate() const;
};

struct RecordDiagnostics {
  double distortion = 0;  // MSE of the optimal assignment
  int length = 0;
  double worst_reward = 0;
  AssignmentIndex best_uniform_index = 0;
  double best_uniform_reward = 0;
};

struct CuratedRecord {
  std::int64_t id = 0;
  Split split = Split::kTrain;
  SceneSpec scene;
  Eigen::VectorXd features;  // raw, unstandardized
  AssignmentIndex label = 0;  // exhaustive-search optimum
  double reward = 0;
  RecordDiagnostics diagnostics;
};

struct DatasetHeader {
  std::vector<int> levels;
  int blocks = 0;
  VideoShape shape;
  RewardWeights weights;
  std::string stats_hash;
  std::uint64_t seed = 0;
  std::int64_t size = 0;
};

struct CuratedDataset {
  DatasetHeader header;
  std::vector<CuratedRecord> records;

  std::vector<const CuratedRecord*> split(Split s) const;
  CandidateLevels levels() const { return {header.levels, header.blocks}; }
};

struct CurationRequest {
  SceneDistribution scenes;
  VideoShape shape;
  std::vector<int> levels;
  RewardWeights weights;
  std::int64_t size = 0;
  SplitFractions splits;
  std::uint64_t seed = 0;
  int workers = 1;
};

// Record i uses scenes.sample(derive_seed(seed, "curate"), i). Splits are
// contiguous: train first, then val, then test.
CuratedDataset curate(const CurationRequest& request,
                      const NormalizationStats& stats,
                      const std::string& stats_hash);

// Recomputes the optimum for one record from its scene spec.
CuratedRecord curate_record(const SceneSpec& scene, const VideoShape& shape,
                            const CandidateLevels& levels,
                            const NormalizationStats& stats,
                            const RewardWeights& weights);

// Re-derives a deterministic `fraction` sample of records from their scene
// specs; returns the ids whose stored label or reward disagree.
std::vector<std::int64_t> verify_dataset(const CuratedDataset& dataset,
                                         const NormalizationStats& stats,
                                         double fraction, std::uint64_t seed,
                                         int workers = 1);

std::string serialize_dataset(const CuratedDataset& dataset);
CuratedDataset parse_dataset(const std::string& text,
                             const std::string& source = "<dataset>");
void write_dataset_file(const std::string& path, const CuratedDataset& dataset);
CuratedDataset read_dataset_file(const std::string& path);

TrainingData training_data(const CuratedDataset& dataset);

struct RouterMetrics {
  std::int64_t n = 0;
  double top1 = 0;  // percent
  double top5 = 0;  // percent
  double percentile = 0;
  double best_uniform_percentile = 0;
  double mean_tokens = 0;
  double mean_distortion = 0;
  double exhaustive_mean_tokens = 0;
  double exhaustive_mean_distortion = 0;
  double best_uniform_mean_tokens = 0;
  // 1 - router tokens / (T * max level).
  double savings_vs_max_uniform = 0;
  // Per level: mean tokens and mean MSE of the uniform assignment.
  std::vector<double> uniform_mean_tokens;
  std::vector<double> uniform_mean_distortion;
  // Cheapest uniform level whose mean MSE <= router MSE * 1.05; the maximum
  // level (with matched_uniform_found = false) when none qualifies.
  int matched_uniform_level = 0;
  double matched_uniform_tokens = 0;
  bool matched_uniform_found = false;
};

// Regenerates every record's video, scores the router's predicted class,
// and places it between the per-video best and worst rewards. Throws
// ValidationError on an empty split and DegenerateError when best and worst
// coincide.
RouterMetrics evaluate_router(const RouterModel& model,
                              const std::vector<const CuratedRecord*>& records,
                              const VideoShape& shape,
                              const NormalizationStats& stats,
                              const RewardWeights& weights, int workers = 1);

// Top-k hit of `label` among the k most probable classes (ties: smaller
// index ranks higher).
bool in_top_k(const Eigen::VectorXd& prob, AssignmentIndex label, int k);

}  // namespace tokbudget

#endif  // TOKBUDGET_DATASET_H_
