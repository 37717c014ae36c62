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

// Run configuration as key-value text. Every key is optional; unknown keys
// are rejected so typos fail loudly.

#ifndef TOKBUDGET_CONFIG_H_
#define TOKBUDGET_CONFIG_H_

#include <cstdint>
#include <string>
#include <vector>

#include "tokbudget/codec.h"
#include "tokbudget/core.h"
#include "tokbudget/dataset.h"
#include "tokbudget/reward.h"
#include "tokbudget/router.h"
#include "tokbudget/scene.h"
#include "tokbudget/text.h"
#include "tokbudget/video.h"

namespace tokbudget {

struct RunConfig {
  std::vector<int> levels = {2, 4, 8, 16, 32};
  VideoShape shape;
  CodecConfig codec;
  SceneDistribution scenes;

  std::int64_t calibrate_videos = 2000;
  std::int64_t calibrate_assignments = 8;

  RewardWeights weights;  // curation and router weights
  // Sweep for curves: w_q values; w_l = weight_total - w_q.
  std::vector<double> curve_wq = {0.4, 0.6, 0.8, 1.0, 1.2, 1.4, 1.6, 1.8, 2.0};
  double weight_total = 2.0;
  std::int64_t curve_videos = 200;
  int tau_points = 8;

  std::int64_t dataset_size = 20000;
  SplitFractions splits;
  TrainHyper router;

  int search_chunk = 2;
  int demo_visual = 16;
  int demo_count = 1;

  std::uint64_t seed = 0;
  int workers = 1;

  CandidateLevels candidate_levels() const { return {levels, shape.blocks}; }
  std::vector<RewardWeights> curve_weights() const;

  // Throws ValidationError on inconsistent values.
  void validate() const;
  std::string serialize() const;

  static RunConfig parse(const KeyValueText& kv);
  static RunConfig load(const std::string& path);

  bool operator==(const RunConfig& other) const;
};

}  // namespace tokbudget

#endif  // TOKBUDGET_CONFIG_H_
