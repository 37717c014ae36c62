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

// Assignment-selection strategies over one video.
//
// Reward maximizers break ties by smaller total length, then smaller class
// index. That order is total, so results do not depend on evaluation order.

#ifndef TOKBUDGET_SEARCH_H_
#define TOKBUDGET_SEARCH_H_

#include <cstdint>
#include <string_view>
#include <vector>

#include "tokbudget/codec.h"
#include "tokbudget/core.h"
#include "tokbudget/reward.h"

namespace tokbudget {

enum class Strategy {
  kExhaustive,
  kAutoregressive,
  kThreshold,
  kUniform,
  kBestUniform,
  kWorst,
  kRouter,
};

std::string_view to_string(Strategy s);

struct SearchResult {
  Assignment assignment;
  AssignmentIndex index = 0;
  double reward = 0;
  double distortion = 0;
  int length = 0;
  Strategy strategy = Strategy::kExhaustive;
  std::int64_t evaluations = 0;  // oracle scorings performed
};

// Scores a given assignment from a precomputed table.
SearchResult score_assignment(const AssignmentTable& table, AssignmentIndex idx,
                              const NormalizationStats& stats,
                              const RewardWeights& w, Strategy strategy);

// argmax over all m^T assignments.
SearchResult exhaustive_search(const AssignmentTable& table,
                               const NormalizationStats& stats,
                               const RewardWeights& w);
SearchResult exhaustive_search(const BlockVideo& x,
                               const CandidateLevels& levels,
                               const NormalizationStats& stats,
                               const RewardWeights& w);

// argmin over all m^T assignments (ties: smaller index); the lower anchor of
// the reward percentile.
SearchResult worst_assignment(const AssignmentTable& table,
                              const NormalizationStats& stats,
                              const RewardWeights& w);

// Greedy chunked search: blocks are decided `chunk` at a time (the last
// chunk may be shorter); each chunk tries all level combinations after the
// already fixed prefix and keeps the best prefix reward, standardized with
// the prefix statistics for the chunk's end. The final assignment is
// re-scored with the full-video reward. Throws RangeError unless
// 1 <= chunk <= T.
SearchResult autoregressive_search(const BlockVideo& x,
                                   const CandidateLevels& levels,
                                   const NormalizationStats& stats,
                                   const RewardWeights& w, int chunk);

// Minimum-length assignment with mse <= tau (ties: smaller index); falls back
// to the all-maximum assignment. The reward uses (stats, w). Throws
// ValidationError when tau is negative or NaN.
SearchResult threshold_search(const AssignmentTable& table, double tau,
                              const NormalizationStats& stats,
                              const RewardWeights& w);

struct UniformEntry {
  int level = 0;
  QualityRecord quality;
  int length = 0;
};

// One entry per level, ascending.
std::vector<UniformEntry> uniform_sweep(const AssignmentTable& table);
std::vector<UniformEntry> uniform_sweep(const BlockVideo& x,
                                        const CandidateLevels& levels);

// argmax restricted to the m uniform assignments (ties: smaller length).
SearchResult best_uniform(const AssignmentTable& table,
                          const NormalizationStats& stats,
                          const RewardWeights& w);

}  // namespace tokbudget

#endif  // TOKBUDGET_SEARCH_H_
