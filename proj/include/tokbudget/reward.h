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

// Proxy reward: a preference-weighted trade-off between standardized
// reconstruction quality and standardized token length,
//
//   R = w_q * Qhat - w_l * Lhat,
//   Qhat = -(D - mean_D) / std_D,   Lhat = (L - mean_L) / std_L,
//
// where D is reconstruction MSE and L the total token count. Quality is the
// negated standardized distortion so that larger R is always better.

#ifndef TOKBUDGET_REWARD_H_
#define TOKBUDGET_REWARD_H_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tokbudget/core.h"
#include "tokbudget/scene.h"
#include "tokbudget/video.h"

namespace tokbudget {

struct RewardWeights {
  double quality = 1.2;
  double length = 0.8;

  // Throws ValidationError unless both are >= 0 with a positive sum.
  void validate() const;
  bool operator==(const RewardWeights&) const = default;
};

struct MomentStats {
  double mean_distortion = 0;
  double std_distortion = 1;
  double mean_length = 0;
  double std_length = 1;

  bool operator==(const MomentStats&) const = default;
};

struct NormalizationStats {
  std::vector<int> levels;
  int blocks = 0;
  MomentStats full;
  // prefix[p - 1] standardizes distortion/length over the first p blocks;
  // prefix[blocks - 1] == full.
  std::vector<MomentStats> prefix;
  std::int64_t n_videos = 0;
  std::int64_t n_assignments_per_video = 0;
  std::uint64_t seed = 0;

  const MomentStats& for_prefix(int p) const;

  // Throws MismatchError when levels or block count differ.
  void check_compatible(const CandidateLevels& levels) const;

  bool operator==(const NormalizationStats&) const = default;
};

// Monte Carlo estimates over videos sampled from `scenes` and assignments
// with an independent uniform level per block. Throws CalibrationError on a
// zero standard deviation and ValidationError on bad sizes.
NormalizationStats calibrate(const SceneDistribution& scenes,
                             const VideoShape& shape,
                             const CandidateLevels& levels,
                             std::int64_t n_videos,
                             std::int64_t n_assignments_per_video,
                             std::uint64_t seed, int workers = 1);

double proxy_reward(double distortion, int length, const MomentStats& stats,
                    const RewardWeights& w);

inline double proxy_reward(double distortion, int length,
                           const NormalizationStats& stats,
                           const RewardWeights& w) {
  return proxy_reward(distortion, length, stats.full, w);
}

// (E[eval] - E[worst]) / (E[best] - E[worst]) * 100. Throws ValidationError
// on empty or unequal lists and DegenerateError when the denominator <= 0.
double percentile(std::span<const double> eval_rewards,
                  std::span<const double> best_rewards,
                  std::span<const double> worst_rewards);

// stats.v1 text format; all reals written with 17 significant digits.
std::string serialize_stats(const NormalizationStats& stats);
NormalizationStats parse_stats(const std::string& text);
void write_stats_file(const std::string& path, const NormalizationStats& stats);
NormalizationStats read_stats_file(const std::string& path);

// Loads stats and rejects files calibrated for other levels.
NormalizationStats load_compatible_stats(const std::string& path,
                                         const CandidateLevels& levels);

}  // namespace tokbudget

#endif  // TOKBUDGET_REWARD_H_
