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

#include "tokbudget/reward.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tokbudget/codec.h"
#include "tokbudget/errors.h"
#include "tokbudget/numeric.h"
#include "tokbudget/parallel.h"
#include "tokbudget/random.h"
#include "tokbudget/text.h"

namespace tokbudget {
namespace {

constexpr const char* kStatsFormat = "stats.v1";

std::string moments_to_text(const MomentStats& m) {
  return format_double(m.mean_distortion) + " " +
         format_double(m.std_distortion) + " " + format_double(m.mean_length) +
         " " + format_double(m.std_length);
}

MomentStats moments_from_text(const std::string& text, const std::string& where) {
  std::istringstream in(text);
  std::string a, b, c, d, extra;
  if (!(in >> a >> b >> c >> d) || (in >> extra)) {
    throw ValidationError(where + ": expected four numbers");
  }
  MomentStats m;
  m.mean_distortion = parse_double(a, where);
  m.std_distortion = parse_double(b, where);
  m.mean_length = parse_double(c, where);
  m.std_length = parse_double(d, where);
  if (!(m.std_distortion > 0 && m.std_length > 0)) {
    throw ValidationError(where + ": standard deviations must be positive");
  }
  return m;
}

std::string join_ints(const std::vector<int>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

}  // namespace

void RewardWeights::validate() const {
  if (!(quality >= 0 && length >= 0 && quality + length > 0)) {
    throw ValidationError("reward weights must be >= 0 with a positive sum");
  }
}

const MomentStats& NormalizationStats::for_prefix(int p) const {
  if (p < 1 || p > static_cast<int>(prefix.size())) {
    throw RangeError("no prefix statistics for " + std::to_string(p) +
                     " blocks");
  }
  return prefix[p - 1];
}

void NormalizationStats::check_compatible(const CandidateLevels& lv) const {
  if (levels != lv.values() || blocks != lv.blocks()) {
    throw MismatchError("stats calibrated for levels {" + join_ints(levels) +
                        "} x " + std::to_string(blocks) +
                        " blocks; run uses {" + join_ints(lv.values()) +
                        "} x " + std::to_string(lv.blocks()));
  }
}

NormalizationStats calibrate(const SceneDistribution& scenes,
                             const VideoShape& shape,
                             const CandidateLevels& levels,
                             std::int64_t n_videos,
                             std::int64_t n_assignments_per_video,
                             std::uint64_t seed, int workers) {
  if (n_videos < 2 || n_assignments_per_video < 1) {
    throw ValidationError(
        "calibration needs >= 2 videos and >= 1 assignment per video");
  }
  if (shape.blocks != levels.blocks()) {
    throw ValidationError("video shape and levels disagree on block count");
  }
  scenes.validate();
  const int t = levels.blocks();
  const std::int64_t per = n_assignments_per_video;
  const std::int64_t n = n_videos * per;
  // Row-major (sample, prefix) tables; sample s = video * per + j.
  std::vector<double> distortion(n * t);
  std::vector<double> length(n * t);

  const std::uint64_t scene_stream = derive_seed(seed, "calibrate.scenes");
  const std::uint64_t assign_stream = derive_seed(seed, "calibrate.assignments");
  parallel_for(n_videos, workers, [&](std::int64_t v) {
    const SceneSpec spec = scenes.sample(scene_stream, v, shape);
    const VideoCoder coder(generate_video(spec, shape));
    Rng rng(derive_seed(assign_stream, v));
    for (std::int64_t j = 0; j < per; ++j) {
      const std::int64_t s = v * per + j;
      Frame predictor = coder.initial_predictor();
      double d_sum = 0;
      int l_sum = 0;
      for (int b = 0; b < t; ++b) {
        const int k = levels[static_cast<int>(rng.uniform_int(0, levels.size() - 1))];
        double mse = 0;
        predictor = coder.code_block(b, predictor, k, &mse).back();
        d_sum += mse;
        l_sum += k;
        distortion[s * t + b] = d_sum / (b + 1);
        length[s * t + b] = l_sum;
      }
    }
  });

  NormalizationStats stats;
  stats.levels = levels.values();
  stats.blocks = t;
  stats.n_videos = n_videos;
  stats.n_assignments_per_video = per;
  stats.seed = seed;
  stats.prefix.resize(t);
  std::vector<double> column(n);
  for (int p = 1; p <= t; ++p) {
    MomentStats& m = stats.prefix[p - 1];
    for (std::int64_t s = 0; s < n; ++s) column[s] = distortion[s * t + p - 1];
    const MeanStd d = mean_std(column);
    for (std::int64_t s = 0; s < n; ++s) column[s] = length[s * t + p - 1];
    const MeanStd l = mean_std(column);
    m = {d.mean, d.std, l.mean, l.std};
    if (!(d.std > 0)) {
      throw CalibrationError("distortion has zero spread over " +
                             std::to_string(p) + "-block prefixes");
    }
    if (!(l.std > 0)) {
      throw CalibrationError("length has zero spread over " +
                             std::to_string(p) + "-block prefixes");
    }
  }
  stats.full = stats.prefix.back();
  return stats;
}

double proxy_reward(double distortion, int length, const MomentStats& stats,
                    const RewardWeights& w) {
  const double quality =
      -(distortion - stats.mean_distortion) / stats.std_distortion;
  const double cost = (length - stats.mean_length) / stats.std_length;
  return w.quality * quality - w.length * cost;
}

double percentile(std::span<const double> eval_rewards,
                  std::span<const double> best_rewards,
                  std::span<const double> worst_rewards) {
  if (eval_rewards.empty() || eval_rewards.size() != best_rewards.size() ||
      eval_rewards.size() != worst_rewards.size()) {
    throw ValidationError("percentile needs equal-length nonempty lists");
  }
  const double eval = pairwise_mean(eval_rewards);
  const double best = pairwise_mean(best_rewards);
  const double worst = pairwise_mean(worst_rewards);
  const double denom = best - worst;
  if (!(denom > 0)) {
    throw DegenerateError("best and worst mean rewards coincide");
  }
  return (eval - worst) / denom * 100.0;
}

std::string serialize_stats(const NormalizationStats& stats) {
  std::ostringstream out;
  out << "format = " << kStatsFormat << "\n";
  out << "levels = " << join_ints(stats.levels) << "\n";
  out << "blocks = " << stats.blocks << "\n";
  out << "n_videos = " << stats.n_videos << "\n";
  out << "n_assignments_per_video = " << stats.n_assignments_per_video << "\n";
  out << "seed = " << stats.seed << "\n";
  out << "# mean_distortion std_distortion mean_length std_length\n";
  out << "full = " << moments_to_text(stats.full) << "\n";
  for (size_t p = 0; p < stats.prefix.size(); ++p) {
    out << "prefix." << p + 1 << " = " << moments_to_text(stats.prefix[p])
        << "\n";
  }
  return out.str();
}

NormalizationStats parse_stats(const std::string& text) {
  const KeyValueText kv = KeyValueText::parse(text, "stats");
  if (kv.get("format") != kStatsFormat) {
    throw ValidationError(kv.where("format") + ": unsupported stats format '" +
                          kv.get("format") + "'");
  }
  NormalizationStats s;
  s.levels = parse_int_list(kv.get("levels"));
  s.blocks = static_cast<int>(parse_int64(kv.get("blocks"), "blocks"));
  CandidateLevels(s.levels, s.blocks);  // validates
  s.n_videos = parse_int64(kv.get("n_videos"), "n_videos");
  s.n_assignments_per_video =
      parse_int64(kv.get("n_assignments_per_video"), "n_assignments_per_video");
  s.seed = parse_uint64(kv.get("seed"), "seed");
  s.full = moments_from_text(kv.get("full"), kv.where("full"));
  for (int p = 1; p <= s.blocks; ++p) {
    const std::string key = "prefix." + std::to_string(p);
    s.prefix.push_back(moments_from_text(kv.get(key), kv.where(key)));
  }
  return s;
}

void write_stats_file(const std::string& path, const NormalizationStats& stats) {
  write_file(path, serialize_stats(stats));
}

NormalizationStats read_stats_file(const std::string& path) {
  try {
    return parse_stats(read_file(path));
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

NormalizationStats load_compatible_stats(const std::string& path,
                                         const CandidateLevels& levels) {
  NormalizationStats stats = read_stats_file(path);
  stats.check_compatible(levels);
  return stats;
}

}  // namespace tokbudget
