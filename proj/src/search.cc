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

#include "tokbudget/search.h"

#include <cmath>

#include "tokbudget/errors.h"

namespace tokbudget {
namespace {

struct Candidate {
  double reward;
  int length;
  AssignmentIndex index;
};

bool better(const Candidate& a, const Candidate& b) {
  if (a.reward != b.reward) return a.reward > b.reward;
  if (a.length != b.length) return a.length < b.length;
  return a.index < b.index;
}

AssignmentIndex uniform_index(const CandidateLevels& levels, int j) {
  AssignmentIndex idx = 0;
  for (int t = 0; t < levels.blocks(); ++t) idx = idx * levels.size() + j;
  return idx;
}

}  // namespace

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::kExhaustive: return "max_reward";
    case Strategy::kAutoregressive: return "autoregressive";
    case Strategy::kThreshold: return "threshold";
    case Strategy::kUniform: return "uniform";
    case Strategy::kBestUniform: return "best_uniform";
    case Strategy::kWorst: return "worst";
    case Strategy::kRouter: return "router";
  }
  return "unknown";
}

SearchResult score_assignment(const AssignmentTable& table, AssignmentIndex idx,
                              const NormalizationStats& stats,
                              const RewardWeights& w, Strategy strategy) {
  SearchResult r;
  r.assignment = assignment_from_index(idx, table.levels());
  r.index = idx;
  r.distortion = table.mse(idx);
  r.length = table.length(idx);
  r.reward = proxy_reward(r.distortion, r.length, stats, w);
  r.strategy = strategy;
  r.evaluations = 1;
  return r;
}

SearchResult exhaustive_search(const AssignmentTable& table,
                               const NormalizationStats& stats,
                               const RewardWeights& w) {
  stats.check_compatible(table.levels());
  Candidate best{-HUGE_VAL, 0, -1};
  for (AssignmentIndex i = 0; i < table.size(); ++i) {
    const Candidate c{proxy_reward(table.mse(i), table.length(i), stats, w),
                      table.length(i), i};
    if (best.index < 0 || better(c, best)) best = c;
  }
  SearchResult r = score_assignment(table, best.index, stats, w,
                                    Strategy::kExhaustive);
  r.evaluations = table.size();
  return r;
}

SearchResult exhaustive_search(const BlockVideo& x,
                               const CandidateLevels& levels,
                               const NormalizationStats& stats,
                               const RewardWeights& w) {
  return exhaustive_search(evaluate_all(x, levels), stats, w);
}

SearchResult worst_assignment(const AssignmentTable& table,
                              const NormalizationStats& stats,
                              const RewardWeights& w) {
  stats.check_compatible(table.levels());
  AssignmentIndex worst = 0;
  double worst_reward = HUGE_VAL;
  for (AssignmentIndex i = 0; i < table.size(); ++i) {
    const double r = proxy_reward(table.mse(i), table.length(i), stats, w);
    if (r < worst_reward) {
      worst_reward = r;
      worst = i;
    }
  }
  SearchResult r = score_assignment(table, worst, stats, w, Strategy::kWorst);
  r.evaluations = table.size();
  return r;
}

SearchResult autoregressive_search(const BlockVideo& x,
                                   const CandidateLevels& levels,
                                   const NormalizationStats& stats,
                                   const RewardWeights& w, int chunk) {
  const int t = levels.blocks();
  if (chunk < 1 || chunk > t) {
    throw RangeError("chunk " + std::to_string(chunk) + " outside [1, " +
                     std::to_string(t) + "]");
  }
  stats.check_compatible(levels);
  const VideoCoder coder(x);

  std::vector<int> counts;
  std::vector<double> mses;
  int prefix_length = 0;
  Frame predictor = coder.initial_predictor();
  std::int64_t evaluations = 0;

  for (int start = 0; start < t; start += chunk) {
    const int depth = std::min(chunk, t - start);
    const int p = start + depth;
    const MomentStats& moments = stats.for_prefix(p);
    Candidate best{-HUGE_VAL, 0, -1};
    std::vector<double> best_mses;
    Frame best_last;
    std::vector<double> path = mses;
    path.resize(p);
    for_each_continuation(
        coder, levels, start, depth, predictor,
        [&](AssignmentIndex local, std::span<const double> chunk_mse,
            const Frame& last) {
          ++evaluations;
          std::copy(chunk_mse.begin(), chunk_mse.end(), path.begin() + start);
          int length = prefix_length;
          AssignmentIndex rest = local;
          for (int b = depth - 1; b >= 0; --b) {
            length += levels[static_cast<int>(rest % levels.size())];
            rest /= levels.size();
          }
          const Candidate c{
              proxy_reward(combine_block_mse(path), length, moments, w), length,
              local};
          if (best.index < 0 || better(c, best)) {
            best = c;
            best_mses.assign(chunk_mse.begin(), chunk_mse.end());
            best_last = last;
          }
        });
    std::vector<int> digits(depth);
    AssignmentIndex rest = best.index;
    for (int b = depth - 1; b >= 0; --b) {
      digits[b] = static_cast<int>(rest % levels.size());
      rest /= levels.size();
    }
    for (int d : digits) counts.push_back(levels[d]);
    mses.insert(mses.end(), best_mses.begin(), best_mses.end());
    prefix_length = best.length;
    predictor = best_last;
  }

  SearchResult r;
  r.assignment = Assignment(counts);
  r.index = index_from_assignment(r.assignment, levels);
  r.distortion = combine_block_mse(mses);
  r.length = total_length(r.assignment);
  r.reward = proxy_reward(r.distortion, r.length, stats, w);
  r.strategy = Strategy::kAutoregressive;
  r.evaluations = evaluations;
  return r;
}

SearchResult threshold_search(const AssignmentTable& table, double tau,
                              const NormalizationStats& stats,
                              const RewardWeights& w) {
  if (!(tau >= 0)) throw ValidationError("threshold must be >= 0");
  const CandidateLevels& levels = table.levels();
  AssignmentIndex chosen = -1;
  for (AssignmentIndex i = 0; i < table.size(); ++i) {
    if (table.mse(i) <= tau &&
        (chosen < 0 || table.length(i) < table.length(chosen))) {
      chosen = i;
    }
  }
  if (chosen < 0) chosen = uniform_index(levels, levels.size() - 1);
  SearchResult r =
      score_assignment(table, chosen, stats, w, Strategy::kThreshold);
  r.evaluations = table.size();
  return r;
}

std::vector<UniformEntry> uniform_sweep(const AssignmentTable& table) {
  const CandidateLevels& levels = table.levels();
  std::vector<UniformEntry> out;
  for (int j = 0; j < levels.size(); ++j) {
    const AssignmentIndex idx = uniform_index(levels, j);
    UniformEntry e;
    e.level = levels[j];
    e.length = table.length(idx);
    const auto per_block = table.block_mse(idx);
    e.quality.per_block_mse.assign(per_block.begin(), per_block.end());
    e.quality.mse = table.mse(idx);
    e.quality.psnr = psnr_from_mse(e.quality.mse);
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<UniformEntry> uniform_sweep(const BlockVideo& x,
                                        const CandidateLevels& levels) {
  std::vector<UniformEntry> out;
  for (int j = 0; j < levels.size(); ++j) {
    const Assignment a = uniform_assignment(levels[j], levels.blocks());
    UniformEntry e;
    e.level = levels[j];
    e.length = total_length(a);
    e.quality = reconstruct(x, a).quality;
    out.push_back(std::move(e));
  }
  return out;
}

SearchResult best_uniform(const AssignmentTable& table,
                          const NormalizationStats& stats,
                          const RewardWeights& w) {
  stats.check_compatible(table.levels());
  const CandidateLevels& levels = table.levels();
  Candidate best{-HUGE_VAL, 0, -1};
  for (int j = 0; j < levels.size(); ++j) {
    const AssignmentIndex idx = uniform_index(levels, j);
    const Candidate c{proxy_reward(table.mse(idx), table.length(idx), stats, w),
                      table.length(idx), idx};
    if (best.index < 0 || better(c, best)) best = c;
  }
  SearchResult r =
      score_assignment(table, best.index, stats, w, Strategy::kBestUniform);
  r.evaluations = levels.size();
  return r;
}

}  // namespace tokbudget
