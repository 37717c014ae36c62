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

// End-to-end acceptance run. Prints one PASS/FAIL line per criterion (with
// the measured numbers) and exits nonzero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "oracles.h"
#include "tokbudget/codec.h"
#include "tokbudget/config.h"
#include "tokbudget/errors.h"
#include "tokbudget/numeric.h"
#include "tokbudget/pipeline.h"
#include "tokbudget/random.h"
#include "tokbudget/router.h"
#include "tokbudget/search.h"
#include "tokbudget/seqmask.h"
#include "tokbudget/text.h"

namespace {

using namespace tokbudget;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

constexpr std::uint64_t kSeed = 20261014;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double mean(const std::vector<double>& v) { return pairwise_mean(std::span<const double>(v)); }

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("tokbudget_acceptance_" + name);
  fs::remove_all(p);
  return p;
}

// Shared fixture: default stats and the 200-video paired curve set.
struct CurveSet {
  RunConfig config;
  NormalizationStats stats;
  std::vector<AssignmentTable> tables;
};

const CurveSet& curve_set() {
  static const CurveSet set = [] {
    CurveSet s;
    s.config.seed = kSeed;
    s.config.router.seed = kSeed;
    s.config.curve_videos = 200;
    s.stats = calibrate(s.config.scenes, s.config.shape, s.config.candidate_levels(),
                        s.config.calibrate_videos, s.config.calibrate_assignments, kSeed, 1);
    for (const auto& scene : curve_scenes(s.config)) {
      s.tables.push_back(
          evaluate_all(generate_video(scene, s.config.shape), s.config.candidate_levels()));
    }
    return s;
  }();
  return set;
}

template <typename Pick>
std::vector<SearchResult> per_video(const std::vector<AssignmentTable>& tables, Pick&& pick) {
  std::vector<SearchResult> out;
  out.reserve(tables.size());
  for (const auto& t : tables) out.push_back(pick(t));
  return out;
}

double mean_reward(const std::vector<SearchResult>& rs) {
  std::vector<double> v;
  for (const auto& r : rs) v.push_back(r.reward);
  return mean(v);
}

double mean_tokens(const std::vector<SearchResult>& rs) {
  std::vector<double> v;
  for (const auto& r : rs) v.push_back(r.length);
  return mean(v);
}

double mean_mse(const std::vector<SearchResult>& rs) {
  std::vector<double> v;
  for (const auto& r : rs) v.push_back(r.distortion);
  return mean(v);
}

// Piecewise-linear interpolation over points sorted by x; flat beyond the
// last point.
double interpolate(std::vector<std::pair<double, double>> pts, double x) {
  std::sort(pts.begin(), pts.end());
  if (x <= pts.front().first) return pts.front().second;
  for (size_t i = 1; i < pts.size(); ++i) {
    if (x <= pts[i].first) {
      const auto [x0, y0] = pts[i - 1];
      const auto [x1, y1] = pts[i];
      if (x1 == x0) return std::min(y0, y1);
      return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
    }
  }
  return pts.back().second;
}

Outcome curve_dominance() {
  const auto t0 = Clock::now();
  const CurveSet& s = curve_set();
  const CandidateLevels levels = s.config.candidate_levels();
  const auto taus = tau_grid(s.tables, s.config.tau_points);
  bool rewards_ok = true;
  int comparisons = 0;
  std::vector<std::pair<double, double>> frontier;
  for (const auto& w : s.config.curve_weights()) {
    const auto ex = per_video(s.tables, [&](const auto& t) { return exhaustive_search(t, s.stats, w); });
    const double best = mean_reward(ex);
    frontier.emplace_back(mean_tokens(ex), mean_mse(ex));
    for (int j = 0; j < levels.size(); ++j) {
      const auto idx = index_from_assignment(uniform_assignment(levels[j], levels.blocks()), levels);
      const auto u = per_video(s.tables, [&](const auto& t) {
        return score_assignment(t, idx, s.stats, w, Strategy::kUniform);
      });
      rewards_ok &= best >= mean_reward(u);
      ++comparisons;
    }
    for (double tau : taus) {
      const auto th = per_video(s.tables, [&](const auto& t) { return threshold_search(t, tau, s.stats, w); });
      rewards_ok &= best >= mean_reward(th);
      ++comparisons;
    }
  }
  // Pure length preference picks the all-minimum assignment on every video.
  const RewardWeights length_only{0.0, s.config.weight_total};
  const auto floor = per_video(s.tables, [&](const auto& t) { return exhaustive_search(t, s.stats, length_only); });
  frontier.emplace_back(mean_tokens(floor), mean_mse(floor));

  bool mse_ok = true;
  std::string gaps;
  for (const auto& e : [&] {
         std::vector<std::pair<double, double>> u;
         for (int j = 0; j < levels.size(); ++j) {
           const auto idx = index_from_assignment(uniform_assignment(levels[j], levels.blocks()), levels);
           u.emplace_back(levels.blocks() * levels[j],
                          mean_mse(per_video(s.tables, [&](const auto& t) {
                            return score_assignment(t, idx, s.stats, {}, Strategy::kUniform);
                          })));
         }
         return u;
       }()) {
    const double interp = interpolate(frontier, e.first);
    mse_ok &= interp <= e.second;
    gaps += " " + fmt("%.0f:", e.first) + fmt("%.5f", interp) + "/" + fmt("%.5f", e.second);
  }
  const double secs = seconds_since(t0);
  return {rewards_ok && mse_ok && secs < 300,
          std::to_string(comparisons) + " reward comparisons " + (rewards_ok ? "hold" : "VIOLATED") +
              "; interpolated/uniform mse at uniform budgets" + gaps + fmt("; %.1fs", secs)};
}

Outcome threshold_between() {
  const CurveSet& s = curve_set();
  const CandidateLevels levels = s.config.candidate_levels();
  const RewardWeights w = s.config.weights;
  const auto taus = tau_grid(s.tables, s.config.tau_points);
  double best_uniform_level = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < levels.size(); ++j) {
    const auto idx = index_from_assignment(uniform_assignment(levels[j], levels.blocks()), levels);
    best_uniform_level = std::max(best_uniform_level, mean_reward(per_video(s.tables, [&](const auto& t) {
                                    return score_assignment(t, idx, s.stats, w, Strategy::kUniform);
                                  })));
  }
  const double ex = mean_reward(per_video(s.tables, [&](const auto& t) { return exhaustive_search(t, s.stats, w); }));
  int above = 0;
  bool below_ok = true;
  std::string rewards;
  for (double tau : taus) {
    const double r = mean_reward(per_video(s.tables, [&](const auto& t) { return threshold_search(t, tau, s.stats, w); }));
    above += r >= best_uniform_level - 1e-9;
    below_ok &= r <= ex;
    rewards += fmt(" %.3f", r);
  }
  const bool half = 2 * above >= static_cast<int>(taus.size());
  return {below_ok,
          "threshold <= exhaustive at every tau " + std::string(below_ok ? "holds" : "VIOLATED") +
              "; threshold >= best uniform level at " + std::to_string(above) + "/" +
              std::to_string(taus.size()) + " taus (half-grid " + (half ? "met" : "not met") +
              ", reported); rewards" + rewards + fmt("; best uniform level %.3f", best_uniform_level) +
              fmt("; exhaustive %.3f", ex)};
}

struct RouterRun {
  nlohmann::json metrics;
  double seconds = 0;
  std::string error;
};

const RouterRun& router_run() {
  static const RouterRun run = [] {
    RouterRun r;
    const auto t0 = Clock::now();
    try {
      RunConfig config;
      config.seed = kSeed;
      config.router.seed = kSeed;
      const fs::path dir = scratch("router");
      const std::string out = dir.string();
      const std::string stats = cmd_calibrate(config, out);
      const std::string data = cmd_curate(config, stats, out);
      const std::string model = cmd_train_router(config, data, stats, out);
      r.metrics = nlohmann::json::parse(read_file(cmd_eval_router(config, model, data, stats, out)));
      fs::remove_all(dir);
    } catch (const std::exception& e) {
      r.error = e.what();
    }
    r.seconds = seconds_since(t0);
    return r;
  }();
  return run;
}

Outcome router_percentile() {
  const RouterRun& r = router_run();
  if (!r.error.empty()) return {false, "pipeline failed: " + r.error};
  const double p = r.metrics["percentile"].get<double>();
  const double bu = r.metrics["best_uniform_percentile"].get<double>();
  const bool ok = p > bu && p >= 90.0 && r.seconds < 600;
  return {ok, fmt("router percentile %.2f", p) + fmt(" vs best-uniform %.2f", bu) +
                  fmt(" on %.0f held-out videos", r.metrics["n"].get<double>()) +
                  fmt("; top1 %.2f%%", r.metrics["top1"].get<double>()) +
                  fmt(" top5 %.2f%%", r.metrics["top5"].get<double>()) + fmt("; %.1fs", r.seconds)};
}

Outcome token_savings() {
  const RouterRun& r = router_run();
  if (!r.error.empty()) return {false, "pipeline failed: " + r.error};
  const double tokens = r.metrics["router_mean_tokens"].get<double>();
  const double matched = r.metrics["matched_uniform_tokens"].get<double>();
  const bool found = r.metrics["matched_uniform_found"].get<bool>();
  return {tokens < 0.95 * matched,
          fmt("router %.2f tokens", tokens) +
              fmt(" vs %.0f for the cheapest uniform level matching its mse", matched) +
              (found ? "" : " (none matched; maximum level used)") +
              fmt("; savings %.1f%%", 100.0 * (1.0 - tokens / matched)) +
              fmt("; savings vs max uniform %.1f%%",
                  100.0 * r.metrics["savings_vs_max_uniform"].get<double>())};
}

Outcome oracle_equivalence() {
  const CurveSet& s = curve_set();
  const CandidateLevels levels = s.config.candidate_levels();
  const std::vector<RewardWeights> weights = {{1.2, 0.8}, {0.6, 1.4}, {1.8, 0.2}};
  const std::uint64_t stream = derive_seed(kSeed, "acceptance.oracle");
  int agree = 0, total = 0;
  for (int v = 0; v < 20; ++v) {
    const BlockVideo x = generate_video(s.config.scenes.sample(stream, v, s.config.shape), s.config.shape);
    std::map<std::vector<int>, double> mse;
    for (AssignmentIndex i = 0; i < levels.num_assignments(); ++i) {
      const Assignment a = assignment_from_index(i, levels);
      mse[a.counts()] = reconstruct(x, a).quality.mse;
    }
    const AssignmentTable table = evaluate_all(x, levels);
    for (const auto& w : weights) {
      const auto naive = oracle::naive_argmax(
          levels.values(), levels.blocks(), [&](const std::vector<int>& a) { return mse.at(a); },
          s.stats.full, w.quality, w.length);
      agree += exhaustive_search(table, s.stats, w).assignment.counts() == naive;
      ++total;
    }
  }
  return {agree == total, std::to_string(agree) + "/" + std::to_string(total) + " argmax agreements"};
}

Outcome autoregressive() {
  const CurveSet& s = curve_set();
  const CandidateLevels levels = s.config.candidate_levels();
  const RewardWeights w = s.config.weights;
  const auto scenes = curve_scenes(s.config);
  int exact = 0;
  std::vector<double> ar, best, worst, bu;
  for (size_t v = 0; v < scenes.size(); ++v) {
    const BlockVideo x = generate_video(scenes[v], s.config.shape);
    const AssignmentTable& t = s.tables[v];
    const SearchResult ex = exhaustive_search(t, s.stats, w);
    if (v < 20) exact += autoregressive_search(x, levels, s.stats, w, levels.blocks()).index == ex.index;
    ar.push_back(autoregressive_search(x, levels, s.stats, w, 2).reward);
    best.push_back(ex.reward);
    worst.push_back(worst_assignment(t, s.stats, w).reward);
    bu.push_back(best_uniform(t, s.stats, w).reward);
  }
  const double p2 = percentile(ar, best, worst);
  const double pbu = percentile(bu, best, worst);
  return {exact == 20 && p2 >= pbu,
          "chunk=T exact on " + std::to_string(exact) + "/20; " + fmt("chunk=2 percentile %.2f", p2) +
              (p2 >= 95.0 ? " (>= 95 target met)" : " (below 95 target)") +
              fmt(" vs best-uniform %.2f", pbu) + " on 200 videos"};
}

Outcome gradients() {
  double worst = 0;
  for (std::uint64_t k = 0; k < 10; ++k) {
    const std::uint64_t seed = derive_seed(kSeed, k);
    Rng rng(seed);
    const auto p = RouterParams::random(21, 64, 625, derive_seed(seed, "params"));
    Eigen::MatrixXd x(21, 8);
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = rng.uniform(-2, 2);
    std::vector<AssignmentIndex> y(8);
    for (auto& v : y) v = rng.uniform_int(0, 624);
    worst = std::max(worst, grad_check(p, x, y, derive_seed(seed, "check")).max_relative_error);
  }
  return {worst < 1e-4, fmt("max relative error %.3e over 10 model/batch pairs", worst)};
}

Outcome monotonicity() {
  const CurveSet& s = curve_set();
  const CandidateLevels levels = s.config.candidate_levels();
  const VideoShape shape = s.config.shape;
  Rng rng(derive_seed(kSeed, "acceptance.monotone"));
  int pairs = 0, violations = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const BlockVideo x = generate_video(
        s.config.scenes.sample(derive_seed(kSeed, "acceptance.blocks"), trial, shape), shape);
    const int block = static_cast<int>(rng.uniform_int(0, shape.blocks - 1));
    // Prediction from a random earlier coding of the same video.
    const Assignment a = assignment_from_index(rng.uniform_int(0, levels.num_assignments() - 1), levels);
    const Reconstruction r = reconstruct(x, a);
    const Frame pred = block == 0 ? Frame::Constant(shape.height, shape.width, 0.5)
                                  : Frame(r.video.frame(block - 1, shape.frames - 1).cast<double>());
    std::vector<Frame> resid(shape.frames);
    for (int f = 0; f < shape.frames; ++f) resid[f] = x.frame(block, f).cast<double>() - pred;
    std::vector<double> err;
    for (int k : levels.values()) {
      const auto approx = approximate_residual(resid, k);
      double e = 0;
      for (int f = 0; f < shape.frames; ++f) e += (resid[f] - approx[f]).squaredNorm();
      err.push_back(e / shape.block_pixels());
    }
    for (size_t j = 1; j < err.size(); ++j) {
      ++pairs;
      violations += err[j] > err[j - 1];
    }
  }
  return {violations == 0, std::to_string(pairs) + " adjacent level pairs, " +
                               std::to_string(violations) + " violations"};
}

Outcome sequences() {
  const CandidateLevels levels = CandidateLevels::Default();
  const Vocab vocab(16, levels);
  Rng rng(derive_seed(kSeed, "acceptance.seq"));
  int parsed = 0;
  for (int i = 0; i < 10000; ++i) {
    const TokenSequence s = sample_sequence(vocab, rng);
    parsed += std::holds_alternative<DecodedSequence>(decode_sequence(s, vocab));
  }
  int roundtrips = 0;
  for (int i = 0; i < 1000; ++i) {
    const Assignment a = assignment_from_index(rng.uniform_int(0, 624), levels);
    BlockTokens toks(a.blocks());
    for (int b = 0; b < a.blocks(); ++b)
      for (int k = 0; k < a[b]; ++k) toks[b].push_back(static_cast<TokenId>(rng.uniform_int(0, 15)));
    const auto r = decode_sequence(encode_sequence(a, toks, vocab), vocab);
    roundtrips += std::holds_alternative<DecodedSequence>(r) &&
                  std::get<DecodedSequence>(r) == DecodedSequence{a, toks};
  }
  auto causal = [](const BoolMatrix& m, const std::vector<int>& rows, const std::vector<int>& cols) {
    if (m.rows() != static_cast<Eigen::Index>(rows.size()) ||
        m.cols() != static_cast<Eigen::Index>(cols.size()))
      return false;
    for (size_t i = 0; i < rows.size(); ++i)
      for (size_t j = 0; j < cols.size(); ++j)
        if (m(i, j) != (cols[j] <= rows[i])) return false;
    return true;
  };
  int masks_ok = 0;
  std::vector<std::pair<Assignment, int>> cases = {{Assignment{16, 8, 2, 2}, 16}};
  for (int i = 0; i < 100; ++i) {
    cases.emplace_back(assignment_from_index(rng.uniform_int(0, 624), levels),
                       static_cast<int>(rng.uniform_int(1, 16)));
  }
  for (const auto& [a, p] : cases) {
    const MaskSet m = build_masks(a, p);
    const auto q = query_blocks(a);
    const auto r = reference_blocks(a.blocks(), p);
    masks_ok += causal(m.encoder_self, q, q) && causal(m.encoder_cross, q, r) &&
                causal(m.decoder_self, r, r) && causal(m.decoder_cross, r, q);
  }
  // Direct enumeration of the fixture's allowed entries.
  const Assignment fixture{16, 8, 2, 2};
  const auto fq = query_blocks(fixture);
  int enumerated = 0;
  for (int bi : fq)
    for (int bj : fq) enumerated += bj <= bi;
  const auto fixture_count = build_masks(fixture, 16).encoder_self.count();
  const bool ok = parsed == 10000 && roundtrips == 1000 && masks_ok == static_cast<int>(cases.size()) &&
                  enumerated == 556 && fixture_count == 556;
  return {ok, std::to_string(parsed) + "/10000 masked decodes parse; " + std::to_string(roundtrips) +
                  "/1000 roundtrips; " + std::to_string(masks_ok) + "/" + std::to_string(cases.size()) +
                  " mask sets causal; fixture (16,8,2,2) P=16 allows " + std::to_string(fixture_count) +
                  " self-attention entries (enumerated " + std::to_string(enumerated) + ")"};
}

std::map<std::string, std::string> pipeline_artifacts(const fs::path& dir, int workers) {
  RunConfig config;
  config.seed = kSeed;
  config.router.seed = kSeed;
  config.calibrate_videos = 300;
  config.dataset_size = 1500;
  config.router.epochs = 15;
  config.curve_videos = 60;
  config.workers = workers;
  const std::string out = dir.string();
  const std::string stats = cmd_calibrate(config, out);
  const std::string data = cmd_curate(config, stats, out);
  const std::string model = cmd_train_router(config, data, stats, out);
  const std::string metrics = cmd_eval_router(config, model, data, stats, out);
  const std::string curves = cmd_curves(config, stats, {model}, out);
  std::map<std::string, std::string> files;
  for (const auto& p : {stats, data, model, join_path(out, kHistoryFile), metrics, curves}) {
    files[fs::path(p).filename().string()] = read_file(p);
  }
  return files;
}

Outcome determinism() {
  const fs::path a = scratch("det_a"), b = scratch("det_b"), c = scratch("det_c");
  const auto fa = pipeline_artifacts(a, 1);
  const auto fb = pipeline_artifacts(b, 1);
  const auto fc = pipeline_artifacts(c, 3);
  int same = 0;
  std::string diffs;
  for (const auto& [name, bytes] : fa) {
    const bool eq = fb.at(name) == bytes && fc.at(name) == bytes;
    same += eq;
    if (!eq) diffs += " " + name;
  }
  for (const auto& p : {a, b, c}) fs::remove_all(p);
  return {same == static_cast<int>(fa.size()),
          std::to_string(same) + "/" + std::to_string(fa.size()) +
              " artifacts byte-identical across 3 reruns (1, 1, 3 workers)" +
              (diffs.empty() ? "" : "; differing:" + diffs)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"AC1 curve dominance", curve_dominance},
      {"AC2 threshold between", threshold_between},
      {"AC3 router vs best-uniform percentile", router_percentile},
      {"AC4 token savings", token_savings},
      {"AC5 exhaustive oracle equivalence", oracle_equivalence},
      {"AC6 autoregressive search", autoregressive},
      {"AC7 gradient correctness", gradients},
      {"AC8 per-block codec monotonicity", monotonicity},
      {"AC9 sequence machinery", sequences},
      {"AC10 determinism", determinism},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail
              << fmt(" [%.1fs]", seconds_since(t0)) << std::endl;
  }
  std::cout << (failures == 0 ? "all acceptance criteria passed"
                              : std::to_string(failures) + " acceptance criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
