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

#include <gtest/gtest.h>

#include <cmath>

#include "oracles.h"
#include "tokbudget/errors.h"
#include "tokbudget/reward.h"
#include "tokbudget/search.h"

namespace tokbudget {
namespace {

const CandidateLevels kLevels = CandidateLevels::Default();

MomentStats toy_stats() { return {0.01, 0.004, 49.6, 21.8}; }

TEST(ProxyReward, Examples) {
  const MomentStats s = toy_stats();
  EXPECT_DOUBLE_EQ(proxy_reward(s.mean_distortion, 49, {0.01, 0.004, 49.0, 21.8}, {0.7, 1.9}), 0.0);
  EXPECT_NEAR(proxy_reward(s.mean_distortion - s.std_distortion, 50, {0.01, 0.004, 50.0, 20.0},
                           {1.0, 1.0}),
              1.0, 1e-12);
  EXPECT_NEAR(proxy_reward(s.mean_distortion, 70, {0.01, 0.004, 50.0, 20.0}, {1.2, 0.8}), -0.8,
              1e-12);
}

TEST(ProxyReward, MatchesDirectFormula) {
  const MomentStats s = toy_stats();
  for (double d : {0.0, 0.003, 0.02})
    for (int l : {8, 40, 128})
      EXPECT_NEAR(proxy_reward(d, l, s, {1.3, 0.7}), oracle::naive_reward(d, l, s, 1.3, 0.7),
                  1e-12);
}

TEST(ProxyReward, StrictlyDecreasingInDistortionAndLength) {
  const MomentStats s = toy_stats();
  const RewardWeights w{1.2, 0.8};
  for (int l = 8; l < 128; l += 8) {
    EXPECT_GT(proxy_reward(0.01, l, s, w), proxy_reward(0.01, l + 1, s, w));
    EXPECT_GT(proxy_reward(0.001 * l / 8, l, s, w), proxy_reward(0.001 * l / 8 + 1e-6, l, s, w));
  }
}

TEST(ProxyReward, ArgmaxInvariantUnderWeightScale) {
  NormalizationStats stats;
  stats.levels = kLevels.values();
  stats.blocks = 4;
  stats.full = {0.008, 0.007, 49.6, 21.82};
  stats.prefix.assign(4, stats.full);
  SceneDistribution dist;
  for (std::uint64_t i = 0; i < 5; ++i) {
    const auto table = evaluate_all(generate_video(dist.sample(5, i, {}), {}), kLevels);
    for (double c : {0.25, 3.0, 17.0}) {
      EXPECT_EQ(exhaustive_search(table, stats, {1.2, 0.8}).index,
                exhaustive_search(table, stats, {1.2 * c, 0.8 * c}).index);
    }
  }
}

TEST(RewardWeights, Validation) {
  EXPECT_NO_THROW((RewardWeights{0, 1}.validate()));
  EXPECT_THROW((RewardWeights{-0.1, 1}.validate()), ValidationError);
  EXPECT_THROW((RewardWeights{0, 0}.validate()), ValidationError);
}

TEST(Percentile, Examples) {
  const std::vector<double> best{3, 5, 1}, worst{-1, 0, -3};
  EXPECT_DOUBLE_EQ(percentile(best, best, worst), 100.0);
  EXPECT_DOUBLE_EQ(percentile(worst, best, worst), 0.0);
  std::vector<double> mid;
  for (size_t i = 0; i < best.size(); ++i) mid.push_back(0.5 * (best[i] + worst[i]));
  EXPECT_NEAR(percentile(mid, best, worst), 50.0, 1e-12);
  EXPECT_THROW(percentile(best, best, best), DegenerateError);
  EXPECT_THROW(percentile(std::vector<double>{1}, best, worst), ValidationError);
  EXPECT_THROW(percentile(std::vector<double>{}, std::vector<double>{}, std::vector<double>{}),
               ValidationError);
}

class CalibrationTest : public ::testing::Test {
 protected:
  static const NormalizationStats& stats() {
    static const NormalizationStats s =
        calibrate(SceneDistribution{}, VideoShape{}, kLevels, 2000, 8, 123, 0);
    return s;
  }
};

TEST_F(CalibrationTest, LengthMomentsMatchClosedForm) {
  // 16,000 uniform-random assignments.
  const double mean_l = 4 * (2 + 4 + 8 + 16 + 32) / 5.0;
  const double std_l = std::sqrt(4 * ((4 + 16 + 64 + 256 + 1024) / 5.0 - 12.4 * 12.4));
  EXPECT_DOUBLE_EQ(mean_l, 49.6);
  EXPECT_NEAR(std_l, 21.82, 0.01);
  EXPECT_NEAR(stats().full.mean_length, mean_l, 0.01 * mean_l);
  EXPECT_NEAR(stats().full.std_length, std_l, 0.01 * std_l);
  for (int p = 1; p <= 4; ++p) {
    EXPECT_NEAR(stats().for_prefix(p).mean_length, p * 12.4, 0.02 * p * 12.4);
  }
}

TEST_F(CalibrationTest, PrefixAndFullAgree) {
  EXPECT_EQ(stats().prefix.size(), 4u);
  EXPECT_EQ(stats().for_prefix(4), stats().full);
  EXPECT_GT(stats().full.std_distortion, 0.0);
  EXPECT_THROW(stats().for_prefix(0), RangeError);
}

TEST_F(CalibrationTest, Deterministic) {
  const auto a = calibrate(SceneDistribution{}, VideoShape{}, kLevels, 50, 4, 9, 1);
  const auto b = calibrate(SceneDistribution{}, VideoShape{}, kLevels, 50, 4, 9, 3);
  EXPECT_EQ(a, b);
  EXPECT_EQ(serialize_stats(a), serialize_stats(b));
  EXPECT_NE(serialize_stats(a),
            serialize_stats(calibrate(SceneDistribution{}, VideoShape{}, kLevels, 50, 4, 10, 1)));
}

TEST_F(CalibrationTest, SerializationRoundtrip) {
  const std::string text = serialize_stats(stats());
  EXPECT_EQ(text.rfind("format = stats.v1", 0), 0u);
  const NormalizationStats back = parse_stats(text);
  EXPECT_EQ(back, stats());
  EXPECT_EQ(serialize_stats(back), text);
}

TEST_F(CalibrationTest, CompatibilityChecks) {
  EXPECT_NO_THROW(stats().check_compatible(kLevels));
  EXPECT_THROW(stats().check_compatible(CandidateLevels({2, 4, 8, 16, 64}, 4)), MismatchError);
  EXPECT_THROW(stats().check_compatible(CandidateLevels({2, 4, 8, 16, 32}, 3)), MismatchError);
}

TEST(Calibration, DegenerateDistributionFails) {
  SceneDistribution statics;
  statics.kinds = {SceneKind::kStatic};
  statics.amplitude_min = statics.amplitude_max = 0.0;
  EXPECT_THROW(calibrate(statics, VideoShape{}, kLevels, 10, 4, 1), CalibrationError);
  EXPECT_THROW(calibrate(SceneDistribution{}, VideoShape{}, kLevels, 1, 4, 1), ValidationError);
  EXPECT_THROW(calibrate(SceneDistribution{}, VideoShape{}, kLevels, 10, 0, 1), ValidationError);
}

TEST(StatsText, RejectsMalformed) {
  EXPECT_THROW(parse_stats("format = stats.v2\n"), ValidationError);
  EXPECT_THROW(parse_stats("format = stats.v1\nlevels = 2,4\n"), ValidationError);
}

}  // namespace
}  // namespace tokbudget
