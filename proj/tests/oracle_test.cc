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
#include <sstream>

#include "oracles.h"
#include "tokbudget/codec.h"
#include "tokbudget/dct.h"
#include "tokbudget/errors.h"
#include "tokbudget/random.h"
#include "tokbudget/scene.h"

namespace tokbudget {
namespace {

const CandidateLevels kLevels = CandidateLevels::Default();
const VideoShape kShape;

SceneSpec spec(SceneKind kind, std::uint64_t seed) {
  SceneSpec s;
  s.kind = kind;
  s.seed = seed;
  return s;
}

BlockVideo random_video(std::uint64_t i) {
  return generate_video(SceneDistribution{}.sample(derive_seed(99, "oracle"), i, kShape), kShape);
}

BlockVideo constant_video(float v) { return BlockVideo(kShape, v); }

TEST(Dct, MatchesDirectFormulaAndIsOrthonormal) {
  const auto c = dct_matrix<double>(16);
  for (int u = 0; u < 16; ++u)
    for (int x = 0; x < 16; ++x) EXPECT_NEAR(c(u, x), oracle::dct_basis(u, x, 16), 1e-15);
  EXPECT_TRUE((c * c.transpose()).isIdentity(1e-13));

  Rng rng(5);
  Frame img(16, 16);
  std::vector<double> flat(256);
  for (int p = 0; p < 256; ++p) flat[p] = img(p / 16, p % 16) = rng.uniform();
  const Dct2d<double> dct(16, 16);
  const Frame y = dct.forward(img);
  const auto ref = oracle::dct2(flat, 16, 16);
  for (int p = 0; p < 256; ++p) EXPECT_NEAR(y(p / 16, p % 16), ref[p], 1e-13);
  EXPECT_TRUE(dct.inverse(y).isApprox(img, 1e-13));
}

TEST(Dct, NonSquareRoundtrip) {
  const Dct2d<double> dct(5, 7);
  Frame img = Frame::Random(5, 7);
  EXPECT_TRUE(dct.inverse(dct.forward(img)).isApprox(img, 1e-13));
}

TEST(RankCoefficients, MagnitudeOrderWithIndexTies) {
  const std::vector<double> c{0.5, -2.0, 2.0, 0.1, -0.5};
  EXPECT_EQ(rank_coefficients(c, 5), (std::vector<int>{1, 2, 0, 4, 3}));
  EXPECT_EQ(rank_coefficients(c, 2), (std::vector<int>{1, 2}));
}

TEST(Measure, Examples) {
  const BlockVideo zero = constant_video(0.0f);
  const QualityRecord same = measure(zero, zero);
  EXPECT_EQ(same.mse, 0.0);
  EXPECT_TRUE(std::isinf(same.psnr));

  BlockVideo tenth(kShape);
  const double v = 0.1;
  for (int g = 0; g < kShape.total_frames(); ++g) tenth.frame(g).setConstant(static_cast<float>(v));
  const QualityRecord q = measure(zero, tenth);
  const double expected = static_cast<double>(static_cast<float>(v)) * static_cast<float>(v);
  EXPECT_NEAR(q.mse, 0.01, 1e-8);
  EXPECT_NEAR(q.mse, expected, expected * 1e-14);
  EXPECT_NEAR(q.psnr, 20.0, 1e-5);
  EXPECT_EQ(q.per_block_mse.size(), 4u);

  VideoShape other = kShape;
  other.frames = 2;
  EXPECT_THROW(measure(zero, BlockVideo(other)), ValidationError);
}

TEST(Scene, StaticPeriodicTurbulentExamples) {
  const BlockVideo st = generate_video(spec(SceneKind::kStatic, 7), kShape);
  for (int g = 1; g < kShape.total_frames(); ++g) EXPECT_EQ(st.frame(g), st.frame(0));

  SceneSpec per = spec(SceneKind::kPeriodic, 7);
  per.period = kShape.frames;
  per.velocity = 1.5;
  const BlockVideo pv = generate_video(per, kShape);
  for (int b = 1; b < kShape.blocks; ++b)
    for (int f = 0; f < kShape.frames; ++f) EXPECT_EQ(pv.frame(b, f), pv.frame(b - 1, f));

  const SceneSpec tb = spec(SceneKind::kTurbulent, 7);
  EXPECT_EQ(generate_video(tb, kShape), generate_video(tb, kShape));
  const BlockVideo tv = generate_video(tb, kShape);
  EXPECT_NE(tv.frame(0), tv.frame(1));
}

TEST(Scene, IntensitiesInRangeForEveryKind) {
  for (std::uint64_t i = 0; i < 50; ++i) {
    const BlockVideo v = random_video(i);
    for (int g = 0; g < kShape.total_frames(); ++g) {
      EXPECT_GE(v.frame(g).minCoeff(), 0.0f);
      EXPECT_LE(v.frame(g).maxCoeff(), 1.0f);
    }
  }
}

TEST(Scene, RejectsOutOfRangeParameters) {
  SceneSpec s = spec(SceneKind::kDrift, 1);
  s.amplitude = 1.5;
  EXPECT_THROW(generate_video(s, kShape), ValidationError);
  s = spec(SceneKind::kPeriodic, 1);
  s.period = 0;
  EXPECT_THROW(generate_video(s, kShape), ValidationError);
  EXPECT_THROW(parse_scene_kind("spiral"), ValidationError);
}

TEST(Reconstruct, MatchesNaiveCodec) {
  Rng rng(11);
  for (std::uint64_t i = 0; i < 12; ++i) {
    const BlockVideo x = random_video(i);
    const Assignment a = assignment_from_index(rng.uniform_int(0, 624), kLevels);
    const Reconstruction r = reconstruct(x, a);
    const auto ref = oracle::naive_reconstruct(x, a.counts());
    EXPECT_NEAR(r.quality.mse, ref.mse, 1e-9);
    for (int b = 0; b < 4; ++b) EXPECT_NEAR(r.quality.per_block_mse[b], ref.block_mse[b], 1e-9);
    for (int g = 0; g < kShape.total_frames(); ++g)
      for (int p = 0; p < kShape.frame_pixels(); ++p)
        EXPECT_NEAR(r.video.frame(g)(p / 16, p % 16), ref.frames[g][p], 1e-6);
  }
}

TEST(Reconstruct, StaticMidGrayIsLossless) {
  const BlockVideo x = constant_video(0.5f);
  for (AssignmentIndex i : {0, 137, 624}) {
    EXPECT_EQ(reconstruct(x, assignment_from_index(i, kLevels)).quality.mse, 0.0);
  }
}

TEST(Reconstruct, FullCoefficientSetRecoversResidual) {
  const BlockVideo x = random_video(3);
  std::vector<Frame> resid(kShape.frames);
  for (int f = 0; f < kShape.frames; ++f) {
    resid[f] = x.frame(1, f).cast<double>().array() - 0.25;
  }
  const auto approx = approximate_residual(resid, kShape.block_pixels());
  for (int f = 0; f < kShape.frames; ++f) EXPECT_TRUE(approx[f].isApprox(resid[f], 1e-12));
}

TEST(Reconstruct, MeasureAgreesWithReturnedRecord) {
  const BlockVideo x = random_video(8);
  const Reconstruction r = reconstruct(x, {4, 16, 2, 32});
  const QualityRecord q = measure(x, r.video);
  EXPECT_EQ(q.mse, r.quality.mse);
  EXPECT_EQ(q.per_block_mse, r.quality.per_block_mse);
  EXPECT_EQ(q.psnr, r.quality.psnr);
}

TEST(Reconstruct, ClampedDeterministicAndCausal) {
  const BlockVideo x = random_video(21);
  const Assignment a{8, 4, 16, 2};
  const Reconstruction r = reconstruct(x, a);
  EXPECT_EQ(r.video, reconstruct(x, a).video);
  for (int g = 0; g < kShape.total_frames(); ++g) {
    EXPECT_GE(r.video.frame(g).minCoeff(), 0.0f);
    EXPECT_LE(r.video.frame(g).maxCoeff(), 1.0f);
  }
  BlockVideo y = x;
  for (int f = 0; f < kShape.frames; ++f) y.frame(2, f).setConstant(0.9f);
  const Reconstruction ry = reconstruct(y, a);
  for (int b = 0; b < 2; ++b)
    for (int f = 0; f < kShape.frames; ++f) EXPECT_EQ(ry.video.frame(b, f), r.video.frame(b, f));
  EXPECT_EQ(ry.quality.per_block_mse[0], r.quality.per_block_mse[0]);
  EXPECT_EQ(ry.quality.per_block_mse[1], r.quality.per_block_mse[1]);
}

TEST(Reconstruct, MoreTokensHelpOnSeedSeven) {
  SceneSpec s = spec(SceneKind::kDrift, 7);
  s.velocity = 1.0;
  const BlockVideo x = generate_video(s, kShape);
  EXPECT_LT(reconstruct(x, {32, 32, 32, 32}).quality.mse, reconstruct(x, {2, 2, 2, 2}).quality.mse);
}

TEST(Reconstruct, RejectsInvalidAssignments) {
  const BlockVideo x = random_video(1);
  EXPECT_THROW(reconstruct(x, {2, 2, 2}), InvalidAssignmentError);
  EXPECT_THROW(reconstruct(x, {2, 2, 2, 5000}), InvalidAssignmentError);
  CodecConfig cfg;
  cfg.transform = "haar";
  EXPECT_THROW(reconstruct(x, {2, 2, 2, 2}, cfg), ValidationError);
}

TEST(Codec, LevelSweepEqualsSingleCounts) {
  const BlockVideo x = random_video(4);
  const VideoCoder coder(x);
  const Frame pred = coder.initial_predictor();
  const auto outcomes = coder.code_levels(0, pred, kLevels.values());
  for (int j = 0; j < kLevels.size(); ++j) {
    double mse = -1;
    const auto frames = coder.code_block(0, pred, kLevels[j], &mse);
    EXPECT_EQ(outcomes[j].mse, mse);
    EXPECT_EQ(outcomes[j].last, frames.back());
  }
}

TEST(Codec, TableMatchesPerAssignmentReconstruction) {
  const BlockVideo x = random_video(6);
  const AssignmentTable table = evaluate_all(x, kLevels);
  ASSERT_EQ(table.size(), 625);
  Rng rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    const AssignmentIndex i = rng.uniform_int(0, 624);
    const Reconstruction r = reconstruct(x, assignment_from_index(i, kLevels));
    EXPECT_EQ(table.mse(i), r.quality.mse);
    EXPECT_EQ(table.length(i), total_length(assignment_from_index(i, kLevels)));
    for (int b = 0; b < 4; ++b) EXPECT_EQ(table.block_mse(i)[b], r.quality.per_block_mse[b]);
  }
}

TEST(Codec, PerBlockMonotoneUnderFixedPrediction) {
  Rng rng(17);
  for (std::uint64_t i = 0; i < 20; ++i) {
    const BlockVideo x = random_video(100 + i);
    const VideoCoder coder(x);
    const int block = static_cast<int>(rng.uniform_int(0, 3));
    Frame pred(16, 16);
    for (int p = 0; p < 256; ++p) pred(p / 16, p % 16) = rng.uniform();
    std::vector<Frame> resid(kShape.frames);
    for (int f = 0; f < kShape.frames; ++f) resid[f] = x.frame(block, f).cast<double>() - pred;
    double prev = std::numeric_limits<double>::infinity();
    for (int k : kLevels.values()) {
      const auto approx = approximate_residual(resid, k);
      double err = 0;
      for (int f = 0; f < kShape.frames; ++f) err += (resid[f] - approx[f]).squaredNorm();
      EXPECT_LE(err, prev);
      prev = err;
    }
  }
}

TEST(VideoIo, BinaryRoundtrip) {
  const BlockVideo x = random_video(2);
  std::stringstream buf;
  write_video(buf, x);
  EXPECT_EQ(buf.str().size(), 16u + 4u * 4 * 4 * 16 * 16);
  EXPECT_EQ(read_video(buf), x);
  std::stringstream truncated(buf.str().substr(0, 40));
  EXPECT_THROW(read_video(truncated), IoError);
}

}  // namespace
}  // namespace tokbudget
