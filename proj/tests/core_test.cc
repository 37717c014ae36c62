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

#include <set>

#include "tokbudget/core.h"
#include "tokbudget/errors.h"
#include "tokbudget/numeric.h"
#include "tokbudget/parallel.h"
#include "tokbudget/random.h"
#include "tokbudget/text.h"

namespace tokbudget {
namespace {

const CandidateLevels kLevels = CandidateLevels::Default();

TEST(CandidateLevels, DefaultsMatchDeskScale) {
  EXPECT_EQ(kLevels.values(), (std::vector<int>{2, 4, 8, 16, 32}));
  EXPECT_EQ(kLevels.blocks(), 4);
  EXPECT_EQ(kLevels.num_assignments(), 625);
  EXPECT_EQ(kLevels.index_of(8), 2);
  EXPECT_FALSE(kLevels.index_of(3).has_value());
}

TEST(CandidateLevels, RejectsBadSets) {
  EXPECT_THROW(CandidateLevels({4, 2}, 4), ValidationError);
  EXPECT_THROW(CandidateLevels({2, 2, 4}, 4), ValidationError);
  EXPECT_THROW(CandidateLevels({2}, 4), ValidationError);
  EXPECT_THROW(CandidateLevels({0, 2}, 4), ValidationError);
  EXPECT_THROW(CandidateLevels({2, 4}, 0), ValidationError);
}

TEST(AssignmentIndex, Examples) {
  EXPECT_EQ(assignment_from_index(0, kLevels), (Assignment{2, 2, 2, 2}));
  EXPECT_EQ(assignment_from_index(624, kLevels), (Assignment{32, 32, 32, 32}));
  EXPECT_EQ(assignment_from_index(1, kLevels), (Assignment{2, 2, 2, 4}));
  EXPECT_EQ(index_from_assignment({2, 2, 2, 2}, kLevels), 0);
  EXPECT_EQ(index_from_assignment({32, 32, 32, 32}, kLevels), 624);
  EXPECT_EQ(index_from_assignment({2, 2, 4, 2}, kLevels), 5);
}

TEST(AssignmentIndex, Errors) {
  EXPECT_THROW(assignment_from_index(-1, kLevels), RangeError);
  EXPECT_THROW(assignment_from_index(625, kLevels), RangeError);
  EXPECT_THROW(index_from_assignment({2, 2, 3, 2}, kLevels), InvalidAssignmentError);
  EXPECT_THROW(index_from_assignment({2, 2, 2}, kLevels), InvalidAssignmentError);
}

TEST(AssignmentIndex, ExhaustiveBijection) {
  std::set<std::vector<int>> seen;
  for (AssignmentIndex i = 0; i < kLevels.num_assignments(); ++i) {
    const Assignment a = assignment_from_index(i, kLevels);
    EXPECT_EQ(index_from_assignment(a, kLevels), i);
    seen.insert(a.counts());
  }
  EXPECT_EQ(seen.size(), 625u);
}

TEST(AssignmentIndex, PrefixRangesAreContiguous) {
  // Fixing block 0 to level j selects indices [j*125, (j+1)*125).
  for (AssignmentIndex i = 0; i < 625; ++i) {
    EXPECT_EQ(level_digits(assignment_from_index(i, kLevels), kLevels)[0], i / 125);
  }
}

TEST(TotalLength, Examples) {
  EXPECT_EQ(total_length({2, 4, 8, 16}), 30);
  EXPECT_EQ(total_length({2, 2, 2, 2}), 8);
  EXPECT_EQ(total_length({32, 32, 32, 32}), 128);
}

TEST(TotalLength, MonotoneUnderComponentIncrease) {
  for (AssignmentIndex i = 0; i < 625; ++i) {
    const auto d = level_digits(assignment_from_index(i, kLevels), kLevels);
    for (int t = 0; t < 4; ++t) {
      if (d[t] + 1 >= 5) continue;
      auto up = assignment_from_index(i, kLevels).counts();
      up[t] = kLevels[d[t] + 1];
      EXPECT_GT(total_length(Assignment(up)), total_length(assignment_from_index(i, kLevels)));
    }
  }
}

TEST(AssignmentText, RoundtripBothForms) {
  const Assignment a{2, 8, 32, 4};
  EXPECT_EQ(to_string(a), "(2,8,32,4)");
  EXPECT_EQ(parse_assignment(to_string(a), kLevels), a);
  EXPECT_EQ(parse_assignment(" ( 2, 8 ,32,4 ) ", kLevels), a);
  EXPECT_EQ(parse_assignment(std::to_string(index_from_assignment(a, kLevels)), kLevels), a);
  EXPECT_THROW(parse_assignment("(2,8,32)", kLevels), InvalidAssignmentError);
  EXPECT_THROW(parse_assignment("(2,8,x,4)", kLevels), ValidationError);
  EXPECT_THROW(parse_assignment("700", kLevels), RangeError);
}

TEST(Rng, DeterministicAndInRange) {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    EXPECT_EQ(u, b.uniform());
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    const auto k = a.uniform_int(-3, 3);
    b.uniform_int(-3, 3);
    EXPECT_GE(k, -3);
    EXPECT_LE(k, 3);
  }
  EXPECT_NE(derive_seed(1, "a"), derive_seed(1, "b"));
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
}

TEST(Numeric, PairwiseMeanAndPopulationStd) {
  const std::vector<double> v{1, 2, 3, 4};
  EXPECT_DOUBLE_EQ(pairwise_mean(std::span<const double>(v)), 2.5);
  const MeanStd ms = mean_std(v);
  EXPECT_DOUBLE_EQ(ms.mean, 2.5);
  EXPECT_DOUBLE_EQ(ms.std, std::sqrt(1.25));
}

TEST(Parallel, ResultsIndependentOfWorkerCount) {
  std::vector<double> one(1000), four(1000);
  parallel_for(1000, 1, [&](std::int64_t i) { one[i] = std::sin(static_cast<double>(i)); });
  parallel_for(1000, 4, [&](std::int64_t i) { four[i] = std::sin(static_cast<double>(i)); });
  EXPECT_EQ(one, four);
}

TEST(Parallel, RethrowsWorkerException) {
  EXPECT_THROW(parallel_for(10, 2,
                            [](std::int64_t i) {
                              if (i == 7) throw ValidationError("boom");
                            }),
               ValidationError);
}

TEST(KeyValueText, ParsesAndReportsLines) {
  const auto kv = KeyValueText::parse("# c\na = 1\n\nb=two words # tail\n", "f.cfg");
  EXPECT_EQ(kv.get("a"), "1");
  EXPECT_EQ(kv.get("b"), "two words");
  EXPECT_EQ(kv.where("b"), "f.cfg:4");
  EXPECT_THROW(kv.get("c"), ValidationError);
  EXPECT_THROW(KeyValueText::parse("a=1\na=2\n"), ValidationError);
  EXPECT_THROW(KeyValueText::parse("novalue\n"), ValidationError);
}

TEST(Text, DoubleRoundtripAndHash) {
  for (double d : {0.1, 1.0 / 3.0, 1e-300, -2.5e10}) {
    EXPECT_EQ(parse_double(format_double(d), "d"), d);
  }
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
}

}  // namespace
}  // namespace tokbudget
