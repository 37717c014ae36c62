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

// Token-budget assignments over temporal blocks.
//
// An assignment gives every temporal block a token count drawn from a small
// ascending set of candidate levels. With m levels and T blocks there are m^T
// assignments; each one is identified with a class index through a radix-m
// encoding in which block 0 is the most significant digit and a digit is the
// position of the block's count within the ascending levels. Fixing the first
// p blocks therefore fixes a contiguous range of indices.

#ifndef TOKBUDGET_CORE_H_
#define TOKBUDGET_CORE_H_

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tokbudget {

using AssignmentIndex = std::int64_t;

class CandidateLevels {
 public:
  // Throws ValidationError unless `levels` is strictly ascending, has at
  // least two entries, all >= 1, and `blocks` >= 1.
  CandidateLevels(std::vector<int> levels, int blocks);

  // Desk-scale default: {2, 4, 8, 16, 32} over 4 blocks.
  static CandidateLevels Default();

  int size() const { return static_cast<int>(levels_.size()); }
  int blocks() const { return blocks_; }
  int operator[](int j) const { return levels_[j]; }
  int min() const { return levels_.front(); }
  int max() const { return levels_.back(); }
  const std::vector<int>& values() const { return levels_; }

  // Position of `count` in the ascending levels, if present.
  std::optional<int> index_of(int count) const;

  // m^T.
  AssignmentIndex num_assignments() const { return num_assignments_; }
  // m^p for 0 <= p <= T.
  AssignmentIndex power(int p) const;

  bool operator==(const CandidateLevels& other) const = default;

 private:
  std::vector<int> levels_;
  int blocks_;
  AssignmentIndex num_assignments_;
};

class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(std::vector<int> counts) : counts_(std::move(counts)) {}
  Assignment(std::initializer_list<int> counts) : counts_(counts) {}

  int blocks() const { return static_cast<int>(counts_.size()); }
  int operator[](int t) const { return counts_[t]; }
  const std::vector<int>& counts() const { return counts_; }

  bool operator==(const Assignment& other) const = default;

 private:
  std::vector<int> counts_;
};

// Throws RangeError when idx is outside [0, m^T).
Assignment assignment_from_index(AssignmentIndex idx,
                                 const CandidateLevels& levels);

// Throws InvalidAssignmentError when a count is not a level or the block
// count differs from levels.blocks().
AssignmentIndex index_from_assignment(const Assignment& a,
                                      const CandidateLevels& levels);

int total_length(const Assignment& a);

// Same level for every block.
Assignment uniform_assignment(int level, int blocks);

// Level indices (radix digits) of `a`, block 0 first.
std::vector<int> level_digits(const Assignment& a,
                              const CandidateLevels& levels);

// "(k1,k2,...,kT)".
std::string to_string(const Assignment& a);

// Accepts either a decimal class index or a tuple "(k1,...,kT)"; whitespace
// around tokens is ignored. Throws ValidationError on malformed text and the
// index/assignment errors above on out-of-range values.
Assignment parse_assignment(std::string_view text,
                            const CandidateLevels& levels);

// "2,4,8" -> {2,4,8}. Throws ValidationError on malformed entries.
std::vector<int> parse_int_list(std::string_view text);

}  // namespace tokbudget

#endif  // TOKBUDGET_CORE_H_
