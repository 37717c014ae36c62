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

#include "tokbudget/core.h"

#include <algorithm>
#include <charconv>
#include <limits>
#include <numeric>

#include "tokbudget/errors.h"

namespace tokbudget {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

CandidateLevels::CandidateLevels(std::vector<int> levels, int blocks)
    : levels_(std::move(levels)), blocks_(blocks), num_assignments_(1) {
  if (levels_.size() < 2) {
    throw ValidationError("candidate levels need at least two entries");
  }
  if (blocks_ < 1) throw ValidationError("block count must be >= 1");
  if (levels_.front() < 1) throw ValidationError("levels must be >= 1");
  for (size_t j = 1; j < levels_.size(); ++j) {
    if (levels_[j] <= levels_[j - 1]) {
      throw ValidationError("levels must be strictly ascending");
    }
  }
  const auto m = static_cast<AssignmentIndex>(levels_.size());
  for (int t = 0; t < blocks_; ++t) {
    if (num_assignments_ > std::numeric_limits<AssignmentIndex>::max() / m) {
      throw ValidationError("m^T overflows the class index type");
    }
    num_assignments_ *= m;
  }
}

CandidateLevels CandidateLevels::Default() {
  return CandidateLevels({2, 4, 8, 16, 32}, 4);
}

std::optional<int> CandidateLevels::index_of(int count) const {
  const auto it = std::lower_bound(levels_.begin(), levels_.end(), count);
  if (it == levels_.end() || *it != count) return std::nullopt;
  return static_cast<int>(it - levels_.begin());
}

AssignmentIndex CandidateLevels::power(int p) const {
  AssignmentIndex r = 1;
  for (int i = 0; i < p; ++i) r *= size();
  return r;
}

Assignment assignment_from_index(AssignmentIndex idx,
                                 const CandidateLevels& levels) {
  if (idx < 0 || idx >= levels.num_assignments()) {
    throw RangeError("assignment index " + std::to_string(idx) +
                     " outside [0, " +
                     std::to_string(levels.num_assignments()) + ")");
  }
  const int m = levels.size();
  std::vector<int> counts(levels.blocks());
  for (int t = levels.blocks() - 1; t >= 0; --t) {
    counts[t] = levels[static_cast<int>(idx % m)];
    idx /= m;
  }
  return Assignment(std::move(counts));
}

AssignmentIndex index_from_assignment(const Assignment& a,
                                      const CandidateLevels& levels) {
  if (a.blocks() != levels.blocks()) {
    throw InvalidAssignmentError("assignment has " +
                                 std::to_string(a.blocks()) + " blocks, expected " +
                                 std::to_string(levels.blocks()));
  }
  AssignmentIndex idx = 0;
  for (int t = 0; t < a.blocks(); ++t) {
    const auto digit = levels.index_of(a[t]);
    if (!digit) {
      throw InvalidAssignmentError("token count " + std::to_string(a[t]) +
                                   " is not a candidate level");
    }
    idx = idx * levels.size() + *digit;
  }
  return idx;
}

int total_length(const Assignment& a) {
  return std::accumulate(a.counts().begin(), a.counts().end(), 0);
}

Assignment uniform_assignment(int level, int blocks) {
  return Assignment(std::vector<int>(blocks, level));
}

std::vector<int> level_digits(const Assignment& a,
                              const CandidateLevels& levels) {
  std::vector<int> digits(a.blocks());
  for (int t = 0; t < a.blocks(); ++t) {
    const auto d = levels.index_of(a[t]);
    if (!d) throw InvalidAssignmentError("token count is not a level");
    digits[t] = *d;
  }
  return digits;
}

std::string to_string(const Assignment& a) {
  std::string out = "(";
  for (int t = 0; t < a.blocks(); ++t) {
    if (t) out += ',';
    out += std::to_string(a[t]);
  }
  out += ')';
  return out;
}

std::vector<int> parse_int_list(std::string_view text) {
  std::vector<int> out;
  text = trim(text);
  if (text.empty()) return out;
  size_t pos = 0;
  while (pos <= text.size()) {
    const size_t comma = text.find(',', pos);
    const auto item =
        trim(text.substr(pos, comma == std::string_view::npos ? text.npos
                                                              : comma - pos));
    int value = 0;
    const auto [end, ec] =
        std::from_chars(item.data(), item.data() + item.size(), value);
    if (item.empty() || ec != std::errc() || end != item.data() + item.size()) {
      throw ValidationError("malformed integer '" + std::string(item) + "'");
    }
    out.push_back(value);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

Assignment parse_assignment(std::string_view text,
                            const CandidateLevels& levels) {
  text = trim(text);
  if (text.empty()) throw ValidationError("empty assignment");
  if (text.front() == '(') {
    if (text.back() != ')') {
      throw ValidationError("unterminated assignment tuple");
    }
    Assignment a(parse_int_list(text.substr(1, text.size() - 2)));
    index_from_assignment(a, levels);  // validates
    return a;
  }
  AssignmentIndex idx = 0;
  const auto [end, ec] =
      std::from_chars(text.data(), text.data() + text.size(), idx);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw ValidationError("malformed assignment '" + std::string(text) + "'");
  }
  return assignment_from_index(idx, levels);
}

}  // namespace tokbudget
