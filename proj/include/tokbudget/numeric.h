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

#ifndef TOKBUDGET_NUMERIC_H_
#define TOKBUDGET_NUMERIC_H_

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace tokbudget {

// Pairwise (cascade) summation; the association order depends only on the
// length, so the result is reproducible for a given input order.
template <typename Scalar>
Scalar pairwise_sum(std::span<const Scalar> x) {
  if (x.size() <= 8) {
    Scalar s(0);
    for (Scalar v : x) s += v;
    return s;
  }
  const std::size_t half = x.size() / 2;
  return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

template <typename Scalar>
Scalar pairwise_mean(std::span<const Scalar> x) {
  return pairwise_sum(x) / static_cast<Scalar>(x.size());
}

struct MeanStd {
  double mean = 0;
  double std = 0;
};

// Population mean and standard deviation (two-pass).
inline MeanStd mean_std(std::span<const double> x) {
  MeanStd r;
  if (x.empty()) return r;
  r.mean = pairwise_mean(x);
  std::vector<double> sq(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - r.mean;
    sq[i] = d * d;
  }
  r.std = std::sqrt(pairwise_mean(std::span<const double>(sq)));
  return r;
}

}  // namespace tokbudget

#endif  // TOKBUDGET_NUMERIC_H_
