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

#include "tokbudget/codec.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "tokbudget/errors.h"

namespace tokbudget {
namespace {

std::vector<double> row_major(const Eigen::MatrixXd& m) {
  std::vector<double> out(m.size());
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out[r * m.cols() + c] = m(r, c);
  }
  return out;
}

// acc[f] += c * outer(C_H row u, C_W row v) for flat coefficient index i.
void add_basis(std::span<double> acc, int i, double c, int h, int w,
               const std::vector<double>& row_basis,
               const std::vector<double>& col_basis) {
  const int hw = h * w;
  const int f = i / hw;
  const int u = (i % hw) / w;
  const int v = i % w;
  double* frame = acc.data() + static_cast<size_t>(f) * hw;
  const double* cu = row_basis.data() + static_cast<size_t>(u) * h;
  const double* cv = col_basis.data() + static_cast<size_t>(v) * w;
  for (int y = 0; y < h; ++y) {
    const double a = c * cu[y];
    double* row = frame + y * w;
    for (int x = 0; x < w; ++x) row[x] += a * cv[x];
  }
}

}  // namespace

double psnr_from_mse(double mse) {
  if (mse <= 0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

double combine_block_mse(std::span<const double> per_block_mse) {
  double s = 0;
  for (double v : per_block_mse) s += v;
  return s / static_cast<double>(per_block_mse.size());
}

QualityRecord measure(const BlockVideo& x, const BlockVideo& y) {
  if (!(x.shape() == y.shape())) {
    throw ValidationError("measure: video shapes differ");
  }
  const VideoShape& s = x.shape();
  QualityRecord q;
  q.per_block_mse.resize(s.blocks);
  for (int b = 0; b < s.blocks; ++b) {
    double sum = 0;
    for (int f = 0; f < s.frames; ++f) {
      const auto& fx = x.frame(b, f);
      const auto& fy = y.frame(b, f);
      for (int r = 0; r < s.height; ++r) {
        for (int c = 0; c < s.width; ++c) {
          const double d = static_cast<double>(fx(r, c)) - fy(r, c);
          sum += d * d;
        }
      }
    }
    q.per_block_mse[b] = sum / s.block_pixels();
  }
  q.mse = combine_block_mse(q.per_block_mse);
  q.psnr = psnr_from_mse(q.mse);
  return q;
}

void CodecConfig::validate() const {
  if (transform != "dct2") {
    throw ValidationError("unsupported codec transform '" + transform + "'");
  }
  if (predictor != "last_frame") {
    throw ValidationError("unsupported codec predictor '" + predictor + "'");
  }
}

std::vector<int> rank_coefficients(std::span<const double> coeffs, int k) {
  const int n = static_cast<int>(coeffs.size());
  k = std::clamp(k, 0, n);
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::partial_sort(idx.begin(), idx.begin() + k, idx.end(), [&](int a, int b) {
    const double ma = std::abs(coeffs[a]);
    const double mb = std::abs(coeffs[b]);
    return ma > mb || (ma == mb && a < b);
  });
  idx.resize(k);
  return idx;
}

std::vector<Frame> approximate_residual(std::span<const Frame> residual, int k) {
  if (residual.empty()) return {};
  const int h = static_cast<int>(residual[0].rows());
  const int w = static_cast<int>(residual[0].cols());
  const int hw = h * w;
  const Dct2d<double> dct(h, w);
  std::vector<double> coeffs(residual.size() * hw);
  for (size_t f = 0; f < residual.size(); ++f) {
    const Frame t = dct.forward(residual[f]);
    std::copy(t.data(), t.data() + hw, coeffs.begin() + f * hw);
  }
  const auto rows = row_major(dct.row_basis());
  const auto cols = row_major(dct.col_basis());
  std::vector<double> acc(coeffs.size(), 0.0);
  for (int i : rank_coefficients(coeffs, k)) {
    add_basis(acc, i, coeffs[i], h, w, rows, cols);
  }
  std::vector<Frame> out(residual.size(), Frame(h, w));
  for (size_t f = 0; f < residual.size(); ++f) {
    std::copy(acc.begin() + f * hw, acc.begin() + (f + 1) * hw, out[f].data());
  }
  return out;
}

VideoCoder::VideoCoder(const BlockVideo& source)
    : shape_(source.shape()),
      dct_(source.shape().height, source.shape().width),
      row_basis_(row_major(dct_.row_basis())),
      col_basis_(row_major(dct_.col_basis())) {
  source_.reserve(shape_.total_frames());
  source_dct_.reserve(shape_.total_frames());
  for (int g = 0; g < shape_.total_frames(); ++g) {
    source_.push_back(source.frame(g).cast<double>());
    source_dct_.push_back(dct_.forward(source_.back()));
  }
}

Frame VideoCoder::initial_predictor() const {
  return Frame::Constant(shape_.height, shape_.width, 0.5);
}

template <typename Sink>
void VideoCoder::code(int block, const Frame& predictor,
                      std::span<const int> counts, Sink&& sink) const {
  const int h = shape_.height;
  const int w = shape_.width;
  const int hw = h * w;
  const int nf = shape_.frames;
  const int n = nf * hw;
  if (counts.empty()) return;
  if (counts.front() < 1 || counts.back() > n) {
    throw InvalidAssignmentError("token count outside [1, F*H*W]");
  }

  const Frame pred_dct = dct_.forward(predictor);
  std::vector<double> residual(n);
  for (int f = 0; f < nf; ++f) {
    const Frame& src = source_dct_[block * nf + f];
    for (int i = 0; i < hw; ++i) {
      residual[f * hw + i] = src.data()[i] - pred_dct.data()[i];
    }
  }
  const std::vector<int> order = rank_coefficients(residual, counts.back());

  std::vector<double> acc(n, 0.0);
  std::vector<Frame> recon(nf, Frame(h, w));
  size_t next = 0;
  for (int r = 0; r < counts.back(); ++r) {
    add_basis(acc, order[r], residual[order[r]], h, w, row_basis_, col_basis_);
    while (next < counts.size() && counts[next] == r + 1) {
      double sum = 0;
      for (int f = 0; f < nf; ++f) {
        const Frame& src = source_[block * nf + f];
        const double* a = acc.data() + f * hw;
        double* out = recon[f].data();
        for (int i = 0; i < hw; ++i) {
          // Stored intensities are float32, like the source video.
          const double v = static_cast<float>(
              std::clamp(predictor.data()[i] + a[i], 0.0, 1.0));
          out[i] = v;
          const double d = v - src.data()[i];
          sum += d * d;
        }
      }
      sink(next, recon, sum / n);
      ++next;
    }
  }
}

std::vector<VideoCoder::LevelOutcome> VideoCoder::code_levels(
    int block, const Frame& predictor, std::span<const int> counts) const {
  std::vector<LevelOutcome> out(counts.size());
  code(block, predictor, counts,
       [&](size_t j, const std::vector<Frame>& recon, double mse) {
         out[j].mse = mse;
         out[j].last = recon.back();
       });
  return out;
}

std::vector<Frame> VideoCoder::code_block(int block, const Frame& predictor,
                                          int count, double* mse) const {
  std::vector<Frame> out;
  const int counts[1] = {count};
  code(block, predictor, counts,
       [&](size_t, const std::vector<Frame>& recon, double e) {
         out = recon;
         if (mse) *mse = e;
       });
  return out;
}

Reconstruction reconstruct(const BlockVideo& x, const Assignment& a,
                           const CodecConfig& config) {
  config.validate();
  const VideoShape& s = x.shape();
  if (a.blocks() != s.blocks) {
    throw InvalidAssignmentError("assignment block count differs from video");
  }
  const VideoCoder coder(x);
  Reconstruction out{BlockVideo(s), {}};
  out.quality.per_block_mse.resize(s.blocks);
  Frame predictor = coder.initial_predictor();
  for (int b = 0; b < s.blocks; ++b) {
    const auto frames =
        coder.code_block(b, predictor, a[b], &out.quality.per_block_mse[b]);
    for (int f = 0; f < s.frames; ++f) {
      out.video.frame(b, f) = frames[f].cast<float>();
    }
    predictor = frames.back();
  }
  out.quality.mse = combine_block_mse(out.quality.per_block_mse);
  out.quality.psnr = psnr_from_mse(out.quality.mse);
  return out;
}

namespace {

void continue_from(const VideoCoder& coder, const CandidateLevels& levels,
                   int block, int remaining, const Frame& predictor,
                   AssignmentIndex local, std::vector<double>& path,
                   const ContinuationFn& fn) {
  const auto outcomes = coder.code_levels(block, predictor, levels.values());
  for (int j = 0; j < levels.size(); ++j) {
    path.push_back(outcomes[j].mse);
    const AssignmentIndex child = local * levels.size() + j;
    if (remaining == 1) {
      fn(child, path, outcomes[j].last);
    } else {
      continue_from(coder, levels, block + 1, remaining - 1, outcomes[j].last,
                    child, path, fn);
    }
    path.pop_back();
  }
}

}  // namespace

void for_each_continuation(const VideoCoder& coder,
                           const CandidateLevels& levels, int first, int depth,
                           const Frame& predictor, const ContinuationFn& fn) {
  if (first < 0 || depth < 1 || first + depth > coder.shape().blocks) {
    throw RangeError("continuation range outside the video's blocks");
  }
  std::vector<double> path;
  path.reserve(depth);
  continue_from(coder, levels, first, depth, predictor, 0, path, fn);
}

AssignmentTable::AssignmentTable(CandidateLevels levels,
                                 std::vector<double> per_block)
    : levels_(std::move(levels)), block_mse_(std::move(per_block)) {
  const AssignmentIndex n = levels_.num_assignments();
  const int t = levels_.blocks();
  if (static_cast<AssignmentIndex>(block_mse_.size()) != n * t) {
    throw ValidationError("assignment table size mismatch");
  }
  mse_.resize(n);
  length_.resize(n);
  for (AssignmentIndex i = 0; i < n; ++i) {
    mse_[i] = combine_block_mse(block_mse(i));
    length_[i] = total_length(assignment_from_index(i, levels_));
  }
}

double AssignmentTable::prefix_mse(AssignmentIndex idx, int p) const {
  return combine_block_mse(block_mse(idx).first(p));
}

AssignmentTable evaluate_all(const BlockVideo& x,
                             const CandidateLevels& levels) {
  const int t = levels.blocks();
  if (x.shape().blocks != t) {
    throw ValidationError("video block count differs from levels");
  }
  const VideoCoder coder(x);
  std::vector<double> table(levels.num_assignments() * t);
  for_each_continuation(
      coder, levels, 0, t, coder.initial_predictor(),
      [&](AssignmentIndex idx, std::span<const double> mse, const Frame&) {
        std::copy(mse.begin(), mse.end(), table.begin() + idx * t);
      });
  return AssignmentTable(levels, std::move(table));
}

}  // namespace tokbudget
