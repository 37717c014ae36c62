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

// Causal block codec used as the reconstruction oracle.
//
// Blocks are coded in order. Block t is predicted by replicating the last
// reconstructed frame of block t-1 (a constant 0.5 frame for block 0); the
// residual is transformed frame by frame with an orthonormal 2-D DCT-II and
// only the k_t largest-magnitude coefficients of the block's F x H x W
// coefficient tensor are kept. One kept coefficient is one token. Equal
// magnitudes are ranked by flat (frame, row, col) index. The reconstruction
// is prediction plus inverse transform, clamped to [0, 1].

#ifndef TOKBUDGET_CODEC_H_
#define TOKBUDGET_CODEC_H_

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tokbudget/core.h"
#include "tokbudget/dct.h"
#include "tokbudget/video.h"

namespace tokbudget {

struct QualityRecord {
  double mse = 0;
  double psnr = 0;  // +inf when mse == 0
  std::vector<double> per_block_mse;
};

double psnr_from_mse(double mse);

// Mean of equally weighted per-block errors; this is the video MSE because
// every block holds the same number of pixels.
double combine_block_mse(std::span<const double> per_block_mse);

// Throws ValidationError on shape mismatch.
QualityRecord measure(const BlockVideo& x, const BlockVideo& y);

// The codec has exactly one transform and one predictor; the config exists
// so run files can state them and be rejected if they ask for anything else.
struct CodecConfig {
  std::string transform = "dct2";
  std::string predictor = "last_frame";
  void validate() const;
};

// Indices of the k largest |coeffs| entries, in rank order (ties: smaller
// index first).
std::vector<int> rank_coefficients(std::span<const double> coeffs, int k);

// Keeps the k largest DCT coefficients of a residual block (F frames) and
// returns their inverse transform, without clamping.
std::vector<Frame> approximate_residual(std::span<const Frame> residual, int k);

class VideoCoder {
 public:
  struct LevelOutcome {
    double mse = 0;  // block MSE against the source
    Frame last;      // last reconstructed frame: the next block's predictor
  };

  explicit VideoCoder(const BlockVideo& source);

  const VideoShape& shape() const { return shape_; }

  // Constant 0.5 frame used to predict block 0.
  Frame initial_predictor() const;

  // Codes `block` against `predictor` once for every count in `counts`
  // (ascending, each in [1, F*H*W]); the outcome for counts[j] depends only
  // on (block, predictor, counts[j]).
  std::vector<LevelOutcome> code_levels(int block, const Frame& predictor,
                                        std::span<const int> counts) const;

  // Same coding for a single count, returning the reconstructed frames.
  std::vector<Frame> code_block(int block, const Frame& predictor, int count,
                                double* mse) const;

 private:
  template <typename Sink>
  void code(int block, const Frame& predictor, std::span<const int> counts,
            Sink&& sink) const;

  VideoShape shape_;
  Dct2d<double> dct_;
  std::vector<double> row_basis_;  // C_H, row-major (u, y)
  std::vector<double> col_basis_;  // C_W, row-major (v, x)
  std::vector<Frame> source_;      // source frames as double
  std::vector<Frame> source_dct_;  // per-frame DCT of the source
};

struct Reconstruction {
  BlockVideo video;
  QualityRecord quality;
};

// Throws InvalidAssignmentError when a count exceeds the block size or the
// block count differs from the video.
Reconstruction reconstruct(const BlockVideo& x, const Assignment& a,
                           const CodecConfig& config = {});

// Visits every continuation of a fixed prefix: blocks [first, first + depth)
// are coded with every level combination, starting from `predictor`. The
// callback receives the radix-m index of the combination within the chunk
// (first block most significant), the per-block MSEs of the chunk's blocks,
// and the last reconstructed frame. Shared subtrees are coded once.
using ContinuationFn = std::function<void(
    AssignmentIndex local_index, std::span<const double> block_mse,
    const Frame& last)>;
void for_each_continuation(const VideoCoder& coder,
                           const CandidateLevels& levels, int first, int depth,
                           const Frame& predictor, const ContinuationFn& fn);

// Per-block MSE of every assignment of one video, indexed by class index.
class AssignmentTable {
 public:
  AssignmentTable(CandidateLevels levels, std::vector<double> per_block);

  const CandidateLevels& levels() const { return levels_; }
  AssignmentIndex size() const { return levels_.num_assignments(); }

  std::span<const double> block_mse(AssignmentIndex idx) const {
    return {block_mse_.data() + idx * levels_.blocks(),
            static_cast<size_t>(levels_.blocks())};
  }
  double mse(AssignmentIndex idx) const { return mse_[idx]; }
  // Distortion restricted to the first p blocks.
  double prefix_mse(AssignmentIndex idx, int p) const;
  int length(AssignmentIndex idx) const { return length_[idx]; }

 private:
  CandidateLevels levels_;
  std::vector<double> block_mse_;
  std::vector<double> mse_;
  std::vector<int> length_;
};

AssignmentTable evaluate_all(const BlockVideo& x, const CandidateLevels& levels);

}  // namespace tokbudget

#endif  // TOKBUDGET_CODEC_H_
