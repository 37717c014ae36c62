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

#ifndef TOKBUDGET_VIDEO_H_
#define TOKBUDGET_VIDEO_H_

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

#include "tokbudget/errors.h"

namespace tokbudget {

template <typename Scalar>
using FrameT = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct VideoShape {
  int blocks = 4;
  int frames = 4;  // per block
  int height = 16;
  int width = 16;

  int total_frames() const { return blocks * frames; }
  int frame_pixels() const { return height * width; }
  int block_pixels() const { return frames * height * width; }

  void validate() const {
    if (blocks < 1 || frames < 1 || height < 1 || width < 1) {
      throw ValidationError("video dimensions must be positive");
    }
  }

  bool operator==(const VideoShape&) const = default;
};

// Grayscale clip of shape.blocks causal temporal blocks, each holding
// shape.frames frames of height x width intensities.
template <typename Scalar>
class BasicVideo {
 public:
  using Frame = FrameT<Scalar>;

  BasicVideo() = default;
  explicit BasicVideo(const VideoShape& shape, Scalar fill = Scalar(0))
      : shape_(shape) {
    shape_.validate();
    frames_.assign(shape_.total_frames(),
                   Frame::Constant(shape_.height, shape_.width, fill));
  }

  const VideoShape& shape() const { return shape_; }

  const Frame& frame(int global) const { return frames_[global]; }
  Frame& frame(int global) { return frames_[global]; }
  const Frame& frame(int block, int f) const {
    return frames_[block * shape_.frames + f];
  }
  Frame& frame(int block, int f) { return frames_[block * shape_.frames + f]; }

  template <typename Other>
  BasicVideo<Other> cast() const {
    BasicVideo<Other> out(shape_);
    for (int g = 0; g < shape_.total_frames(); ++g) {
      out.frame(g) = frames_[g].template cast<Other>();
    }
    return out;
  }

  bool operator==(const BasicVideo& other) const {
    if (!(shape_ == other.shape_)) return false;
    for (size_t g = 0; g < frames_.size(); ++g) {
      if (frames_[g] != other.frames_[g]) return false;
    }
    return true;
  }

 private:
  VideoShape shape_;
  std::vector<Frame> frames_;
};

using BlockVideo = BasicVideo<float>;
using Frame = FrameT<double>;

// Flat binary layout: four little-endian uint32 (T, F, H, W) followed by
// T*F*H*W float32 intensities in row-major (block, frame, row, col) order.
void write_video(std::ostream& out, const BlockVideo& video);
BlockVideo read_video(std::istream& in);
void write_video_file(const std::string& path, const BlockVideo& video);
BlockVideo read_video_file(const std::string& path);

}  // namespace tokbudget

#endif  // TOKBUDGET_VIDEO_H_
