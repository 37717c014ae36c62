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

#include "tokbudget/video.h"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace tokbudget {
namespace {

static_assert(std::endian::native == std::endian::little,
              "binary video layout assumes a little-endian host");

void put_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t get_u32(std::istream& in) {
  std::uint32_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) {
    throw IoError("truncated video header");
  }
  return v;
}

}  // namespace

void write_video(std::ostream& out, const BlockVideo& video) {
  const VideoShape& s = video.shape();
  put_u32(out, s.blocks);
  put_u32(out, s.frames);
  put_u32(out, s.height);
  put_u32(out, s.width);
  for (int g = 0; g < s.total_frames(); ++g) {
    const auto& f = video.frame(g);
    out.write(reinterpret_cast<const char*>(f.data()),
              static_cast<std::streamsize>(f.size() * sizeof(float)));
  }
  if (!out) throw IoError("failed writing video");
}

BlockVideo read_video(std::istream& in) {
  VideoShape s;
  s.blocks = static_cast<int>(get_u32(in));
  s.frames = static_cast<int>(get_u32(in));
  s.height = static_cast<int>(get_u32(in));
  s.width = static_cast<int>(get_u32(in));
  s.validate();
  BlockVideo video(s);
  for (int g = 0; g < s.total_frames(); ++g) {
    auto& f = video.frame(g);
    if (!in.read(reinterpret_cast<char*>(f.data()),
                 static_cast<std::streamsize>(f.size() * sizeof(float)))) {
      throw IoError("truncated video payload");
    }
  }
  return video;
}

void write_video_file(const std::string& path, const BlockVideo& video) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_video(out, video);
}

BlockVideo read_video_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return read_video(in);
}

}  // namespace tokbudget
