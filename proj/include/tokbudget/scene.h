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

// Procedural synthetic clips. Every clip is a pure function of its SceneSpec
// and the video shape, so datasets store specs and regenerate pixels.
//
// Textures are normalized sums of oriented sinusoidal gratings; intensities
// are 0.5 + 0.5 * amplitude * texture, which keeps them inside [0, 1].

#ifndef TOKBUDGET_SCENE_H_
#define TOKBUDGET_SCENE_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "tokbudget/video.h"

namespace tokbudget {

enum class SceneKind { kStatic, kPeriodic, kDrift, kTurbulent, kComposite };

std::string_view to_string(SceneKind kind);
// Throws ValidationError on unknown names.
SceneKind parse_scene_kind(std::string_view name);

struct SceneSpec {
  SceneKind kind = SceneKind::kStatic;
  double amplitude = 0.5;      // texture contrast, [0, 1]
  int period = 4;              // frames per motion cycle (periodic), [1, 64]
  double velocity = 1.0;       // pixels per frame, [0, 4]
  double texture_scale = 2.0;  // highest grating frequency, cycles/frame, [0.25, 8]
  int onset = 0;               // first moving frame (drift, composite), >= 0
  std::uint64_t seed = 0;

  // Throws ValidationError when a parameter leaves its documented range.
  void validate() const;

  bool operator==(const SceneSpec&) const = default;
};

BlockVideo generate_video(const SceneSpec& spec, const VideoShape& shape = {});

// Distribution over scene specs. sample(stream, i) is a pure function of
// (stream, i); distinct streams give unrelated spec sequences.
struct SceneDistribution {
  std::vector<SceneKind> kinds = {SceneKind::kStatic, SceneKind::kPeriodic,
                                  SceneKind::kDrift, SceneKind::kTurbulent,
                                  SceneKind::kComposite};
  double amplitude_min = 0.2, amplitude_max = 1.0;
  double velocity_min = 0.25, velocity_max = 3.0;
  double scale_min = 0.5, scale_max = 6.0;
  int period_min = 2, period_max = 8;
  // Chance that drift/composite motion starts after the first frame.
  double late_onset_probability = 0.5;

  void validate() const;
  SceneSpec sample(std::uint64_t stream, std::uint64_t index,
                   const VideoShape& shape) const;
};

}  // namespace tokbudget

#endif  // TOKBUDGET_SCENE_H_
