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

#include "tokbudget/scene.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "tokbudget/random.h"

namespace tokbudget {
namespace {

constexpr int kGratings = 4;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Grating {
  double fx, fy;  // cycles per pixel
  double phase;
  double weight;
};

struct Texture {
  std::array<Grating, kGratings> gratings;
  double norm = 1;

  // In [-1, 1].
  double operator()(double y, double x) const {
    double s = 0;
    for (const auto& g : gratings) {
      s += g.weight * std::sin(kTwoPi * (g.fx * x + g.fy * y) + g.phase);
    }
    return s / norm;
  }
};

Texture random_texture(Rng& rng, double max_cycles, int width) {
  Texture t;
  t.norm = 0;
  for (auto& g : t.gratings) {
    const double cycles = rng.uniform(0.25, std::max(0.25, max_cycles));
    const double theta = rng.uniform(0, kTwoPi);
    g.fx = cycles * std::cos(theta) / width;
    g.fy = cycles * std::sin(theta) / width;
    g.phase = rng.uniform(0, kTwoPi);
    g.weight = rng.uniform(0.25, 1.0);
    t.norm += g.weight;
  }
  return t;
}

double to_intensity(double amplitude, double texture) {
  return std::clamp(0.5 + 0.5 * amplitude * texture, 0.0, 1.0);
}

// Soft-edged square mask in [0, 1], wrapping on the torus.
double square_mask(double y, double x, double cy, double cx, double half,
                   int height, int width) {
  auto wrap = [](double d, int n) {
    d = std::fmod(d, static_cast<double>(n));
    if (d < -n / 2.0) d += n;
    if (d > n / 2.0) d -= n;
    return d;
  };
  const double dy = std::abs(wrap(y - cy, height));
  const double dx = std::abs(wrap(x - cx, width));
  const double edge = std::max(dx, dy) - half;
  return std::clamp(0.5 - edge, 0.0, 1.0);
}

}  // namespace

std::string_view to_string(SceneKind kind) {
  switch (kind) {
    case SceneKind::kStatic: return "static";
    case SceneKind::kPeriodic: return "periodic";
    case SceneKind::kDrift: return "drift";
    case SceneKind::kTurbulent: return "turbulent";
    case SceneKind::kComposite: return "composite";
  }
  return "unknown";
}

SceneKind parse_scene_kind(std::string_view name) {
  for (SceneKind k : {SceneKind::kStatic, SceneKind::kPeriodic,
                      SceneKind::kDrift, SceneKind::kTurbulent,
                      SceneKind::kComposite}) {
    if (to_string(k) == name) return k;
  }
  throw ValidationError("unknown scene kind '" + std::string(name) + "'");
}

void SceneSpec::validate() const {
  auto fail = [](const std::string& what) {
    throw ValidationError("scene parameter out of range: " + what);
  };
  if (!(amplitude >= 0 && amplitude <= 1)) fail("amplitude");
  if (period < 1 || period > 64) fail("period");
  if (!(velocity >= 0 && velocity <= 4)) fail("velocity");
  if (!(texture_scale >= 0.25 && texture_scale <= 8)) fail("texture_scale");
  if (onset < 0) fail("onset");
}

BlockVideo generate_video(const SceneSpec& spec, const VideoShape& shape) {
  spec.validate();
  shape.validate();
  BlockVideo video(shape);
  const int h = shape.height;
  const int w = shape.width;

  Rng rng(derive_seed(spec.seed, "scene"));
  const Texture base = random_texture(rng, spec.texture_scale, w);
  const double dir = rng.uniform(0, kTwoPi);
  const double ux = std::cos(dir);
  const double uy = std::sin(dir);

  auto render = [&](int g, auto&& pixel) {
    auto& frame = video.frame(g);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        frame(y, x) = static_cast<float>(pixel(static_cast<double>(y),
                                               static_cast<double>(x)));
      }
    }
  };

  switch (spec.kind) {
    case SceneKind::kStatic:
      for (int g = 0; g < shape.total_frames(); ++g) {
        render(g, [&](double y, double x) {
          return to_intensity(spec.amplitude, base(y, x));
        });
      }
      break;
    case SceneKind::kPeriodic:
    case SceneKind::kDrift:
      for (int g = 0; g < shape.total_frames(); ++g) {
        const double steps = spec.kind == SceneKind::kPeriodic
                                 ? static_cast<double>(g % spec.period)
                                 : static_cast<double>(std::max(0, g - spec.onset));
        const double dy = uy * spec.velocity * steps;
        const double dx = ux * spec.velocity * steps;
        render(g, [&](double y, double x) {
          return to_intensity(spec.amplitude, base(y - dy, x - dx));
        });
      }
      break;
    case SceneKind::kTurbulent:
      for (int g = 0; g < shape.total_frames(); ++g) {
        Rng frame_rng(derive_seed(spec.seed, static_cast<std::uint64_t>(g)));
        const Texture noise = random_texture(frame_rng, spec.texture_scale, w);
        render(g, [&](double y, double x) {
          return to_intensity(spec.amplitude, noise(y, x));
        });
      }
      break;
    case SceneKind::kComposite: {
      const double cy0 = rng.uniform(0, h);
      const double cx0 = rng.uniform(0, w);
      const double half = rng.uniform(0.15, 0.3) * std::min(h, w);
      const double level = rng.uniform() < 0.5 ? rng.uniform(0.0, 0.2)
                                               : rng.uniform(0.8, 1.0);
      for (int g = 0; g < shape.total_frames(); ++g) {
        const double steps = std::max(0, g - spec.onset);
        const double cy = cy0 + uy * spec.velocity * steps;
        const double cx = cx0 + ux * spec.velocity * steps;
        render(g, [&](double y, double x) {
          const double bg = to_intensity(0.5 * spec.amplitude, base(y, x));
          const double a = square_mask(y, x, cy, cx, half, h, w);
          return (1 - a) * bg + a * level;
        });
      }
      break;
    }
  }
  return video;
}

void SceneDistribution::validate() const {
  if (kinds.empty()) throw ValidationError("scene distribution has no kinds");
  auto check = [](double lo, double hi, double min, double max,
                  const char* what) {
    if (!(lo <= hi && lo >= min && hi <= max)) {
      throw ValidationError(std::string("scene distribution range invalid: ") +
                            what);
    }
  };
  check(amplitude_min, amplitude_max, 0, 1, "amplitude");
  check(velocity_min, velocity_max, 0, 4, "velocity");
  check(scale_min, scale_max, 0.25, 8, "texture_scale");
  check(period_min, period_max, 1, 64, "period");
  check(late_onset_probability, late_onset_probability, 0, 1,
        "late_onset_probability");
}

SceneSpec SceneDistribution::sample(std::uint64_t stream, std::uint64_t index,
                                    const VideoShape& shape) const {
  SceneSpec spec;
  spec.seed = derive_seed(stream, index);
  Rng rng(derive_seed(spec.seed, "spec"));
  spec.kind = kinds[rng.uniform_int(0, static_cast<std::int64_t>(kinds.size()) - 1)];
  spec.amplitude = rng.uniform(amplitude_min, amplitude_max);
  spec.period = static_cast<int>(rng.uniform_int(period_min, period_max));
  spec.velocity = rng.uniform(velocity_min, velocity_max);
  spec.texture_scale = rng.uniform(scale_min, scale_max);
  const bool late = rng.uniform() < late_onset_probability;
  const int frames = shape.total_frames();
  spec.onset = late && frames > 1
                   ? static_cast<int>(rng.uniform_int(1, frames - 1))
                   : 0;
  return spec;
}

}  // namespace tokbudget
