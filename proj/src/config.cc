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

#include "tokbudget/config.h"

#include <set>
#include <sstream>

#include "tokbudget/errors.h"

namespace tokbudget {
namespace {

template <typename T>
std::string join(const std::vector<T>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    if constexpr (std::is_floating_point_v<T>) {
      out += format_double(v[i]);
    } else {
      out += std::to_string(v[i]);
    }
  }
  return out;
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "levels", "blocks", "frames", "height", "width",
      "codec.transform", "codec.predictor",
      "scene.kinds", "scene.amplitude", "scene.velocity", "scene.texture_scale",
      "scene.period", "scene.late_onset_probability",
      "calibrate.videos", "calibrate.assignments",
      "weights", "curves.wq", "curves.weight_total", "curves.videos", "curves.tau_points",
      "dataset.size", "dataset.split",
      "router.hidden", "router.batch", "router.learning_rate", "router.momentum",
      "router.epochs",
      "search.chunk", "demo.visual", "demo.count", "seed", "workers"};
  return keys;
}

std::vector<double> pair_of(const std::string& text, const std::string& what) {
  auto v = parse_double_list(text, what);
  if (v.size() != 2) throw ValidationError(what + " needs two comma-separated values");
  return v;
}

}  // namespace

std::vector<RewardWeights> RunConfig::curve_weights() const {
  std::vector<RewardWeights> out;
  for (double wq : curve_wq) out.push_back({wq, weight_total - wq});
  return out;
}

void RunConfig::validate() const {
  shape.validate();
  CandidateLevels(levels, shape.blocks);
  codec.validate();
  scenes.validate();
  weights.validate();
  splits.validate();
  router.validate();
  for (const auto& w : curve_weights()) w.validate();
  if (curve_wq.empty()) throw ValidationError("curves.wq is empty");
  if (calibrate_videos < 2) throw ValidationError("calibrate.videos must be >= 2");
  if (calibrate_assignments < 1) throw ValidationError("calibrate.assignments must be >= 1");
  if (curve_videos < 1) throw ValidationError("curves.videos must be >= 1");
  if (tau_points < 2) throw ValidationError("curves.tau_points must be >= 2");
  if (dataset_size < 1) throw ValidationError("dataset.size must be >= 1");
  if (search_chunk < 1 || search_chunk > shape.blocks) {
    throw ValidationError("search.chunk must be in [1, blocks]");
  }
  if (demo_visual < 1) throw ValidationError("demo.visual must be >= 1");
  if (demo_count < 1) throw ValidationError("demo.count must be >= 1");
  if (workers < 0) throw ValidationError("workers must be >= 0");
}

std::string RunConfig::serialize() const {
  std::ostringstream out;
  std::vector<std::string> kinds;
  for (auto k : scenes.kinds) kinds.emplace_back(to_string(k));
  std::string kind_text;
  for (size_t i = 0; i < kinds.size(); ++i) kind_text += (i ? "," : "") + kinds[i];
  out << "levels = " << join(levels) << "\n"
      << "blocks = " << shape.blocks << "\n"
      << "frames = " << shape.frames << "\n"
      << "height = " << shape.height << "\n"
      << "width = " << shape.width << "\n"
      << "codec.transform = " << codec.transform << "\n"
      << "codec.predictor = " << codec.predictor << "\n"
      << "scene.kinds = " << kind_text << "\n"
      << "scene.amplitude = " << join(std::vector{scenes.amplitude_min, scenes.amplitude_max}) << "\n"
      << "scene.velocity = " << join(std::vector{scenes.velocity_min, scenes.velocity_max}) << "\n"
      << "scene.texture_scale = " << join(std::vector{scenes.scale_min, scenes.scale_max}) << "\n"
      << "scene.period = " << join(std::vector{scenes.period_min, scenes.period_max}) << "\n"
      << "scene.late_onset_probability = " << format_double(scenes.late_onset_probability) << "\n"
      << "calibrate.videos = " << calibrate_videos << "\n"
      << "calibrate.assignments = " << calibrate_assignments << "\n"
      << "weights = " << join(std::vector{weights.quality, weights.length}) << "\n"
      << "curves.wq = " << join(curve_wq) << "\n"
      << "curves.weight_total = " << format_double(weight_total) << "\n"
      << "curves.videos = " << curve_videos << "\n"
      << "curves.tau_points = " << tau_points << "\n"
      << "dataset.size = " << dataset_size << "\n"
      << "dataset.split = " << join(std::vector{splits.train, splits.val, splits.test}) << "\n"
      << "router.hidden = " << router.hidden << "\n"
      << "router.batch = " << router.batch << "\n"
      << "router.learning_rate = " << format_double(router.learning_rate) << "\n"
      << "router.momentum = " << format_double(router.momentum) << "\n"
      << "router.epochs = " << router.epochs << "\n"
      << "search.chunk = " << search_chunk << "\n"
      << "demo.visual = " << demo_visual << "\n"
      << "demo.count = " << demo_count << "\n"
      << "seed = " << seed << "\n"
      << "workers = " << workers << "\n";
  return out.str();
}

RunConfig RunConfig::parse(const KeyValueText& kv) {
  for (const auto& [key, value] : kv.values()) {
    if (!known_keys().count(key)) {
      throw ValidationError(kv.where(key) + ": unknown key '" + key + "'");
    }
  }
  RunConfig c;
  auto with = [&](const std::string& key, auto&& apply) {
    if (!kv.has(key)) return;
    try {
      apply(kv.get(key));
    } catch (const Error& e) {
      throw ValidationError(kv.where(key) + ": " + key + ": " + e.what());
    }
  };
  auto as_int = [](const std::string& v, const std::string& what) {
    return static_cast<int>(parse_int64(v, what));
  };
  with("levels", [&](const auto& v) { c.levels = parse_int_list(v); });
  with("blocks", [&](const auto& v) { c.shape.blocks = as_int(v, "blocks"); });
  with("frames", [&](const auto& v) { c.shape.frames = as_int(v, "frames"); });
  with("height", [&](const auto& v) { c.shape.height = as_int(v, "height"); });
  with("width", [&](const auto& v) { c.shape.width = as_int(v, "width"); });
  with("codec.transform", [&](const auto& v) { c.codec.transform = v; });
  with("codec.predictor", [&](const auto& v) { c.codec.predictor = v; });
  with("scene.kinds", [&](const auto& v) {
    c.scenes.kinds.clear();
    for (const auto& k : split(v, ',')) {
      c.scenes.kinds.push_back(parse_scene_kind(trim_view(k)));
    }
  });
  with("scene.amplitude", [&](const auto& v) {
    auto p = pair_of(v, "scene.amplitude");
    c.scenes.amplitude_min = p[0];
    c.scenes.amplitude_max = p[1];
  });
  with("scene.velocity", [&](const auto& v) {
    auto p = pair_of(v, "scene.velocity");
    c.scenes.velocity_min = p[0];
    c.scenes.velocity_max = p[1];
  });
  with("scene.texture_scale", [&](const auto& v) {
    auto p = pair_of(v, "scene.texture_scale");
    c.scenes.scale_min = p[0];
    c.scenes.scale_max = p[1];
  });
  with("scene.period", [&](const auto& v) {
    auto p = parse_int_list(v);
    if (p.size() != 2) throw ValidationError("needs two values");
    c.scenes.period_min = p[0];
    c.scenes.period_max = p[1];
  });
  with("scene.late_onset_probability", [&](const auto& v) {
    c.scenes.late_onset_probability = parse_double(v, "scene.late_onset_probability");
  });
  with("calibrate.videos", [&](const auto& v) { c.calibrate_videos = parse_int64(v, "calibrate.videos"); });
  with("calibrate.assignments",
       [&](const auto& v) { c.calibrate_assignments = parse_int64(v, "calibrate.assignments"); });
  with("weights", [&](const auto& v) {
    auto p = pair_of(v, "weights");
    c.weights = {p[0], p[1]};
  });
  with("curves.wq", [&](const auto& v) { c.curve_wq = parse_double_list(v, "curves.wq"); });
  with("curves.weight_total",
       [&](const auto& v) { c.weight_total = parse_double(v, "curves.weight_total"); });
  with("curves.videos", [&](const auto& v) { c.curve_videos = parse_int64(v, "curves.videos"); });
  with("curves.tau_points", [&](const auto& v) { c.tau_points = as_int(v, "curves.tau_points"); });
  with("dataset.size", [&](const auto& v) { c.dataset_size = parse_int64(v, "dataset.size"); });
  with("dataset.split", [&](const auto& v) {
    auto p = parse_double_list(v, "dataset.split");
    if (p.size() != 3) throw ValidationError("needs three values");
    c.splits = {p[0], p[1], p[2]};
  });
  with("router.hidden", [&](const auto& v) { c.router.hidden = as_int(v, "router.hidden"); });
  with("router.batch", [&](const auto& v) { c.router.batch = as_int(v, "router.batch"); });
  with("router.learning_rate",
       [&](const auto& v) { c.router.learning_rate = parse_double(v, "router.learning_rate"); });
  with("router.momentum",
       [&](const auto& v) { c.router.momentum = parse_double(v, "router.momentum"); });
  with("router.epochs", [&](const auto& v) { c.router.epochs = as_int(v, "router.epochs"); });
  with("search.chunk", [&](const auto& v) { c.search_chunk = as_int(v, "search.chunk"); });
  with("demo.visual", [&](const auto& v) { c.demo_visual = as_int(v, "demo.visual"); });
  with("demo.count", [&](const auto& v) { c.demo_count = as_int(v, "demo.count"); });
  with("seed", [&](const auto& v) { c.seed = parse_uint64(v, "seed"); });
  with("workers", [&](const auto& v) { c.workers = as_int(v, "workers"); });
  c.router.seed = c.seed;
  try {
    c.validate();
  } catch (const Error& e) {
    throw ValidationError(kv.source() + ": " + e.what());
  }
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  return parse(KeyValueText::parse_file(path));
}

bool RunConfig::operator==(const RunConfig& other) const {
  return serialize() == other.serialize();
}

}  // namespace tokbudget
