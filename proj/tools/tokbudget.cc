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

// tokbudget: one subcommand per pipeline stage.
//
//   tokbudget calibrate    --config run.cfg --seed 7 --out runs/a
//   tokbudget curate       --config run.cfg --seed 7 --out runs/a
//   tokbudget train-router --config run.cfg --seed 7 --out runs/a
//   tokbudget eval-router  --config run.cfg --seed 7 --out runs/a
//   tokbudget curves       --config run.cfg --seed 7 --out runs/a [--model m]...
//   tokbudget demo-decode  --config run.cfg --seed 7 [--assignment "(2,2,2,2)"]
//
// Inputs default to the artifacts an earlier stage wrote into --out.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tokbudget/config.h"
#include "tokbudget/errors.h"
#include "tokbudget/pipeline.h"

namespace {

using namespace tokbudget;

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  std::optional<int> workers;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "key = value run configuration");
  cmd->add_option("--seed", c.seed, "overrides the config seed");
  cmd->add_option("--out", c.out, "output directory")->capture_default_str();
  cmd->add_option("--workers", c.workers, "worker threads (0 = all cores)");
}

RunConfig load(const Common& c) {
  RunConfig config = c.config_path.empty() ? RunConfig{} : RunConfig::load(c.config_path);
  if (c.seed) config.seed = *c.seed;
  if (c.workers) config.workers = *c.workers;
  config.router.seed = config.seed;
  config.validate();
  return config;
}

std::string or_default(const std::string& given, const Common& c, const char* name) {
  return given.empty() ? join_path(c.out, name) : given;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Per-block token budget search, routing, and sequence tooling."};
  app.require_subcommand(1);

  Common common;
  std::string stats_path, dataset_path, model_path, split_name = "test", assignment_text;
  std::vector<std::string> models;

  auto* calibrate_cmd = app.add_subcommand("calibrate", "estimate reward normalization stats");
  add_common(calibrate_cmd, common);

  auto* curate_cmd = app.add_subcommand("curate", "build the router training dataset");
  add_common(curate_cmd, common);
  curate_cmd->add_option("--stats", stats_path, "stats file (default <out>/stats.v1)");

  auto* train_cmd = app.add_subcommand("train-router", "train the assignment router");
  add_common(train_cmd, common);
  train_cmd->add_option("--stats", stats_path);
  train_cmd->add_option("--dataset", dataset_path);

  auto* eval_cmd = app.add_subcommand("eval-router", "score a router on a dataset split");
  add_common(eval_cmd, common);
  eval_cmd->add_option("--stats", stats_path);
  eval_cmd->add_option("--dataset", dataset_path);
  eval_cmd->add_option("--model", model_path);
  eval_cmd->add_option("--split", split_name)->check(CLI::IsMember({"train", "val", "test"}));

  auto* curves_cmd = app.add_subcommand("curves", "quality/length trade-off table");
  add_common(curves_cmd, common);
  curves_cmd->add_option("--stats", stats_path);
  curves_cmd->add_option("--model", models, "router model(s) to include");

  auto* demo_cmd = app.add_subcommand("demo-decode", "masked sampling of framed token sequences");
  add_common(demo_cmd, common);
  demo_cmd->add_option("--assignment", assignment_text, "fixed lengths, index or tuple");
  demo_cmd->add_option("--model", model_path, "router picking lengths for sampled scenes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    const RunConfig config = load(common);
    if (*calibrate_cmd) {
      std::cout << cmd_calibrate(config, common.out) << "\n";
    } else if (*curate_cmd) {
      std::cout << cmd_curate(config, or_default(stats_path, common, kStatsFile), common.out)
                << "\n";
    } else if (*train_cmd) {
      std::cout << cmd_train_router(config, or_default(dataset_path, common, kDatasetFile),
                                    or_default(stats_path, common, kStatsFile), common.out)
                << "\n";
    } else if (*eval_cmd) {
      std::cout << cmd_eval_router(config, or_default(model_path, common, kModelFile),
                                   or_default(dataset_path, common, kDatasetFile),
                                   or_default(stats_path, common, kStatsFile), common.out,
                                   parse_split(split_name))
                << "\n";
    } else if (*curves_cmd) {
      std::cout << cmd_curves(config, or_default(stats_path, common, kStatsFile), models,
                              common.out)
                << "\n";
    } else if (*demo_cmd) {
      std::optional<Assignment> forced;
      if (!assignment_text.empty()) {
        forced = parse_assignment(assignment_text, config.candidate_levels());
      }
      std::optional<std::string> model;
      if (!model_path.empty()) model = model_path;
      cmd_demo_decode(config, forced, model, std::cout);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.code() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
