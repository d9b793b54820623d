// Copyright 2026 The emoctl Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <optional>
#include <string>

#include <CLI11.hpp>

#include "emoctl/runner.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> steps;
  std::optional<std::string> injector;
  bool ablate_memory = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_run_flags) {
  cmd->add_option("--config", args.config_path, "run configuration file (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out-dir", args.out_dir, "artifact directory");
  if (with_run_flags) {
    cmd->add_option("--seed", args.seed, "override the config seed");
    cmd->add_option("--steps", args.steps, "override the tick count");
    cmd->add_option("--injector", args.injector,
                    "apply a named violation injector (audit negative control)");
    cmd->add_flag("--ablate-memory", args.ablate_memory,
                  "replace every retrieval with the empty result");
  }
}

emoctl::RunOverrides to_overrides(const CommonArgs& args) {
  emoctl::RunOverrides overrides;
  overrides.seed = args.seed;
  overrides.steps = args.steps;
  overrides.injector = args.injector;
  if (args.ablate_memory) overrides.ablate_memory = true;
  return overrides;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"emotion-like control loop: seeded runs, audits, replay"};
  app.require_subcommand(1);

  CommonArgs run_args, audit_args, replay_args, sweep_args;
  int num_seeds = 10;

  CLI::App* run = app.add_subcommand("run", "execute a seeded run and write artifacts");
  add_common(run, run_args, true);

  CLI::App* audit =
      app.add_subcommand("audit", "run the R1-R4 checks against run artifacts");
  add_common(audit, audit_args, true);

  CLI::App* replay =
      app.add_subcommand("replay", "verify logged traces against recomputed outputs");
  add_common(replay, replay_args, false);

  CLI::App* sweep = app.add_subcommand("sweep", "run consecutive seeds into one directory");
  add_common(sweep, sweep_args, true);
  sweep->add_option("--seeds", num_seeds, "number of consecutive seeds");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    return emoctl::cmd_run(run_args.config_path, run_args.out_dir, to_overrides(run_args));
  }
  if (audit->parsed()) {
    return emoctl::cmd_audit(audit_args.config_path, audit_args.out_dir,
                             to_overrides(audit_args));
  }
  if (replay->parsed()) {
    return emoctl::cmd_replay(replay_args.config_path, replay_args.out_dir,
                              to_overrides(replay_args));
  }
  return emoctl::cmd_sweep(sweep_args.config_path, sweep_args.out_dir, num_seeds,
                           to_overrides(sweep_args));
}
