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

#ifndef EMOCTL_RUNNER_HPP
#define EMOCTL_RUNNER_HPP

#include <optional>
#include <string>
#include <vector>

#include "emoctl/audit.hpp"
#include "emoctl/config.hpp"
#include "emoctl/controller.hpp"
#include "emoctl/trace_io.hpp"

namespace emoctl {

/// Process exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;  // audit red, replay mismatch
inline constexpr int kExitSicViolation = 2;
inline constexpr int kExitIoError = 3;
inline constexpr int kExitConfigError = 4;

struct RunArtifacts {
  std::vector<TickTrace> traces;
  std::vector<MetricsRow> metrics;
  std::string hash_pre;
  std::string hash_post;
  DataflowManifest manifest;
  int status = kExitOk;
  std::string diagnostic;  // names the violated clause on abort
};

/// Executes the configured run in memory: tick loop, periodic reconcile
/// between ticks, injector perturbations, frozen-parameter hashes.
/// initial_episodes seeds the store before the first tick.
RunArtifacts run_simulation(const RunConfig& config,
                            const std::vector<Episode>* initial_episodes = nullptr);

/// Runs the full R1..R4 check battery against run artifacts. The injector
/// named in the config selects the retrieval pathway probed by R3b.
AuditReport run_audit(const RunConfig& config, const DataflowManifest& manifest,
                      const std::vector<TickTrace>& traces, const std::string& hash_pre,
                      const std::string& hash_post);

struct ReplayResult {
  bool ok = true;
  int ticks_checked = 0;
  std::string diagnostic;  // first mismatching tick and field
};

/// Re-executes the controller math from each trace's logged inputs and
/// compares every logged output bit-for-bit. Validates witness (non-injected)
/// runs.
ReplayResult replay_traces(const RunConfig& config, const std::vector<TickTrace>& traces);

// ---------------------------------------------------------------------------
// File-level commands (used by the CLI; return process exit codes)
// ---------------------------------------------------------------------------

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> steps;
  std::optional<std::string> injector;
  std::optional<bool> ablate_memory;
};

inline constexpr const char* kTracesFile = "traces.jsonl";
inline constexpr const char* kMetricsFile = "metrics.csv";
inline constexpr const char* kFrozenHashFile = "frozen_hash.json";
inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kAuditFile = "audit.json";

int cmd_run(const std::string& config_path, const std::string& out_dir,
            const RunOverrides& overrides);
int cmd_audit(const std::string& config_path, const std::string& out_dir,
              const RunOverrides& overrides);
int cmd_replay(const std::string& config_path, const std::string& out_dir,
               const RunOverrides& overrides);
int cmd_sweep(const std::string& config_path, const std::string& out_dir, int num_seeds,
              const RunOverrides& overrides);

}  // namespace emoctl

#endif  // EMOCTL_RUNNER_HPP
