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

#ifndef EMOCTL_CONFIG_HPP
#define EMOCTL_CONFIG_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "emoctl/controller.hpp"
#include "emoctl/memory.hpp"
#include "emoctl/world.hpp"

namespace emoctl {

inline constexpr const char* kConfigSchemaVersion = "emoctl-config-1";
inline constexpr const char* kScenarioSchemaVersion = "emoctl-scenario-1";

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MemoryParams {
  int capacity = 256;
  double combine_lambda = 0.5;
  ReconcileConfig reconcile;
};

struct FeatureFlags {
  int reconcile_interval = 0;  // 0 disables the offline maintenance pass
  bool ablate_memory = false;
  std::string injector;  // empty = none; otherwise an InjectorId name
  bool trace_enabled = true;
};

/// Everything a run needs. Loaded strictly: unknown keys anywhere in the
/// config or scenario files are errors.
struct RunConfig {
  std::uint64_t seed = 42;
  int steps = 200;
  std::string scenario_path;  // as written in the config file
  Scenario scenario;
  ControllerParams controller;
  MemoryParams memory;
  FeatureFlags features;
  std::string out_dir;  // from the command line, not the file
};

/// Parses and validates; `scenario` must already be resolved when parsing a
/// bare config object (load_run_config does both).
RunConfig parse_run_config(const nlohmann::json& j);
Scenario parse_scenario(const nlohmann::json& j);

/// Reads the config file; resolves scenario_path relative to the config
/// file's directory.
RunConfig load_run_config(const std::string& path);

nlohmann::ordered_json run_config_to_json(const RunConfig& config);
nlohmann::ordered_json scenario_to_json(const Scenario& scenario);

/// Cross-field validation: ranges, dimensions, injector name.
void validate(const RunConfig& config);
void validate(const Scenario& scenario);

/// The reference configuration: 2 affect channels (lonely-like,
/// crowded-like), 3 need channels (affiliation, independence, safety), the
/// five-policy hint routing, and a mixed crowd scenario.
RunConfig reference_config();
Scenario reference_scenario();

/// Desk-scale scenarios used by the behavioral checks.
Scenario lonely_scenario();
Scenario threat_scenario();
Scenario comfort_scenario();

StoreConfig store_config_from(const RunConfig& config, bool audit_access = false);

}  // namespace emoctl

#endif  // EMOCTL_CONFIG_HPP
