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

#include <filesystem>
#include <fstream>

#include <doctest.h>

#include "emoctl/config.hpp"
#include "emoctl/runner.hpp"
#include "emoctl/trace_io.hpp"

using namespace emoctl;
namespace fs = std::filesystem;

namespace {

fs::path repo_configs() { return fs::path(EMOCTL_REPO_DIR) / "configs"; }

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag)
      : path(fs::temp_directory_path() / ("emoctl_test_" + tag)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

nlohmann::json parse_file(const fs::path& path) {
  return nlohmann::json::parse(slurp(path));
}

}  // namespace

TEST_CASE("config: the committed reference files match the in-code factories") {
  CHECK(parse_file(repo_configs() / "reference.json") ==
        nlohmann::json::parse(run_config_to_json(reference_config()).dump()));
  CHECK(parse_file(repo_configs() / "scenario_reference.json") ==
        nlohmann::json::parse(scenario_to_json(reference_scenario()).dump()));
  CHECK(parse_file(repo_configs() / "scenario_lonely.json") ==
        nlohmann::json::parse(scenario_to_json(lonely_scenario()).dump()));
  CHECK(parse_file(repo_configs() / "scenario_threat.json") ==
        nlohmann::json::parse(scenario_to_json(threat_scenario()).dump()));
  CHECK(parse_file(repo_configs() / "scenario_comfort.json") ==
        nlohmann::json::parse(scenario_to_json(comfort_scenario()).dump()));
}

TEST_CASE("config: loading the committed reference file works end to end") {
  const RunConfig config = load_run_config((repo_configs() / "reference.json").string());
  CHECK(config.seed == 42);
  CHECK(config.steps == 200);
  CHECK(config.controller.channels() == 2);
  CHECK(config.controller.drives() == 3);
  CHECK(config.scenario.peer_positions.size() == 5);
}

TEST_CASE("config: unknown keys are rejected everywhere") {
  nlohmann::json j =
      nlohmann::json::parse(run_config_to_json(reference_config()).dump());
  j["surprise"] = 1;
  CHECK_THROWS_AS(parse_run_config(j), ConfigError);

  j = nlohmann::json::parse(run_config_to_json(reference_config()).dump());
  j["controller"]["fusion"]["betaa"] = 0.5;
  CHECK_THROWS_AS(parse_run_config(j), ConfigError);

  nlohmann::json s =
      nlohmann::json::parse(scenario_to_json(reference_scenario()).dump());
  s["needs"]["bonus_need"] = 1;
  CHECK_THROWS_AS(parse_scenario(s), ConfigError);
}

TEST_CASE("config: missing keys are rejected") {
  nlohmann::json j =
      nlohmann::json::parse(run_config_to_json(reference_config()).dump());
  j.erase("seed");
  CHECK_THROWS_AS(parse_run_config(j), ConfigError);
}

TEST_CASE("config: documented ranges are enforced") {
  RunConfig config = reference_config();
  config.controller.mood.gamma = 0.5;
  CHECK_THROWS_AS(validate(config), ConfigError);

  config = reference_config();
  config.controller.tau_policy = TemperatureSchedule{0.25, 2.0};
  CHECK_THROWS_AS(validate(config), ConfigError);

  config = reference_config();
  config.controller.hints.alpha_need = -1.0;
  CHECK_THROWS_AS(validate(config), ConfigError);

  config = reference_config();
  config.memory.capacity = 0;
  CHECK_THROWS_AS(validate(config), ConfigError);

  config = reference_config();
  config.scenario.needs.targets = Eigen::VectorXd::Constant(4, 1.0);  // L must be 2 or 3
  CHECK_THROWS_AS(validate(config), ConfigError);
}

TEST_CASE("format_double: 17 significant digits round-trip exactly") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-7, 3.14159265358979323846, 1e300, -0.0, 5.0}) {
    const std::string text = format_double(v);
    const double parsed = std::stod(text);
    CHECK(std::bit_cast<std::uint64_t>(parsed) == std::bit_cast<std::uint64_t>(v));
  }
  CHECK_THROWS_AS(format_double(std::numeric_limits<double>::quiet_NaN()),
                  std::invalid_argument);
}

TEST_CASE("traces: serialize/parse round-trips byte-identically") {
  RunConfig config = reference_config();
  config.steps = 10;
  const RunArtifacts artifacts = run_simulation(config);
  for (const TickTrace& trace : artifacts.traces) {
    const std::string line = trace_to_json_line(trace);
    const TickTrace parsed = trace_from_json(nlohmann::json::parse(line));
    CHECK(trace_to_json_line(parsed) == line);
  }
}

TEST_CASE("cmd_run: writes the documented artifacts and is byte-deterministic") {
  const TempDir dir_a("run_a");
  const TempDir dir_b("run_b");
  const std::string config_path = (repo_configs() / "reference.json").string();
  RunOverrides overrides;
  overrides.steps = 15;
  REQUIRE(cmd_run(config_path, dir_a.path.string(), overrides) == kExitOk);
  REQUIRE(cmd_run(config_path, dir_b.path.string(), overrides) == kExitOk);
  for (const char* name : {kTracesFile, kMetricsFile, kFrozenHashFile, kManifestFile}) {
    CHECK(fs::exists(dir_a.path / name));
    CHECK(slurp(dir_a.path / name) == slurp(dir_b.path / name));
  }
}

TEST_CASE("cmd_run: zero steps yields empty traces and a header-only metrics file") {
  const TempDir dir("run_zero");
  RunOverrides overrides;
  overrides.steps = 0;
  REQUIRE(cmd_run((repo_configs() / "reference.json").string(), dir.path.string(),
                  overrides) == kExitOk);
  CHECK(slurp(dir.path / kTracesFile).empty());
  const std::string metrics = slurp(dir.path / kMetricsFile);
  CHECK(metrics.find("tick,nearest_peer_distance") == 0);
  CHECK(std::count(metrics.begin(), metrics.end(), '\n') == 1);
}

TEST_CASE("cmd_run: the SECOND_READER injector exits with the SIC status") {
  const TempDir dir("run_sic");
  RunOverrides overrides;
  overrides.steps = 5;
  overrides.injector = "SECOND_READER";
  CHECK(cmd_run((repo_configs() / "reference.json").string(), dir.path.string(),
                overrides) == kExitSicViolation);
}

TEST_CASE("cmd_audit: green on a reference run, red with an injector") {
  const TempDir dir("audit_green");
  const std::string config_path = (repo_configs() / "reference.json").string();
  RunOverrides overrides;
  overrides.steps = 20;
  REQUIRE(cmd_run(config_path, dir.path.string(), overrides) == kExitOk);
  CHECK(cmd_audit(config_path, dir.path.string(), overrides) == kExitOk);
  CHECK(fs::exists(dir.path / kAuditFile));

  const TempDir red("audit_red");
  RunOverrides tainted = overrides;
  tainted.injector = "IDENTITY_KEY";
  REQUIRE(cmd_run(config_path, red.path.string(), tainted) == kExitOk);
  CHECK(cmd_audit(config_path, red.path.string(), tainted) == kExitCheckFailed);
  const nlohmann::json report = parse_file(red.path / kAuditFile);
  CHECK(report.at("all_pass") == false);
}

TEST_CASE("cmd_audit: missing artifacts give the I/O status") {
  const TempDir dir("audit_missing");
  CHECK(cmd_audit((repo_configs() / "reference.json").string(), dir.path.string(),
                  RunOverrides{}) == kExitIoError);
}

TEST_CASE("cmd_replay: verifies golden traces and catches tampering") {
  const TempDir dir("replay");
  const std::string config_path = (repo_configs() / "reference.json").string();
  RunOverrides overrides;
  overrides.steps = 12;
  REQUIRE(cmd_run(config_path, dir.path.string(), overrides) == kExitOk);
  CHECK(cmd_replay(config_path, dir.path.string(), overrides) == kExitOk);

  // flip one digit inside the q vector of some line
  std::string traces = slurp(dir.path / kTracesFile);
  const std::size_t q_pos = traces.find("\"q\":[");
  REQUIRE(q_pos != std::string::npos);
  std::size_t digit = traces.find_first_of("123456789", q_pos);
  traces[digit] = traces[digit] == '1' ? '2' : '1';
  std::ofstream(dir.path / kTracesFile, std::ios::binary) << traces;
  CHECK(cmd_replay(config_path, dir.path.string(), overrides) == kExitCheckFailed);
}

TEST_CASE("cmd_replay: an empty trace file passes vacuously") {
  const TempDir dir("replay_empty");
  std::ofstream(dir.path / kTracesFile, std::ios::binary) << "";
  CHECK(cmd_replay((repo_configs() / "reference.json").string(), dir.path.string(),
                   RunOverrides{}) == kExitOk);
}

TEST_CASE("cmd_sweep: disjoint seeds, one summary") {
  const TempDir dir("sweep");
  RunOverrides overrides;
  overrides.steps = 8;
  REQUIRE(cmd_sweep((repo_configs() / "reference.json").string(), dir.path.string(), 3,
                    overrides) == kExitOk);
  CHECK(fs::exists(dir.path / "summary.csv"));
  CHECK(fs::exists(dir.path / "seed_42" / kTracesFile));
  CHECK(fs::exists(dir.path / "seed_44" / kTracesFile));
  // different seeds must not produce identical traces in a stochastic world
  CHECK(slurp(dir.path / "seed_42" / kTracesFile) !=
        slurp(dir.path / "seed_44" / kTracesFile));
}

TEST_CASE("metrics: header matches the documented column order") {
  CHECK(metrics_header(3) ==
        "tick,nearest_peer_distance,need_disc_0,need_disc_1,need_disc_2,"
        "policy_entropy,policy_argmax,succ,memory_size");
}
