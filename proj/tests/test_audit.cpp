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

#include "emoctl/audit.hpp"

#include <doctest.h>

#include "emoctl/runner.hpp"

using namespace emoctl;

namespace {

RunConfig short_reference_run() {
  RunConfig config = reference_config();
  config.steps = 25;
  return config;
}

}  // namespace

TEST_CASE("manifest: reference validates and round-trips through JSON") {
  const RunConfig config = short_reference_run();
  const DataflowManifest manifest = reference_manifest(config);
  CHECK_NOTHROW(validate_manifest(manifest));
  const DataflowManifest reparsed = manifest_from_json(manifest_to_json(manifest));
  CHECK(manifest_to_json(reparsed) == manifest_to_json(manifest));
}

TEST_CASE("manifest: structural defects are rejected") {
  const RunConfig config = short_reference_run();
  DataflowManifest manifest = reference_manifest(config);
  manifest.signals[0].consumers.push_back("daydreamer");  // undeclared module
  CHECK_THROWS_AS(validate_manifest(manifest), std::invalid_argument);

  manifest = reference_manifest(config);
  manifest.signals.push_back(manifest.signals.front());  // duplicate name
  CHECK_THROWS_AS(validate_manifest(manifest), std::invalid_argument);

  manifest = reference_manifest(config);
  manifest.signals[0].schema = "freeform";  // unknown tag
  CHECK_THROWS_AS(validate_manifest(manifest), std::invalid_argument);
}

TEST_CASE("audit_r1: reference manifest passes; extra reader fails") {
  const RunConfig config = short_reference_run();
  const DataflowManifest reference = reference_manifest(config);
  CHECK(audit_r1(reference).pass);

  DataflowManifest two_readers = reference;
  two_readers.modules.push_back("planner");
  two_readers.memory_access.readers.push_back("planner");
  const CheckResult r = audit_r1(two_readers);
  CHECK_FALSE(r.pass);
  CHECK(r.measured.at("memory_readers") == 2.0);
}

TEST_CASE("audit_r1: content-general fan-out fails, typed fan-out passes") {
  const RunConfig config = short_reference_run();
  DataflowManifest manifest = reference_manifest(config);
  // the observation already fans out to three consumers as a typed signal
  CHECK(audit_r1(manifest).pass);
  for (SignalDecl& s : manifest.signals) {
    if (s.name == "observation") s.schema = "content-general";
  }
  CHECK_FALSE(audit_r1(manifest).pass);
}

TEST_CASE("audit_r2: reference run passes; telemetry provenance input fails") {
  const RunConfig config = short_reference_run();
  const RunArtifacts artifacts = run_simulation(config);
  CHECK(audit_r2(artifacts.manifest, artifacts.traces).pass);

  DataflowManifest tainted = artifacts.manifest;
  for (SignalDecl& s : tainted.signals) {
    if (s.name == "needs") s.provenance = "telemetry";
  }
  CHECK_FALSE(audit_r2(tainted, artifacts.traces).pass);

  DataflowManifest ascribing = artifacts.manifest;
  for (SignalDecl& s : ascribing.signals) {
    if (s.name == "needs") s.self_ascribing = true;
  }
  CHECK_FALSE(audit_r2(ascribing, artifacts.traces).pass);
}

TEST_CASE("audit_r2: a piped-back output value is detected in the sweep") {
  const RunConfig config = short_reference_run();
  RunArtifacts artifacts = run_simulation(config);
  REQUIRE(artifacts.traces.size() >= 3);
  // splice one controller output from tick 0 into tick 2's observation
  artifacts.traces[2].x.peers[0].bearing = artifacts.traces[0].z.valence[0];
  const CheckResult r = audit_r2(artifacts.manifest, artifacts.traces);
  CHECK_FALSE(r.pass);
  CHECK(r.measured.at("feedback_matches") >= 1.0);
}

TEST_CASE("audit_r2: no telemetry at all passes trivially") {
  const RunConfig config = short_reference_run();
  const DataflowManifest manifest = reference_manifest(config);
  const CheckResult r = audit_r2(manifest, {});
  CHECK(r.pass);
  CHECK(r.measured.at("ticks_swept") == 0.0);
}

TEST_CASE("audit_r3a: reference passes; tampered key or bad provenance fails") {
  const RunConfig config = short_reference_run();
  RunArtifacts artifacts = run_simulation(config);
  CHECK(audit_r3_key_hygiene(artifacts.traces, artifacts.manifest, config.scenario).pass);

  DataflowManifest manifest = artifacts.manifest;
  manifest.key_inputs.push_back("time");
  CHECK_FALSE(audit_r3_key_hygiene(artifacts.traces, manifest, config.scenario).pass);

  artifacts.traces[1].c.c[0] += 1e-9;  // not the categorizer output anymore
  CHECK_FALSE(
      audit_r3_key_hygiene(artifacts.traces, artifacts.manifest, config.scenario).pass);
}

TEST_CASE("audit_r3b: reference probe is invariant; summary-tainted probe is caught") {
  const RunConfig config = short_reference_run();
  const StoreConfig sc = store_config_from(config);
  const ShuffleFixture fixture = make_shuffle_fixture(sc);

  const CheckResult good =
      audit_r3_shuffle(reference_retrieval_probe(sc), fixture, 3, 20, 99);
  CHECK(good.pass);
  CHECK(good.measured.at("worst_shuffle_difference") <= 1e-12);

  const CheckResult bad = audit_r3_shuffle(summary_tainted_probe(sc), fixture, 3, 20, 99);
  CHECK_FALSE(bad.pass);
}

TEST_CASE("audit_r3b: a single-episode memory is trivially invariant") {
  const RunConfig config = short_reference_run();
  const StoreConfig sc = store_config_from(config);
  ShuffleFixture fixture = make_shuffle_fixture(sc);
  fixture.episodes.resize(1);
  CHECK(audit_r3_shuffle(reference_retrieval_probe(sc), fixture, 3, 10, 7).pass);
}

TEST_CASE("audit_r3c: measured mood window matches the declared bound") {
  const CheckResult r = audit_r3_mood_window(MoodParams{true, 0.9}, 2, 3);
  CHECK(r.pass);
  CHECK(r.measured.at("influence_lag0") == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(r.measured.at("declared_bound_lag") == 66.0);
  CHECK(r.measured.at("crossing_lag") <= 66.0);

  const CheckResult disabled = audit_r3_mood_window(MoodParams{false, 0.95}, 2, 3);
  CHECK(disabled.pass);
  CHECK(disabled.measured.at("influence_lag0") == 0.0);
}

TEST_CASE("audit_r4: hash equality and optimizer absence") {
  const RunConfig config = short_reference_run();
  const DataflowManifest manifest = reference_manifest(config);
  CHECK(audit_r4("abc123", "abc123", manifest).pass);
  CHECK_FALSE(audit_r4("abc123", "abc124", manifest).pass);
  CHECK_FALSE(audit_r4("", "", manifest).pass);

  DataflowManifest with_optimizer = manifest;
  with_optimizer.optimizers.push_back("adam");
  CHECK_FALSE(audit_r4("abc123", "abc123", with_optimizer).pass);

  DataflowManifest unfrozen = manifest;
  unfrozen.parameter_groups[0].frozen = false;
  CHECK_FALSE(audit_r4("abc123", "abc123", unfrozen).pass);
}

TEST_CASE("audit: zero-tick run passes everything trivially") {
  RunConfig config = short_reference_run();
  config.steps = 0;
  const RunArtifacts artifacts = run_simulation(config);
  CHECK(artifacts.traces.empty());
  const AuditReport report = run_audit(config, artifacts.manifest, artifacts.traces,
                                       artifacts.hash_pre, artifacts.hash_post);
  CHECK(report.all_pass());
}

TEST_CASE("audit: report covers every check and declares its scope") {
  const RunConfig config = short_reference_run();
  const RunArtifacts artifacts = run_simulation(config);
  const AuditReport report = run_audit(config, artifacts.manifest, artifacts.traces,
                                       artifacts.hash_pre, artifacts.hash_post);
  REQUIRE(report.checks.size() == 6);
  const char* expected[] = {"R1", "R2", "R3a", "R3b", "R3c", "R4"};
  for (int i = 0; i < 6; ++i) CHECK(report.checks[i].id == expected[i]);
  CHECK_FALSE(report.scope_note.empty());
  CHECK(report.all_pass());
}

TEST_CASE("audit: reports are byte-deterministic") {
  const RunConfig config = short_reference_run();
  const RunArtifacts artifacts = run_simulation(config);
  const AuditReport a = run_audit(config, artifacts.manifest, artifacts.traces,
                                  artifacts.hash_pre, artifacts.hash_post);
  const AuditReport b = run_audit(config, artifacts.manifest, artifacts.traces,
                                  artifacts.hash_pre, artifacts.hash_post);
  CHECK(report_to_json(a).dump() == report_to_json(b).dump());
}

TEST_CASE("injectors: second reader aborts the run citing SIC-1") {
  RunConfig config = short_reference_run();
  config.features.injector = "SECOND_READER";
  const RunArtifacts artifacts = run_simulation(config);
  CHECK(artifacts.status == kExitSicViolation);
  CHECK(artifacts.diagnostic.find("SIC-1") != std::string::npos);
  CHECK(artifacts.traces.empty());
  CHECK(artifacts.hash_pre == artifacts.hash_post);
}

TEST_CASE("injectors: unknown names are rejected at config validation") {
  RunConfig config = short_reference_run();
  config.features.injector = "GREMLIN";
  CHECK_THROWS_AS(validate(config), ConfigError);
}
