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

#include "emoctl/runner.hpp"

#include <bit>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace emoctl {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

bool bits_equal(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

bool bits_equal(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) return false;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (!bits_equal(a[i], b[i])) return false;
  }
  return true;
}

bool bits_equal(const AffectState& a, const AffectState& b) {
  return bits_equal(a.valence, b.valence) && bits_equal(a.magnitude, b.magnitude) &&
         bits_equal(a.arousal, b.arousal) && bits_equal(a.drive, b.drive);
}

bool params_equal(const InstantiationParams& a, const InstantiationParams& b) {
  return bits_equal(a.bearing_to_peers, b.bearing_to_peers) &&
         a.peers_valid == b.peers_valid &&
         bits_equal(a.distance_to_nearest_peer, b.distance_to_nearest_peer) &&
         bits_equal(a.bearing_to_threat, b.bearing_to_threat) &&
         a.threat_valid == b.threat_valid &&
         bits_equal(a.bearing_to_safe_region, b.bearing_to_safe_region) &&
         a.safe_region_valid == b.safe_region_valid;
}

Categorizer make_categorizer(const Scenario& scenario,
                             std::optional<InjectorId> injector) {
  Categorizer base = [scenario](const Observation& x) { return categorize(x, scenario); };
  if (injector == InjectorId::kIdentityKey) {
    // Mixes a fixed agent-identity direction into every key.
    return [base](const Observation& x) {
      auto [c, y] = base(x);
      Eigen::VectorXd tainted = c.c;
      tainted[1] += 0.05;
      c.c = tainted / tainted.norm();
      return std::make_pair(c, y);
    };
  }
  if (injector == InjectorId::kTimestampKey) {
    // Rotates a call-counter direction into every key.
    auto counter = std::make_shared<int>(0);
    return [base, counter](const Observation& x) {
      auto [c, y] = base(x);
      Eigen::VectorXd tainted = c.c;
      tainted[*counter % kCategoryDim] += 0.05;
      ++*counter;
      c.c = tainted / tainted.norm();
      return std::make_pair(c, y);
    };
  }
  return base;
}

void taint_observation_with_trace(Observation& x, const TickTrace& previous) {
  // Pipe the previous tick's fused affect into the peer slots, two values
  // per slot.
  const Eigen::VectorXd z = previous.z.flatten();
  Eigen::Index zi = 0;
  for (PeerSlot& slot : x.peers) {
    if (zi >= z.size()) break;
    slot.bearing = z[zi++];
    if (zi >= z.size()) break;
    slot.distance = z[zi++];
  }
}

}  // namespace

RunArtifacts run_simulation(const RunConfig& config,
                            const std::vector<Episode>* initial_episodes) {
  validate(config);
  const std::optional<InjectorId> injector = parse_injector(config.features.injector);

  RunArtifacts out;
  const Scenario& scenario = config.scenario;
  WorldState world = make_world(scenario, derive_stream(config.seed, "world"));
  EpisodeStore store(store_config_from(config));
  const WriterToken writer = store.make_writer();
  const ReaderToken reader = store.make_reader();
  if (initial_episodes != nullptr) store.load(writer, *initial_episodes);

  Controller controller(config.controller, config.seed);
  out.manifest = reference_manifest(config);
  if (injector) apply_injector_to_manifest(*injector, out.manifest);
  out.hash_pre = param_group_hash(controller.params());

  if (injector == InjectorId::kSecondReader) {
    try {
      [[maybe_unused]] ReaderToken second = store.make_reader();
      out.diagnostic = "second reader was granted; store failed to enforce SIC-1";
      out.status = kExitSicViolation;
    } catch (const SicViolation& e) {
      out.diagnostic = std::string("run aborted, ") + e.what();
      out.status = kExitSicViolation;
    }
    out.hash_post = param_group_hash(controller.params());
    return out;
  }

  const Collaborators collaborators{
      make_categorizer(scenario, injector),
      [&scenario](const CategoryVector& c, const InstantiationParams& y,
                  const Observation& x) { return assess_needs(c, y, x, scenario.needs); },
      [&world, &scenario](ActionId action) {
        execute(world, scenario, action);
        return observe(world, scenario);
      }};
  const MemoryBinding binding{&store, &reader, &writer};

  try {
    for (int t = 0; t < config.steps; ++t) {
      Observation x = observe(world, scenario);
      if (injector == InjectorId::kTelemetryFeedback && !out.traces.empty()) {
        taint_observation_with_trace(x, out.traces.back());
      }
      TickTrace trace =
          controller.tick(x, collaborators, binding, config.features.ablate_memory);
      out.metrics.push_back(metrics_from_trace(trace, store.size()));
      if (config.features.trace_enabled) out.traces.push_back(std::move(trace));

      if (injector == InjectorId::kUnfrozenParam && t == config.steps / 2) {
        // Someone turns a control gain mid-deployment.
        ControllerParams mutated = controller.params();
        mutated.hints.need_map(0, 0) += 0.01;
        Controller replacement(mutated, config.seed);
        replacement.restore_state(controller.mood(), controller.ticks_run());
        controller = std::move(replacement);
      }

      if (config.features.reconcile_interval > 0 &&
          (t + 1) % config.features.reconcile_interval == 0) {
        store.reconcile(config.memory.reconcile);
      }
    }
  } catch (const SicViolation& e) {
    out.diagnostic = std::string("run aborted, ") + e.what();
    out.status = kExitSicViolation;
  }

  out.hash_post = param_group_hash(controller.params());
  return out;
}

AuditReport run_audit(const RunConfig& config, const DataflowManifest& manifest,
                      const std::vector<TickTrace>& traces, const std::string& hash_pre,
                      const std::string& hash_post) {
  const std::optional<InjectorId> injector = parse_injector(config.features.injector);
  const StoreConfig store_config = store_config_from(config);
  const RetrievalProbe probe = injector == InjectorId::kCrossEpisodeSummary
                                   ? summary_tainted_probe(store_config)
                                   : reference_retrieval_probe(store_config);

  AuditReport report;
  report.scope_note =
      "explicit architectural tests only; implicit-test rows (probes on learned "
      "representations) are out of scope because this build has no learned components";
  report.checks.push_back(audit_r1(manifest));
  report.checks.push_back(audit_r2(manifest, traces));
  report.checks.push_back(audit_r3_key_hygiene(traces, manifest, config.scenario));
  report.checks.push_back(audit_r3_shuffle(probe, make_shuffle_fixture(store_config),
                                           config.controller.top_k, 20, config.seed));
  report.checks.push_back(audit_r3_mood_window(config.controller.mood,
                                               config.controller.channels(),
                                               config.controller.drives()));
  report.checks.push_back(audit_r4(hash_pre, hash_post, manifest));
  return report;
}

ReplayResult replay_traces(const RunConfig& config, const std::vector<TickTrace>& traces) {
  ReplayResult result;
  const Scenario& scenario = config.scenario;
  const ControllerParams& p = config.controller;
  MoodBuffer mood = make_mood(p.mood, p.channels(), p.drives());

  auto mismatch = [&result](int tick, const std::string& field) {
    result.ok = false;
    result.diagnostic = "tick " + std::to_string(tick) + ": logged '" + field +
                        "' does not match the recomputed value";
  };

  for (const TickTrace& t : traces) {
    const auto [c, y] = categorize(t.x, scenario);
    if (!bits_equal(c.c, t.c.c)) return mismatch(t.tick, "c"), result;
    if (!params_equal(y, t.y)) return mismatch(t.tick, "y"), result;

    const Needs needs = assess_needs(c, y, t.x, scenario.needs);
    if (!bits_equal(needs.values, t.needs.values) ||
        !bits_equal(needs.targets, t.needs.targets)) {
      return mismatch(t.tick, "needs"), result;
    }
    const AffectState z_need = affect_from_needs(needs, p.affect);
    if (!bits_equal(z_need, t.z_need)) return mismatch(t.tick, "z_need"), result;
    const PolicyHints h_need = need_hints(z_need, p.traits, p.hints);
    if (!bits_equal(h_need.scores, t.h_need.scores)) {
      return mismatch(t.tick, "h_need"), result;
    }

    // The retrieval result is an input here: memory state is not replayed.
    const AffectState* mood_bias = p.mood.enabled ? &mood.average : nullptr;
    const AffectState z = fuse_affect(z_need, t.retrieval.z_mem, t.retrieval.reliability,
                                      p.fusion, mood_bias);
    if (!bits_equal(z, t.z)) return mismatch(t.tick, "z"), result;
    const PolicyHints h_aff = affect_hints(z, p.hints);
    const PolicyHints h = fuse_hints(h_need, t.retrieval.h_mem, h_aff, p.hints);
    if (!bits_equal(h.scores, t.h.scores)) return mismatch(t.tick, "h"), result;
    const Eigen::VectorXd q = policy_distribution(h, z.arousal, p.tau_policy);
    if (!bits_equal(q, t.q)) return mismatch(t.tick, "q"), result;
    const Eigen::VectorXd s = score_actions(q, y, p.templates);
    if (!bits_equal(s, t.action_scores)) return mismatch(t.tick, "s"), result;

    Rng action_rng(derive_stream(config.seed, "action", static_cast<std::uint64_t>(t.tick)));
    const ActionId action = select_action(s, z.arousal, p.selection, p.tau_action, action_rng);
    if (action != t.action) return mismatch(t.tick, "action"), result;

    const auto [c_post, y_post] = categorize(t.x_post, scenario);
    if (!bits_equal(c_post.c, t.c_post.c)) return mismatch(t.tick, "c_post"), result;
    if (!params_equal(y_post, t.y_post)) return mismatch(t.tick, "y_post"), result;
    const Needs needs_post = assess_needs(c_post, y_post, t.x_post, scenario.needs);
    if (!bits_equal(needs_post.values, t.needs_post.values)) {
      return mismatch(t.tick, "needs_post"), result;
    }
    const AffectState z_need_post = affect_from_needs(needs_post, p.affect);
    const auto [z_post, succ] = reappraise(z, needs, needs_post, z_need_post, p.success);
    if (!bits_equal(z_post, t.z_post)) return mismatch(t.tick, "z_post"), result;
    if (!bits_equal(succ, t.succ)) return mismatch(t.tick, "succ"), result;

    if (p.mood.enabled) mood = update_mood(mood, z);
    ++result.ticks_checked;
  }
  return result;
}

// ---------------------------------------------------------------------------
// File-level commands
// ---------------------------------------------------------------------------

namespace {

RunConfig load_with_overrides(const std::string& config_path, const std::string& out_dir,
                              const RunOverrides& overrides) {
  RunConfig config = load_run_config(config_path);
  if (overrides.seed) config.seed = *overrides.seed;
  if (overrides.steps) config.steps = *overrides.steps;
  if (overrides.injector) config.features.injector = *overrides.injector;
  if (overrides.ablate_memory) config.features.ablate_memory = *overrides.ablate_memory;
  config.out_dir = out_dir;
  validate(config);
  return config;
}

void write_text(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << contents;
}

}  // namespace

namespace {

void write_run_artifacts(const std::string& out_dir, const RunConfig& config,
                         const RunArtifacts& artifacts) {
  fs::create_directories(out_dir);
  if (config.features.trace_enabled) {
    save_traces((fs::path(out_dir) / kTracesFile).string(), artifacts.traces);
  }
  save_metrics((fs::path(out_dir) / kMetricsFile).string(), artifacts.metrics,
               config.controller.drives());
  ordered_json hashes;
  hashes["pre"] = artifacts.hash_pre;
  hashes["post"] = artifacts.hash_post;
  write_text(fs::path(out_dir) / kFrozenHashFile, hashes.dump(2) + "\n");
  write_text(fs::path(out_dir) / kManifestFile,
             manifest_to_json(artifacts.manifest).dump(2) + "\n");
}

}  // namespace

int cmd_run(const std::string& config_path, const std::string& out_dir,
            const RunOverrides& overrides) {
  RunConfig config;
  try {
    config = load_with_overrides(config_path, out_dir, overrides);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }

  RunArtifacts artifacts = run_simulation(config);

  try {
    write_run_artifacts(out_dir, config, artifacts);
  } catch (const std::exception& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIoError;
  }

  if (artifacts.status != kExitOk) {
    std::cerr << artifacts.diagnostic << "\n";
    return artifacts.status;
  }
  std::cout << "run complete: " << artifacts.metrics.size() << " ticks, outputs in "
            << out_dir << "\n";
  return kExitOk;
}

int cmd_audit(const std::string& config_path, const std::string& out_dir,
              const RunOverrides& overrides) {
  RunConfig config;
  try {
    config = load_with_overrides(config_path, out_dir, overrides);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }

  DataflowManifest manifest;
  std::vector<TickTrace> traces;
  std::string hash_pre, hash_post;
  try {
    const fs::path dir(out_dir);
    std::ifstream mf(dir / kManifestFile);
    if (!mf) throw std::runtime_error("missing manifest: run first");
    json mj;
    mf >> mj;
    manifest = manifest_from_json(mj);

    traces = load_traces((dir / kTracesFile).string());

    std::ifstream hf(dir / kFrozenHashFile);
    if (!hf) throw std::runtime_error("missing frozen-hash file: run first");
    json hj;
    hf >> hj;
    hash_pre = hj.at("pre").get<std::string>();
    hash_post = hj.at("post").get<std::string>();
  } catch (const std::exception& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIoError;
  }

  AuditReport report;
  try {
    report = run_audit(config, manifest, traces, hash_pre, hash_post);
  } catch (const std::invalid_argument& e) {
    std::cerr << "audit error: " << e.what() << "\n";
    return kExitConfigError;
  }

  try {
    write_text(fs::path(out_dir) / kAuditFile, report_to_json(report).dump(2) + "\n");
  } catch (const std::exception& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIoError;
  }

  for (const CheckResult& check : report.checks) {
    std::cout << (check.pass ? "PASS " : "FAIL ") << check.id << ": " << check.title << "\n";
  }
  if (!report.all_pass()) {
    for (const CheckResult& check : report.checks) {
      if (!check.pass) std::cerr << "audit failed on " << check.id << "\n";
    }
    return kExitCheckFailed;
  }
  return kExitOk;
}

int cmd_replay(const std::string& config_path, const std::string& out_dir,
               const RunOverrides& overrides) {
  RunConfig config;
  try {
    config = load_with_overrides(config_path, out_dir, overrides);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }
  std::vector<TickTrace> traces;
  try {
    traces = load_traces((fs::path(out_dir) / kTracesFile).string());
  } catch (const std::exception& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIoError;
  }
  const ReplayResult result = replay_traces(config, traces);
  if (!result.ok) {
    std::cerr << "replay mismatch: " << result.diagnostic << "\n";
    return kExitCheckFailed;
  }
  std::cout << "replay verified " << result.ticks_checked << " ticks bit-exactly\n";
  return kExitOk;
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir, int num_seeds,
              const RunOverrides& overrides) {
  if (num_seeds < 1) {
    std::cerr << "config error: sweep needs at least one seed\n";
    return kExitConfigError;
  }
  RunConfig base;
  try {
    base = load_with_overrides(config_path, out_dir, overrides);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }

  std::string summary = "seed,final_nearest_peer_distance,mean_succ,final_memory_size\n";
  for (int i = 0; i < num_seeds; ++i) {
    RunConfig config = base;
    config.seed = base.seed + static_cast<std::uint64_t>(i);
    const std::string seed_dir =
        (fs::path(out_dir) / ("seed_" + std::to_string(config.seed))).string();

    const RunArtifacts artifacts = run_simulation(config);
    try {
      write_run_artifacts(seed_dir, config, artifacts);
    } catch (const std::exception& e) {
      std::cerr << "i/o error: " << e.what() << "\n";
      return kExitIoError;
    }
    if (artifacts.status != kExitOk) {
      std::cerr << artifacts.diagnostic << "\n";
      return artifacts.status;
    }
    double mean_succ = 0.0;
    for (const MetricsRow& row : artifacts.metrics) mean_succ += row.succ;
    if (!artifacts.metrics.empty()) {
      mean_succ /= static_cast<double>(artifacts.metrics.size());
    }
    const double final_distance =
        artifacts.metrics.empty() ? std::numeric_limits<double>::quiet_NaN()
                                  : artifacts.metrics.back().nearest_peer_distance;
    summary += std::to_string(config.seed) + "," +
               (std::isnan(final_distance) ? "nan" : format_double(final_distance)) + "," +
               format_double(mean_succ) + "," +
               std::to_string(artifacts.metrics.empty()
                                  ? 0
                                  : artifacts.metrics.back().memory_size) +
               "\n";
  }
  try {
    fs::create_directories(out_dir);
    write_text(fs::path(out_dir) / "summary.csv", summary);
  } catch (const std::exception& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIoError;
  }
  return kExitOk;
}

}  // namespace emoctl
