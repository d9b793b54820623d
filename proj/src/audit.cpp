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

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_set>

#include "emoctl/json_util.hpp"
#include "emoctl/world.hpp"

namespace emoctl {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

using Fields = jsonutil::StrictFields<std::invalid_argument>;

constexpr double kPi = 3.14159265358979323846;

std::string fanout_line(const SignalDecl& s) {
  std::string line = "signal '" + s.name + "': " + s.producer + " -> " +
                     std::to_string(s.consumers.size()) + " consumer(s) [" + s.schema +
                     ", " + s.provenance + ", width " + std::to_string(s.width) + "]";
  return line;
}

}  // namespace

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

DataflowManifest reference_manifest(const RunConfig& config) {
  const Eigen::Index B = config.controller.channels();
  const Eigen::Index L = config.controller.drives();
  const int affect_dim = static_cast<int>(2 * B + 1 + L);
  const int obs_dim = observation_dim(config.scenario.observation.num_peers);
  const int params_dim = 7;
  const int retrieval_dim = affect_dim + kNumPolicies + 1;
  const int episode_dim = kCategoryDim + 2 * affect_dim + kNumPolicies + 1;
  // x, c, y, needs and their post-act twins; z_need, retrieval, z, z_post;
  // h_need, h, q; s; tick, action, succ, episode index.
  const int trace_dim = 2 * obs_dim + 2 * kCategoryDim + 2 * params_dim +
                        4 * static_cast<int>(L) + 3 * affect_dim + retrieval_dim +
                        3 * kNumPolicies + kNumActions + 4;

  DataflowManifest m;
  m.modules = {"world",  "categorizer", "needs",    "affect",
               "memory", "controller",  "effector", "telemetry"};

  // The observation fan-out is exogenous sensor data; every internal signal
  // is a narrow, typed, fixed-schema record with a single consumer.
  m.signals = {
      {"observation", "world", {"categorizer", "needs", "controller"}, "typed-narrow",
       "exogenous", obs_dim, false},
      {"category", "categorizer", {"memory", "controller"}, "typed-narrow", "internal",
       kCategoryDim, false},
      {"instantiation_params", "categorizer", {"controller"}, "typed-narrow", "internal",
       params_dim, false},
      {"needs", "needs", {"controller"}, "typed-narrow", "internal",
       2 * static_cast<int>(L), false},
      {"retrieval_result", "memory", {"controller"}, "typed-narrow", "internal",
       retrieval_dim, false},
      {"episode", "controller", {"memory"}, "typed-narrow", "internal", episode_dim, false},
      {"action", "controller", {"effector"}, "typed-narrow", "internal", 1, false},
      {"tick_trace", "controller", {"telemetry"}, "typed-narrow", "telemetry", trace_dim,
       false},
  };
  m.memory_access = MemoryAccessDecl{{"controller"}, {"controller"}, "A3", "A8"};
  m.parameter_groups = {{"affect_maps", true}, {"hint_maps", true},  {"traits", true},
                        {"temperatures", true}, {"fusion", true},    {"mood", true},
                        {"success", true},      {"templates", true}, {"need_model", true}};
  m.key_inputs = {"observation"};
  m.optimizers = {};
  return m;
}

void apply_injector_to_manifest(InjectorId id, DataflowManifest& manifest) {
  switch (id) {
    case InjectorId::kSecondReader: {
      // A planner module plugged straight into the episodic store.
      manifest.modules.push_back("planner");
      manifest.memory_access.readers.push_back("planner");
      for (SignalDecl& s : manifest.signals) {
        if (s.name == "retrieval_result") s.consumers.push_back("planner");
      }
      break;
    }
    case InjectorId::kIdentityKey:
      manifest.key_inputs.push_back("agent_id");
      break;
    case InjectorId::kTimestampKey:
      manifest.key_inputs.push_back("time");
      break;
    case InjectorId::kTelemetryFeedback:
      for (SignalDecl& s : manifest.signals) {
        if (s.name == "observation") s.provenance = "telemetry";
      }
      break;
    case InjectorId::kCrossEpisodeSummary:
    case InjectorId::kUnfrozenParam:
      // Runtime-only perturbations; the declared dataflow is unchanged and
      // the corresponding audits catch them from live probes / hashes.
      break;
  }
}

void validate_manifest(const DataflowManifest& m) {
  if (m.schema_version != kManifestSchemaVersion) {
    throw std::invalid_argument("manifest: unsupported schema_version");
  }
  const std::set<std::string> modules(m.modules.begin(), m.modules.end());
  if (modules.size() != m.modules.size()) {
    throw std::invalid_argument("manifest: duplicate module names");
  }
  std::set<std::string> signal_names;
  for (const SignalDecl& s : m.signals) {
    if (!signal_names.insert(s.name).second) {
      throw std::invalid_argument("manifest: duplicate signal '" + s.name + "'");
    }
    if (modules.find(s.producer) == modules.end()) {
      throw std::invalid_argument("manifest: signal '" + s.name +
                                  "' has undeclared producer '" + s.producer + "'");
    }
    if (s.consumers.empty()) {
      throw std::invalid_argument("manifest: signal '" + s.name + "' has no consumers");
    }
    for (const std::string& consumer : s.consumers) {
      if (modules.find(consumer) == modules.end()) {
        throw std::invalid_argument("manifest: signal '" + s.name +
                                    "' has undeclared consumer '" + consumer + "'");
      }
    }
    if (s.schema != "typed-narrow" && s.schema != "content-general") {
      throw std::invalid_argument("manifest: signal '" + s.name + "' has unknown schema tag");
    }
    if (s.provenance != "exogenous" && s.provenance != "internal" &&
        s.provenance != "telemetry") {
      throw std::invalid_argument("manifest: signal '" + s.name +
                                  "' has unknown provenance tag");
    }
  }
  for (const std::string& reader : m.memory_access.readers) {
    if (modules.find(reader) == modules.end()) {
      throw std::invalid_argument("manifest: undeclared memory reader '" + reader + "'");
    }
  }
  for (const std::string& writer : m.memory_access.writers) {
    if (modules.find(writer) == modules.end()) {
      throw std::invalid_argument("manifest: undeclared memory writer '" + writer + "'");
    }
  }
}

ordered_json manifest_to_json(const DataflowManifest& m) {
  ordered_json j;
  j["schema_version"] = m.schema_version;
  j["modules"] = m.modules;
  ordered_json signals = ordered_json::array();
  for (const SignalDecl& s : m.signals) {
    ordered_json sj;
    sj["name"] = s.name;
    sj["producer"] = s.producer;
    sj["consumers"] = s.consumers;
    sj["schema"] = s.schema;
    sj["provenance"] = s.provenance;
    sj["width"] = s.width;
    sj["self_ascribing"] = s.self_ascribing;
    signals.push_back(sj);
  }
  j["signals"] = signals;
  j["memory_access"] = {{"readers", m.memory_access.readers},
                        {"writers", m.memory_access.writers},
                        {"read_phase", m.memory_access.read_phase},
                        {"write_phase", m.memory_access.write_phase}};
  ordered_json groups = ordered_json::array();
  for (const ParamGroupDecl& g : m.parameter_groups) {
    groups.push_back(ordered_json{{"name", g.name}, {"frozen", g.frozen}});
  }
  j["parameter_groups"] = groups;
  j["key_provenance"] = m.key_inputs;
  j["optimizers"] = m.optimizers;
  return j;
}

DataflowManifest manifest_from_json(const json& j) {
  Fields top(j, "manifest");
  DataflowManifest m;
  m.schema_version = jsonutil::as_string<std::invalid_argument>(top.at("schema_version"),
                                                                "manifest.schema_version");
  m.modules = jsonutil::as_string_list<std::invalid_argument>(top.at("modules"),
                                                              "manifest.modules");
  const json& signals = top.at("signals");
  if (!signals.is_array()) throw std::invalid_argument("manifest.signals: expected array");
  for (const json& sj : signals) {
    Fields f(sj, "manifest.signal");
    SignalDecl s;
    s.name = jsonutil::as_string<std::invalid_argument>(f.at("name"), "signal.name");
    s.producer =
        jsonutil::as_string<std::invalid_argument>(f.at("producer"), "signal.producer");
    s.consumers = jsonutil::as_string_list<std::invalid_argument>(f.at("consumers"),
                                                                  "signal.consumers");
    s.schema = jsonutil::as_string<std::invalid_argument>(f.at("schema"), "signal.schema");
    s.provenance =
        jsonutil::as_string<std::invalid_argument>(f.at("provenance"), "signal.provenance");
    s.width = jsonutil::as_int<std::invalid_argument>(f.at("width"), "signal.width");
    s.self_ascribing = jsonutil::as_bool<std::invalid_argument>(f.at("self_ascribing"),
                                                                "signal.self_ascribing");
    f.finish();
    m.signals.push_back(std::move(s));
  }
  {
    Fields f(top.at("memory_access"), "manifest.memory_access");
    m.memory_access.readers =
        jsonutil::as_string_list<std::invalid_argument>(f.at("readers"), "readers");
    m.memory_access.writers =
        jsonutil::as_string_list<std::invalid_argument>(f.at("writers"), "writers");
    m.memory_access.read_phase =
        jsonutil::as_string<std::invalid_argument>(f.at("read_phase"), "read_phase");
    m.memory_access.write_phase =
        jsonutil::as_string<std::invalid_argument>(f.at("write_phase"), "write_phase");
    f.finish();
  }
  const json& groups = top.at("parameter_groups");
  if (!groups.is_array()) {
    throw std::invalid_argument("manifest.parameter_groups: expected array");
  }
  for (const json& gj : groups) {
    Fields f(gj, "manifest.parameter_group");
    ParamGroupDecl g;
    g.name = jsonutil::as_string<std::invalid_argument>(f.at("name"), "group.name");
    g.frozen = jsonutil::as_bool<std::invalid_argument>(f.at("frozen"), "group.frozen");
    f.finish();
    m.parameter_groups.push_back(std::move(g));
  }
  m.key_inputs = jsonutil::as_string_list<std::invalid_argument>(top.at("key_provenance"),
                                                                 "manifest.key_provenance");
  m.optimizers = jsonutil::as_string_list<std::invalid_argument>(top.at("optimizers"),
                                                                 "manifest.optimizers");
  top.finish();
  validate_manifest(m);
  return m;
}

// ---------------------------------------------------------------------------
// Report plumbing
// ---------------------------------------------------------------------------

bool AuditReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.pass; });
}

const CheckResult& AuditReport::check(const std::string& id) const {
  for (const CheckResult& c : checks) {
    if (c.id == id) return c;
  }
  throw std::out_of_range("no such check: " + id);
}

ordered_json report_to_json(const AuditReport& report) {
  ordered_json j;
  j["tool_version"] = report.tool_version;
  j["scope_note"] = report.scope_note;
  ordered_json checks = ordered_json::array();
  for (const CheckResult& c : report.checks) {
    ordered_json cj;
    cj["id"] = c.id;
    cj["title"] = c.title;
    cj["status"] = c.pass ? "pass" : "fail";
    cj["evidence"] = c.evidence;
    ordered_json measured;
    for (const auto& [name, value] : c.measured) measured[name] = value;
    cj["measured"] = measured;
    checks.push_back(cj);
  }
  j["checks"] = checks;
  j["all_pass"] = report.all_pass();
  return j;
}

// ---------------------------------------------------------------------------
// R1: fan-out / single-reader
// ---------------------------------------------------------------------------

CheckResult audit_r1(const DataflowManifest& manifest) {
  validate_manifest(manifest);
  CheckResult result{"R1", "no content-general broadcast; single memory reader", true, {}, {}};

  int max_content_general_fanout = 0;
  int total_bandwidth = 0;
  for (const SignalDecl& s : manifest.signals) {
    total_bandwidth += s.width;
    result.evidence.push_back(fanout_line(s));
    if (s.schema == "content-general") {
      max_content_general_fanout =
          std::max(max_content_general_fanout, static_cast<int>(s.consumers.size()));
      if (s.consumers.size() >= 2) {
        result.pass = false;
        result.evidence.push_back("FAIL: content-general signal '" + s.name +
                                  "' is readable by " +
                                  std::to_string(s.consumers.size()) +
                                  " heterogeneous consumers");
      }
    }
  }
  const std::size_t readers = manifest.memory_access.readers.size();
  if (readers != 1) {
    result.pass = false;
    result.evidence.push_back(
        "FAIL: memory declares " + std::to_string(readers) +
        " external readers; exactly one is allowed (SIC-1)");
  } else {
    result.evidence.push_back("memory has exactly one external reader: '" +
                              manifest.memory_access.readers.front() + "'");
  }
  result.evidence.push_back(
      "bandwidth is logged per signal; no threshold is defined, so none is enforced");
  result.measured["max_content_general_fanout"] = max_content_general_fanout;
  result.measured["memory_readers"] = static_cast<double>(readers);
  result.measured["total_bandwidth_scalars"] = total_bandwidth;
  return result;
}

// ---------------------------------------------------------------------------
// R2: telemetry one-way
// ---------------------------------------------------------------------------

CheckResult audit_r2(const DataflowManifest& manifest,
                     const std::vector<TickTrace>& traces) {
  validate_manifest(manifest);
  CheckResult result{"R2", "no self-state inputs; telemetry strictly one-way", true, {}, {}};

  for (const SignalDecl& s : manifest.signals) {
    const bool feeds_control =
        std::find(s.consumers.begin(), s.consumers.end(), "controller") != s.consumers.end();
    if (!feeds_control) continue;
    if (s.provenance == "telemetry") {
      result.pass = false;
      result.evidence.push_back("FAIL: controller input '" + s.name +
                                "' has telemetry provenance (feedback path)");
    }
    if (s.self_ascribing) {
      result.pass = false;
      result.evidence.push_back("FAIL: controller input '" + s.name +
                                "' carries a self-ascribing schema");
    }
  }

  // Value sweep: controller-generated trace values must not reappear
  // bit-for-bit in later observation buffers. Exact 0 and +/-1 are produced
  // independently by both spaces (flags, clipped affect) and are skipped.
  std::unordered_set<std::uint64_t> prior_outputs;
  auto remember = [&prior_outputs](double v) {
    if (v != 0.0 && v != 1.0 && v != -1.0) {
      prior_outputs.insert(std::bit_cast<std::uint64_t>(v));
    }
  };
  auto remember_vec = [&remember](const Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) remember(v[i]);
  };

  int matches = 0;
  for (const TickTrace& trace : traces) {
    const Eigen::VectorXd x = trace.x.flatten();
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double v = x[i];
      if (v == 0.0 || v == 1.0 || v == -1.0) continue;
      if (prior_outputs.count(std::bit_cast<std::uint64_t>(v)) > 0) {
        ++matches;
        if (matches <= 5) {
          result.evidence.push_back(
              "FAIL: observation component " + std::to_string(i) + " at tick " +
              std::to_string(trace.tick) +
              " equals an earlier controller output bit-for-bit");
        }
      }
    }
    remember_vec(trace.z_need.flatten());
    remember_vec(trace.h_need.scores);
    remember_vec(trace.retrieval.z_mem.flatten());
    remember_vec(trace.retrieval.h_mem.scores);
    remember(trace.retrieval.reliability);
    remember_vec(trace.z.flatten());
    remember_vec(trace.h.scores);
    remember_vec(trace.q);
    remember_vec(trace.action_scores);
    remember_vec(trace.z_post.flatten());
    remember(trace.succ);
  }
  if (matches > 0) result.pass = false;
  if (traces.empty()) {
    result.evidence.push_back("no telemetry was recorded; re-ingestion is impossible");
  }
  result.measured["ticks_swept"] = static_cast<double>(traces.size());
  result.measured["feedback_matches"] = matches;
  return result;
}

// ---------------------------------------------------------------------------
// R3a: key hygiene
// ---------------------------------------------------------------------------

CheckResult audit_r3_key_hygiene(const std::vector<TickTrace>& traces,
                                 const DataflowManifest& manifest,
                                 const Scenario& scenario) {
  CheckResult result{"R3a", "retrieval keys derive from the current observation only", true,
                     {}, {}};

  for (const std::string& input : manifest.key_inputs) {
    if (input != "observation") {
      result.pass = false;
      result.evidence.push_back("FAIL: manifest declares key input '" + input +
                                "' beyond the current observation");
    }
  }

  int mismatches = 0;
  for (const TickTrace& trace : traces) {
    const CategoryVector recomputed = categorize(trace.x, scenario).first;
    const bool identical = recomputed.c.size() == trace.c.c.size() &&
                           (recomputed.c.array() == trace.c.c.array()).all();
    if (!identical) {
      ++mismatches;
      if (mismatches <= 5) {
        result.evidence.push_back("FAIL: stored key at tick " + std::to_string(trace.tick) +
                                  " is not the categorizer output for the logged observation");
      }
    }
  }
  if (mismatches > 0) result.pass = false;
  result.measured["ticks_checked"] = static_cast<double>(traces.size());
  result.measured["key_mismatches"] = mismatches;
  if (result.pass) {
    result.evidence.push_back("all logged keys recompute bit-exactly from logged observations");
  }
  return result;
}

// ---------------------------------------------------------------------------
// R3b: shuffle / trim invariance
// ---------------------------------------------------------------------------

RetrievalProbe reference_retrieval_probe(const StoreConfig& config) {
  return [config](const std::vector<Episode>& episodes, const CategoryVector& query,
                  int top_k) {
    EpisodeStore store(config);
    WriterToken writer = store.make_writer();
    ReaderToken reader = store.make_reader();
    store.load(writer, episodes);
    auto phase = store.enter_phase(TickPhase::kRetrieval);
    return store.retrieve(reader, query, top_k);
  };
}

RetrievalProbe summary_tainted_probe(const StoreConfig& config, double mix) {
  RetrievalProbe base = reference_retrieval_probe(config);
  return [base, config, mix](const std::vector<Episode>& episodes,
                             const CategoryVector& query, int top_k) {
    RetrievalResult r = base(episodes, query, top_k);
    if (episodes.empty()) return r;
    AffectState mean = AffectState::zero(config.channels, config.drives);
    for (const Episode& e : episodes) {
      mean.valence += e.z_pre.valence;
      mean.magnitude += e.z_pre.magnitude;
      mean.arousal += e.z_pre.arousal;
      mean.drive += e.z_pre.drive;
    }
    const double n = static_cast<double>(episodes.size());
    mean.valence /= n;
    mean.magnitude /= n;
    mean.arousal /= n;
    mean.drive /= n;
    r.z_mem.valence = (1.0 - mix) * r.z_mem.valence + mix * mean.valence;
    r.z_mem.magnitude = (1.0 - mix) * r.z_mem.magnitude + mix * mean.magnitude;
    r.z_mem.arousal = (1.0 - mix) * r.z_mem.arousal + mix * mean.arousal;
    r.z_mem.drive = (1.0 - mix) * r.z_mem.drive + mix * mean.drive;
    return r;
  };
}

ShuffleFixture make_shuffle_fixture(const StoreConfig& config) {
  if (config.key_dim < 2) throw std::invalid_argument("fixture needs key_dim >= 2");
  ShuffleFixture fixture;
  const double angles_deg[5] = {5.0, 20.0, 40.0, 60.0, 80.0};
  const double succ_values[5] = {0.7, -0.6, 0.4, -0.2, 0.75};
  for (int i = 0; i < 5; ++i) {
    const double theta = angles_deg[i] * kPi / 180.0;
    Episode e;
    e.key.c = Eigen::VectorXd::Zero(config.key_dim);
    e.key.c[0] = std::cos(theta);
    e.key.c[1] = std::sin(theta);
    const double scale = 0.1 * (i + 1);
    e.z_pre = AffectState::zero(config.channels, config.drives);
    e.z_pre.valence.setConstant(scale);
    e.z_pre.magnitude.setConstant(scale);
    e.z_pre.arousal = scale;
    e.z_pre.drive.setConstant(-scale);
    e.z_post = AffectState::zero(config.channels, config.drives);
    e.z_post.valence.setConstant(-scale);
    e.z_post.magnitude.setConstant(1.5 * scale);
    e.z_post.arousal = 0.5 * scale;
    e.z_post.drive.setConstant(scale);
    e.hints = PolicyHints::zero(config.policies);
    e.hints.scores[i % config.policies] = 1.0 + 0.1 * i;
    e.succ = succ_values[i];
    fixture.episodes.push_back(std::move(e));
  }
  CategoryVector q1{Eigen::VectorXd::Zero(config.key_dim)};
  q1.c[0] = 1.0;
  CategoryVector q2{Eigen::VectorXd::Zero(config.key_dim)};
  q2.c[0] = 1.0;
  q2.c[1] = 1.0;
  q2.c.normalize();
  fixture.queries = {q1, q2};
  return fixture;
}

namespace {

double result_difference(const RetrievalResult& a, const RetrievalResult& b) {
  double diff = std::abs(a.reliability - b.reliability);
  diff = std::max(diff, (a.z_mem.valence - b.z_mem.valence).cwiseAbs().maxCoeff());
  diff = std::max(diff, (a.z_mem.magnitude - b.z_mem.magnitude).cwiseAbs().maxCoeff());
  diff = std::max(diff, std::abs(a.z_mem.arousal - b.z_mem.arousal));
  diff = std::max(diff, (a.z_mem.drive - b.z_mem.drive).cwiseAbs().maxCoeff());
  diff = std::max(diff, (a.h_mem.scores - b.h_mem.scores).cwiseAbs().maxCoeff());
  return diff;
}

}  // namespace

CheckResult audit_r3_shuffle(const RetrievalProbe& probe, const ShuffleFixture& fixture,
                             int top_k, int permutations, std::uint64_t seed,
                             double tolerance) {
  CheckResult result{"R3b", "retrieval is invariant to history shuffling and trimming", true,
                     {}, {}};
  Rng rng(derive_stream(seed, "shuffle-audit"));
  double worst_shuffle = 0.0;
  double worst_trim = 0.0;

  for (std::size_t qi = 0; qi < fixture.queries.size(); ++qi) {
    const CategoryVector& query = fixture.queries[qi];
    const RetrievalResult baseline = probe(fixture.episodes, query, top_k);

    for (int p = 0; p < permutations; ++p) {
      std::vector<std::size_t> order(fixture.episodes.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[rng.uniform_int(static_cast<int>(i))]);
      }
      std::vector<Episode> permuted;
      permuted.reserve(order.size());
      for (std::size_t idx : order) permuted.push_back(fixture.episodes[idx]);
      const double diff = result_difference(probe(permuted, query, top_k), baseline);
      worst_shuffle = std::max(worst_shuffle, diff);
      if (diff > tolerance) {
        result.pass = false;
        result.evidence.push_back("FAIL: query " + std::to_string(qi) + ", permutation " +
                                  std::to_string(p) + ": output moved by " +
                                  format_double(diff));
        break;
      }
    }

    // Trim: dropping episodes that cannot enter the top-K must not change
    // the result.
    std::vector<double> similarities;
    similarities.reserve(fixture.episodes.size());
    for (const Episode& e : fixture.episodes) similarities.push_back(query.c.dot(e.key.c));
    std::vector<double> sorted = similarities;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const double cutoff =
        sorted[std::min<std::size_t>(static_cast<std::size_t>(top_k), sorted.size()) - 1];
    std::vector<Episode> trimmed;
    for (std::size_t i = 0; i < fixture.episodes.size(); ++i) {
      if (similarities[i] >= cutoff) trimmed.push_back(fixture.episodes[i]);
    }
    const double trim_diff = result_difference(probe(trimmed, query, top_k), baseline);
    worst_trim = std::max(worst_trim, trim_diff);
    if (trim_diff > tolerance) {
      result.pass = false;
      result.evidence.push_back("FAIL: query " + std::to_string(qi) +
                                ": trimming out-of-top-K episodes moved the output by " +
                                format_double(trim_diff));
    }
  }

  result.measured["permutations_per_query"] = permutations;
  result.measured["worst_shuffle_difference"] = worst_shuffle;
  result.measured["worst_trim_difference"] = worst_trim;
  if (result.pass) {
    result.evidence.push_back("outputs identical within " + format_double(tolerance) +
                              " across all permutations and trims");
  }
  return result;
}

// ---------------------------------------------------------------------------
// R3c: mood receptive field
// ---------------------------------------------------------------------------

CheckResult audit_r3_mood_window(const MoodParams& params, Eigen::Index channels,
                                 Eigen::Index drives) {
  CheckResult result{"R3c", "mood influence decays inside its declared receptive field",
                     true, {}, {}};
  constexpr double kEpsilon = 1e-3;
  constexpr double kSlack = 1e-9;

  if (!params.enabled) {
    result.evidence.push_back("mood disabled: influence is 0 at every lag");
    result.measured["influence_lag0"] = 0.0;
    result.measured["crossing_lag"] = 0.0;
    return result;
  }

  const double gamma = params.gamma;
  const int bound_lag = static_cast<int>(std::ceil(std::log(kEpsilon) / std::log(gamma)));
  const int horizon = std::max(100, bound_lag) + 1;

  // Empirical impulse response of the buffer itself: one saturated input,
  // then zeros.
  MoodBuffer buffer = make_mood(params, channels, drives);
  AffectState impulse = AffectState::zero(channels, drives);
  impulse.valence.setConstant(1.0);
  impulse.magnitude.setConstant(1.0);
  impulse.arousal = 1.0;
  impulse.drive.setConstant(1.0);
  const AffectState zero = AffectState::zero(channels, drives);

  buffer = update_mood(buffer, impulse);
  int crossing = -1;
  double lag0 = buffer.average.arousal;
  for (int lag = 0; lag <= horizon; ++lag) {
    const double influence = buffer.average.arousal;
    const double bound = (1.0 - gamma) * std::pow(gamma, lag);
    if (influence > bound + kSlack) {
      result.pass = false;
      result.evidence.push_back("FAIL: influence at lag " + std::to_string(lag) + " is " +
                                format_double(influence) + ", above the declared bound " +
                                format_double(bound));
      break;
    }
    if (crossing < 0 && influence < kEpsilon) crossing = lag;
    buffer = update_mood(buffer, zero);
  }
  if (crossing < 0 || crossing > bound_lag) {
    result.pass = false;
    result.evidence.push_back(
        "FAIL: influence did not fall below epsilon by the declared lag " +
        std::to_string(bound_lag));
  }
  result.measured["gamma"] = gamma;
  result.measured["influence_lag0"] = lag0;
  result.measured["crossing_lag"] = crossing;
  result.measured["declared_bound_lag"] = bound_lag;
  if (result.pass) {
    result.evidence.push_back("impulse influence matches (1-gamma)*gamma^n and is below " +
                              format_double(kEpsilon) + " by lag " + std::to_string(crossing) +
                              " (declared bound " + std::to_string(bound_lag) + ")");
  }
  return result;
}

// ---------------------------------------------------------------------------
// R4: frozen deployment
// ---------------------------------------------------------------------------

CheckResult audit_r4(const std::string& hash_pre, const std::string& hash_post,
                     const DataflowManifest& manifest) {
  validate_manifest(manifest);
  CheckResult result{"R4", "parameters frozen; no optimizer anywhere", true, {}, {}};

  if (hash_pre.empty() || hash_post.empty()) {
    result.pass = false;
    result.evidence.push_back("FAIL: missing parameter-group hashes");
  } else if (hash_pre != hash_post) {
    result.pass = false;
    result.evidence.push_back("FAIL: parameter-group hash changed during the run (" +
                              hash_pre + " -> " + hash_post + ")");
  } else {
    result.evidence.push_back("parameter-group hash identical before and after the run: " +
                              hash_pre);
  }
  if (!manifest.optimizers.empty()) {
    result.pass = false;
    result.evidence.push_back("FAIL: manifest declares " +
                              std::to_string(manifest.optimizers.size()) + " optimizer(s)");
  } else {
    result.evidence.push_back("no optimizer is declared (hardwired baseline)");
  }
  for (const ParamGroupDecl& g : manifest.parameter_groups) {
    if (!g.frozen) {
      result.pass = false;
      result.evidence.push_back("FAIL: parameter group '" + g.name + "' is not frozen");
    }
  }
  result.evidence.push_back(
      "gradient-boundary checks degenerate to hash equality: the build is hardwired, "
      "no gradients exist");
  result.measured["hash_match"] = hash_pre == hash_post ? 1.0 : 0.0;
  return result;
}

}  // namespace emoctl
