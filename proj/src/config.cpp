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

#include "emoctl/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>

#include "emoctl/injector.hpp"
#include "emoctl/json_util.hpp"

namespace emoctl {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

using jsonutil::point_to_json;
using jsonutil::matrix_to_json;
using jsonutil::vector_to_json;

using Fields = jsonutil::StrictFields<ConfigError>;

double as_double(const json& j, const std::string& what) {
  return jsonutil::as_double<ConfigError>(j, what);
}
int as_int(const json& j, const std::string& what) {
  return jsonutil::as_int<ConfigError>(j, what);
}
std::uint64_t as_u64(const json& j, const std::string& what) {
  return jsonutil::as_u64<ConfigError>(j, what);
}
bool as_bool(const json& j, const std::string& what) {
  return jsonutil::as_bool<ConfigError>(j, what);
}
std::string as_string(const json& j, const std::string& what) {
  return jsonutil::as_string<ConfigError>(j, what);
}
Eigen::VectorXd as_vector(const json& j, const std::string& what) {
  return jsonutil::as_vector<ConfigError>(j, what);
}
Eigen::MatrixXd as_matrix(const json& j, const std::string& what) {
  return jsonutil::as_matrix<ConfigError>(j, what);
}
Eigen::Vector2d as_point(const json& j, const std::string& what) {
  return jsonutil::as_point<ConfigError>(j, what);
}

}  // namespace

Scenario parse_scenario(const json& j) {
  Fields top(j, "scenario");
  if (as_string(top.at("schema_version"), "scenario.schema_version") !=
      kScenarioSchemaVersion) {
    throw ConfigError("scenario: unsupported schema_version");
  }

  Scenario s;
  {
    Fields f(top.at("arena"), "scenario.arena");
    s.arena.xmin = as_double(f.at("xmin"), "arena.xmin");
    s.arena.xmax = as_double(f.at("xmax"), "arena.xmax");
    s.arena.ymin = as_double(f.at("ymin"), "arena.ymin");
    s.arena.ymax = as_double(f.at("ymax"), "arena.ymax");
    f.finish();
  }
  {
    Fields f(top.at("agent"), "scenario.agent");
    s.agent_position = as_point(f.at("position"), "agent.position");
    s.agent_heading = as_double(f.at("heading"), "agent.heading");
    s.agent_speed = as_double(f.at("speed"), "agent.speed");
    f.finish();
  }
  {
    Fields f(top.at("peers"), "scenario.peers");
    const json& positions = f.at("positions");
    if (!positions.is_array()) throw ConfigError("peers.positions: expected an array");
    for (const json& p : positions) {
      s.peer_positions.push_back(as_point(p, "peers.positions"));
    }
    const std::string motion = as_string(f.at("motion"), "peers.motion");
    if (motion == "static") {
      s.peer_motion = PeerMotion::kStatic;
    } else if (motion == "random_walk") {
      s.peer_motion = PeerMotion::kRandomWalk;
    } else {
      throw ConfigError("peers.motion: expected 'static' or 'random_walk'");
    }
    s.peer_walk_step = as_double(f.at("walk_step"), "peers.walk_step");
    f.finish();
  }
  {
    Fields f(top.at("threat"), "scenario.threat");
    s.threat.enabled = as_bool(f.at("enabled"), "threat.enabled");
    s.threat.spawn_tick = as_int(f.at("spawn_tick"), "threat.spawn_tick");
    s.threat.spawn_position = as_point(f.at("position"), "threat.position");
    s.threat.speed = as_double(f.at("speed"), "threat.speed");
    f.finish();
  }
  {
    Fields f(top.at("safe_region"), "scenario.safe_region");
    s.safe_region.center = as_point(f.at("center"), "safe_region.center");
    s.safe_region.radius = as_double(f.at("radius"), "safe_region.radius");
    f.finish();
  }
  {
    Fields f(top.at("needs"), "scenario.needs");
    s.needs.targets = as_vector(f.at("targets"), "needs.targets");
    s.needs.comfort_lo = as_double(f.at("comfort_lo"), "needs.comfort_lo");
    s.needs.comfort_hi = as_double(f.at("comfort_hi"), "needs.comfort_hi");
    s.needs.affiliation_falloff =
        as_double(f.at("affiliation_falloff"), "needs.affiliation_falloff");
    s.needs.density_comfort = as_double(f.at("density_comfort"), "needs.density_comfort");
    s.needs.independence_falloff =
        as_double(f.at("independence_falloff"), "needs.independence_falloff");
    s.needs.threat_half_distance =
        as_double(f.at("threat_half_distance"), "needs.threat_half_distance");
    f.finish();
  }
  {
    Fields f(top.at("observation"), "scenario.observation");
    s.observation.num_peers = as_int(f.at("num_peers"), "observation.num_peers");
    s.observation.density_radius =
        as_double(f.at("density_radius"), "observation.density_radius");
    s.observation.density_cap = as_double(f.at("density_cap"), "observation.density_cap");
    f.finish();
  }
  top.finish();
  validate(s);
  return s;
}

RunConfig parse_run_config(const json& j) {
  Fields top(j, "config");
  if (as_string(top.at("schema_version"), "config.schema_version") != kConfigSchemaVersion) {
    throw ConfigError("config: unsupported schema_version");
  }

  RunConfig c;
  c.seed = as_u64(top.at("seed"), "config.seed");
  c.steps = as_int(top.at("steps"), "config.steps");
  c.scenario_path = as_string(top.at("scenario_path"), "config.scenario_path");

  {
    Fields ctrl(top.at("controller"), "controller");
    {
      Fields f(ctrl.at("affect"), "controller.affect");
      c.controller.affect.valence_map = as_matrix(f.at("valence_map"), "affect.valence_map");
      c.controller.affect.magnitude_map =
          as_matrix(f.at("magnitude_map"), "affect.magnitude_map");
      c.controller.affect.drive_gains = as_vector(f.at("drive_gains"), "affect.drive_gains");
      f.finish();
    }
    {
      Fields f(ctrl.at("hints"), "controller.hints");
      c.controller.hints.need_map = as_matrix(f.at("need_map"), "hints.need_map");
      c.controller.hints.affect_map = as_matrix(f.at("affect_map"), "hints.affect_map");
      c.controller.hints.alpha_need = as_double(f.at("alpha_need"), "hints.alpha_need");
      c.controller.hints.alpha_mem = as_double(f.at("alpha_mem"), "hints.alpha_mem");
      c.controller.hints.alpha_affect = as_double(f.at("alpha_affect"), "hints.alpha_affect");
      f.finish();
    }
    {
      Fields f(ctrl.at("traits"), "controller.traits");
      c.controller.traits.gains = as_vector(f.at("gains"), "traits.gains");
      f.finish();
    }
    {
      Fields f(ctrl.at("policy_temperature"), "controller.policy_temperature");
      c.controller.tau_policy.tau_max = as_double(f.at("tau_max"), "policy_temperature");
      c.controller.tau_policy.tau_min = as_double(f.at("tau_min"), "policy_temperature");
      f.finish();
    }
    {
      Fields f(ctrl.at("action_temperature"), "controller.action_temperature");
      c.controller.tau_action.tau_max = as_double(f.at("tau_max"), "action_temperature");
      c.controller.tau_action.tau_min = as_double(f.at("tau_min"), "action_temperature");
      f.finish();
    }
    {
      Fields f(ctrl.at("fusion"), "controller.fusion");
      c.controller.fusion.beta = as_double(f.at("beta"), "fusion.beta");
      c.controller.fusion.mood_weight = as_double(f.at("mood_weight"), "fusion.mood_weight");
      f.finish();
    }
    {
      Fields f(ctrl.at("mood"), "controller.mood");
      c.controller.mood.enabled = as_bool(f.at("enabled"), "mood.enabled");
      c.controller.mood.gamma = as_double(f.at("gamma"), "mood.gamma");
      f.finish();
    }
    {
      Fields f(ctrl.at("success"), "controller.success");
      const std::string mode = as_string(f.at("mode"), "success.mode");
      if (mode == "drive_reduction") {
        c.controller.success.mode = SuccessParams::Mode::kDriveReduction;
      } else if (mode == "hedonic") {
        c.controller.success.mode = SuccessParams::Mode::kHedonic;
      } else {
        throw ConfigError("success.mode: expected 'drive_reduction' or 'hedonic'");
      }
      c.controller.success.eta = as_double(f.at("eta"), "success.eta");
      f.finish();
    }
    {
      Fields f(ctrl.at("action_templates"), "controller.action_templates");
      ActionTemplates& t = c.controller.templates;
      t.explore_move = as_double(f.at("explore_move"), "action_templates");
      t.explore_pause = as_double(f.at("explore_pause"), "action_templates");
      t.rest_move = as_double(f.at("rest_move"), "action_templates");
      t.rest_pause = as_double(f.at("rest_pause"), "action_templates");
      t.directional_pause = as_double(f.at("directional_pause"), "action_templates");
      t.invalid_uniform = as_double(f.at("invalid_uniform"), "action_templates");
      f.finish();
    }
    const std::string mode = as_string(ctrl.at("selection_mode"), "controller.selection_mode");
    if (mode == "sample") {
      c.controller.selection = SelectionMode::kSample;
    } else if (mode == "argmax") {
      c.controller.selection = SelectionMode::kArgmax;
    } else {
      throw ConfigError("controller.selection_mode: expected 'sample' or 'argmax'");
    }
    c.controller.top_k = as_int(ctrl.at("top_k"), "controller.top_k");
    ctrl.finish();
  }

  {
    Fields mem(top.at("memory"), "memory");
    c.memory.capacity = as_int(mem.at("capacity"), "memory.capacity");
    c.memory.combine_lambda = as_double(mem.at("combine_lambda"), "memory.combine_lambda");
    {
      Fields f(mem.at("reconcile"), "memory.reconcile");
      ReconcileConfig& r = c.memory.reconcile;
      r.dup_threshold = as_double(f.at("dup_threshold"), "reconcile.dup_threshold");
      r.flash_threshold = as_double(f.at("flash_threshold"), "reconcile.flash_threshold");
      r.rare_threshold = as_double(f.at("rare_threshold"), "reconcile.rare_threshold");
      r.rare_bonus = as_double(f.at("rare_bonus"), "reconcile.rare_bonus");
      r.reestimate_lambda =
          as_double(f.at("reestimate_lambda"), "reconcile.reestimate_lambda");
      r.horizon = as_int(f.at("horizon"), "reconcile.horizon");
      r.prune_max_age_rank = as_int(f.at("prune_max_age_rank"), "reconcile.prune_max_age_rank");
      r.prune_min_retrievals =
          as_u64(f.at("prune_min_retrievals"), "reconcile.prune_min_retrievals");
      f.finish();
    }
    mem.finish();
  }

  {
    Fields feat(top.at("features"), "features");
    c.features.reconcile_interval =
        as_int(feat.at("reconcile_interval"), "features.reconcile_interval");
    c.features.ablate_memory = as_bool(feat.at("ablate_memory"), "features.ablate_memory");
    c.features.injector = as_string(feat.at("injector"), "features.injector");
    c.features.trace_enabled = as_bool(feat.at("trace_enabled"), "features.trace_enabled");
    feat.finish();
  }

  top.finish();
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  RunConfig config = parse_run_config(j);

  const std::filesystem::path scenario_file =
      std::filesystem::path(path).parent_path() / config.scenario_path;
  std::ifstream sin(scenario_file);
  if (!sin) throw ConfigError("cannot open scenario file: " + scenario_file.string());
  json sj;
  try {
    sin >> sj;
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario parse error: ") + e.what());
  }
  config.scenario = parse_scenario(sj);
  validate(config);
  return config;
}

void validate(const Scenario& s) {
  if (!(s.arena.xmin < s.arena.xmax) || !(s.arena.ymin < s.arena.ymax)) {
    throw ConfigError("scenario: degenerate arena");
  }
  if (s.agent_speed < 0.0) throw ConfigError("scenario: agent speed must be nonnegative");
  if (s.peer_walk_step < 0.0) throw ConfigError("scenario: walk_step must be nonnegative");
  if (s.threat.speed < 0.0) throw ConfigError("scenario: threat speed must be nonnegative");
  if (s.threat.spawn_tick < 0) throw ConfigError("scenario: threat spawn_tick must be >= 0");
  if (s.safe_region.radius <= 0.0) throw ConfigError("scenario: safe region radius must be > 0");
  const Eigen::Index L = s.needs.targets.size();
  if (L != 2 && L != 3) {
    throw ConfigError("scenario: needs.targets must have 2 or 3 channels");
  }
  if ((s.needs.targets.array() < 0.0).any() || (s.needs.targets.array() > 1.0).any()) {
    throw ConfigError("scenario: need targets must lie in [0,1]");
  }
  if (s.needs.comfort_lo < 0.0 || !(s.needs.comfort_hi > s.needs.comfort_lo)) {
    throw ConfigError("scenario: comfort band requires 0 <= comfort_lo < comfort_hi");
  }
  if (s.needs.affiliation_falloff <= 0.0 || s.needs.independence_falloff <= 0.0 ||
      s.needs.threat_half_distance <= 0.0) {
    throw ConfigError("scenario: need falloffs must be positive");
  }
  if (s.needs.density_comfort < 0.0 || s.needs.density_comfort > 1.0) {
    throw ConfigError("scenario: density_comfort must lie in [0,1]");
  }
  if (s.observation.num_peers < 1) throw ConfigError("scenario: num_peers must be >= 1");
  if (s.observation.density_radius <= 0.0 || s.observation.density_cap < 1.0) {
    throw ConfigError("scenario: density radius/cap out of range");
  }
}

void validate(const RunConfig& c) {
  if (c.steps < 0) throw ConfigError("config: steps must be nonnegative");
  validate(c.scenario);
  try {
    validate(c.controller);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("controller: ") + e.what());
  }
  if (c.controller.drives() != c.scenario.needs.targets.size()) {
    throw ConfigError("config: controller drive count must match scenario need channels");
  }
  if (c.memory.capacity < 1) throw ConfigError("memory: capacity must be >= 1");
  if (c.memory.combine_lambda < 0.0 || c.memory.combine_lambda > 1.0) {
    throw ConfigError("memory: combine_lambda must lie in [0,1]");
  }
  const ReconcileConfig& r = c.memory.reconcile;
  if (r.dup_threshold <= 0.0 || r.dup_threshold > 1.0 || r.flash_threshold < 0.0 ||
      r.flash_threshold > 1.0 || r.rare_threshold < 0.0 || r.rare_threshold > 1.0 ||
      r.rare_bonus < 0.0 || r.reestimate_lambda < 0.0 || r.reestimate_lambda > 1.0 ||
      r.horizon < 1 || r.prune_max_age_rank < 0) {
    throw ConfigError("memory: reconcile constants outside documented ranges");
  }
  if (c.features.reconcile_interval < 0) {
    throw ConfigError("features: reconcile_interval must be >= 0");
  }
  try {
    parse_injector(c.features.injector);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("features: ") + e.what());
  }
}

ordered_json scenario_to_json(const Scenario& s) {
  ordered_json j;
  j["schema_version"] = kScenarioSchemaVersion;
  j["arena"] = {{"xmin", s.arena.xmin},
                {"xmax", s.arena.xmax},
                {"ymin", s.arena.ymin},
                {"ymax", s.arena.ymax}};
  j["agent"] = {{"position", point_to_json(s.agent_position)},
                {"heading", s.agent_heading},
                {"speed", s.agent_speed}};
  ordered_json positions = ordered_json::array();
  for (const auto& p : s.peer_positions) positions.push_back(point_to_json(p));
  j["peers"] = {{"positions", positions},
                {"motion", s.peer_motion == PeerMotion::kStatic ? "static" : "random_walk"},
                {"walk_step", s.peer_walk_step}};
  j["threat"] = {{"enabled", s.threat.enabled},
                 {"spawn_tick", s.threat.spawn_tick},
                 {"position", point_to_json(s.threat.spawn_position)},
                 {"speed", s.threat.speed}};
  j["safe_region"] = {{"center", point_to_json(s.safe_region.center)},
                      {"radius", s.safe_region.radius}};
  j["needs"] = {{"targets", vector_to_json(s.needs.targets)},
                {"comfort_lo", s.needs.comfort_lo},
                {"comfort_hi", s.needs.comfort_hi},
                {"affiliation_falloff", s.needs.affiliation_falloff},
                {"density_comfort", s.needs.density_comfort},
                {"independence_falloff", s.needs.independence_falloff},
                {"threat_half_distance", s.needs.threat_half_distance}};
  j["observation"] = {{"num_peers", s.observation.num_peers},
                      {"density_radius", s.observation.density_radius},
                      {"density_cap", s.observation.density_cap}};
  return j;
}

ordered_json run_config_to_json(const RunConfig& c) {
  ordered_json j;
  j["schema_version"] = kConfigSchemaVersion;
  j["seed"] = c.seed;
  j["steps"] = c.steps;
  j["scenario_path"] = c.scenario_path;

  ordered_json ctrl;
  ctrl["affect"] = {{"valence_map", matrix_to_json(c.controller.affect.valence_map)},
                    {"magnitude_map", matrix_to_json(c.controller.affect.magnitude_map)},
                    {"drive_gains", vector_to_json(c.controller.affect.drive_gains)}};
  ctrl["hints"] = {{"need_map", matrix_to_json(c.controller.hints.need_map)},
                   {"affect_map", matrix_to_json(c.controller.hints.affect_map)},
                   {"alpha_need", c.controller.hints.alpha_need},
                   {"alpha_mem", c.controller.hints.alpha_mem},
                   {"alpha_affect", c.controller.hints.alpha_affect}};
  ctrl["traits"] = {{"gains", vector_to_json(c.controller.traits.gains)}};
  ctrl["policy_temperature"] = {{"tau_max", c.controller.tau_policy.tau_max},
                                {"tau_min", c.controller.tau_policy.tau_min}};
  ctrl["action_temperature"] = {{"tau_max", c.controller.tau_action.tau_max},
                                {"tau_min", c.controller.tau_action.tau_min}};
  ctrl["fusion"] = {{"beta", c.controller.fusion.beta},
                    {"mood_weight", c.controller.fusion.mood_weight}};
  ctrl["mood"] = {{"enabled", c.controller.mood.enabled}, {"gamma", c.controller.mood.gamma}};
  ctrl["success"] = {
      {"mode", c.controller.success.mode == SuccessParams::Mode::kDriveReduction
                   ? "drive_reduction"
                   : "hedonic"},
      {"eta", c.controller.success.eta}};
  ctrl["action_templates"] = {{"explore_move", c.controller.templates.explore_move},
                              {"explore_pause", c.controller.templates.explore_pause},
                              {"rest_move", c.controller.templates.rest_move},
                              {"rest_pause", c.controller.templates.rest_pause},
                              {"directional_pause", c.controller.templates.directional_pause},
                              {"invalid_uniform", c.controller.templates.invalid_uniform}};
  ctrl["selection_mode"] =
      c.controller.selection == SelectionMode::kSample ? "sample" : "argmax";
  ctrl["top_k"] = c.controller.top_k;
  j["controller"] = ctrl;

  j["memory"] = {{"capacity", c.memory.capacity},
                 {"combine_lambda", c.memory.combine_lambda},
                 {"reconcile",
                  {{"dup_threshold", c.memory.reconcile.dup_threshold},
                   {"flash_threshold", c.memory.reconcile.flash_threshold},
                   {"rare_threshold", c.memory.reconcile.rare_threshold},
                   {"rare_bonus", c.memory.reconcile.rare_bonus},
                   {"reestimate_lambda", c.memory.reconcile.reestimate_lambda},
                   {"horizon", c.memory.reconcile.horizon},
                   {"prune_max_age_rank", c.memory.reconcile.prune_max_age_rank},
                   {"prune_min_retrievals", c.memory.reconcile.prune_min_retrievals}}}};

  j["features"] = {{"reconcile_interval", c.features.reconcile_interval},
                   {"ablate_memory", c.features.ablate_memory},
                   {"injector", c.features.injector},
                   {"trace_enabled", c.features.trace_enabled}};
  return j;
}

// ---------------------------------------------------------------------------
// Reference configuration
// ---------------------------------------------------------------------------

Scenario reference_scenario() {
  Scenario s;
  s.arena = Arena{0.0, 40.0, 0.0, 40.0};
  s.agent_position = {20.0, 20.0};
  s.agent_heading = 0.0;
  s.agent_speed = 0.5;
  s.peer_positions = {{26.0, 23.0}, {27.0, 25.0}, {25.0, 26.0}, {28.0, 22.0}, {24.0, 27.0}};
  s.peer_motion = PeerMotion::kRandomWalk;
  s.peer_walk_step = 0.1;
  s.threat = ThreatScript{false, 0, {0.0, 0.0}, 0.25};
  s.safe_region = SafeRegion{{8.0, 8.0}, 3.0};
  s.needs.targets = Eigen::Vector3d{1.0, 1.0, 1.0};
  s.observation.num_peers = 4;
  return s;
}

Scenario lonely_scenario() {
  Scenario s = reference_scenario();
  s.agent_position = {6.0, 34.0};
  s.peer_positions = {{32.0, 8.0}, {33.5, 9.0}, {31.0, 9.5}, {32.5, 6.5},
                      {30.5, 7.0}, {34.0, 7.5}};
  return s;
}

Scenario threat_scenario() {
  Scenario s = reference_scenario();
  s.agent_position = {20.0, 20.0};
  s.peer_positions = {{23.0, 20.0}, {20.0, 23.0}, {17.5, 18.5}};
  s.peer_motion = PeerMotion::kStatic;
  s.threat = ThreatScript{true, 5, {34.0, 20.0}, 0.3};
  s.safe_region = SafeRegion{{8.0, 20.0}, 3.0};
  return s;
}

Scenario comfort_scenario() {
  Scenario s = reference_scenario();
  s.agent_position = {20.0, 20.0};
  s.peer_positions = {{22.0, 20.0}, {20.0, 23.0}};
  s.peer_motion = PeerMotion::kStatic;
  return s;
}

RunConfig reference_config() {
  RunConfig c;
  c.seed = 42;
  c.steps = 200;
  c.scenario_path = "scenario_reference.json";
  c.scenario = reference_scenario();

  // Affect channels: (lonely-like, crowded-like) driven by the
  // (affiliation, independence, safety) drives. An unmet need shows up as
  // negative valence and positive magnitude on its channel.
  c.controller.affect.valence_map = (Eigen::MatrixXd(2, 3) <<  //
                                         -1.0, 0.0, 0.0,       //
                                     0.0, -1.0, 0.0)
                                        .finished();
  c.controller.affect.magnitude_map = (Eigen::MatrixXd(2, 3) <<  //
                                           1.0, 0.0, 0.0,        //
                                       0.0, 1.0, 0.0)
                                          .finished();
  c.controller.affect.drive_gains = Eigen::Vector3d{1.0, 1.0, 1.0};

  // Drive routing: loneliness seeks, crowding avoids, danger flees, and
  // satisfied needs lean toward rest.
  c.controller.hints.need_map = (Eigen::MatrixXd(5, 3) <<  //
                                     1.2, -0.4, 0.0,       // SEEK
                                 -0.4, 1.2, 0.0,           // AVOID
                                 0.3, 0.3, -0.2,           // EXPLORE
                                 0.0, 0.0, 2.0,            // FLEE
                                 -0.5, -0.5, -0.5)         // REST
                                    .finished();
  // Fused-affect routing over [v1, v2, m1, m2, a, d1, d2, d3]; the drive
  // block stays zero (the need path already carries it).
  c.controller.hints.affect_map = (Eigen::MatrixXd(5, 8) <<                    //
                                       -0.4, 0.0, 0.3, 0.0, 0.0, 0, 0, 0,     // SEEK
                                   0.0, -0.4, 0.0, 0.3, 0.0, 0, 0, 0,         // AVOID
                                   0.3, 0.3, -0.2, -0.2, -0.3, 0, 0, 0,       // EXPLORE
                                   0.0, 0.0, 0.0, 0.0, 0.4, 0, 0, 0,          // FLEE
                                   0.2, 0.2, -0.3, -0.3, -0.6, 0, 0, 0)       // REST
                                      .finished();
  c.controller.hints.alpha_need = 1.0;
  c.controller.hints.alpha_mem = 1.0;
  c.controller.hints.alpha_affect = 0.5;

  c.controller.traits.gains = Eigen::Vector3d{1.0, 1.0, 1.0};
  c.controller.tau_policy = TemperatureSchedule{2.0, 0.25};
  c.controller.tau_action = TemperatureSchedule{1.0, 0.05};
  c.controller.fusion = FusionParams{0.6, 0.15};
  c.controller.mood = MoodParams{true, 0.95};
  c.controller.success = SuccessParams{SuccessParams::Mode::kDriveReduction, 1.0};
  c.controller.templates = ActionTemplates{};
  c.controller.selection = SelectionMode::kSample;
  c.controller.top_k = 4;

  c.memory.capacity = 256;
  c.memory.combine_lambda = 0.5;
  c.memory.reconcile = ReconcileConfig{};

  c.features.reconcile_interval = 50;
  c.features.ablate_memory = false;
  c.features.injector = "";
  c.features.trace_enabled = true;
  return c;
}

StoreConfig store_config_from(const RunConfig& c, bool audit_access) {
  StoreConfig sc;
  sc.capacity = c.memory.capacity;
  sc.key_dim = kCategoryDim;
  sc.channels = c.controller.channels();
  sc.drives = c.controller.drives();
  sc.policies = kNumPolicies;
  sc.combine_lambda = c.memory.combine_lambda;
  sc.flash_threshold = c.memory.reconcile.flash_threshold;
  sc.audit_access = audit_access;
  return sc;
}

}  // namespace emoctl
