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

#ifndef EMOCTL_WORLD_HPP
#define EMOCTL_WORLD_HPP

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "emoctl/affect.hpp"
#include "emoctl/memory.hpp"
#include "emoctl/policy.hpp"
#include "emoctl/rng.hpp"

namespace emoctl {

// ---------------------------------------------------------------------------
// Scenario description (loaded from the scenario JSON)
// ---------------------------------------------------------------------------

struct Arena {
  double xmin = 0.0, xmax = 40.0;
  double ymin = 0.0, ymax = 40.0;
};

struct SafeRegion {
  Eigen::Vector2d center{0.0, 0.0};
  double radius = 3.0;
};

struct ThreatScript {
  bool enabled = false;
  int spawn_tick = 0;
  Eigen::Vector2d spawn_position{0.0, 0.0};
  double speed = 0.25;  // meters per step, toward the agent
};

enum class PeerMotion { kStatic, kRandomWalk };

/// Need response curves. Affiliation decays once the nearest peer leaves the
/// comfort band; independence decays with crowding (peer density above the
/// comfort level, or peers inside the personal-space radius); safety decays
/// with threat proximity.
struct NeedModel {
  Eigen::VectorXd targets;          // length L, each in [0,1]
  double comfort_lo = 1.0;          // personal-space radius (meters)
  double comfort_hi = 4.0;          // farthest comfortable nearest-peer distance
  double affiliation_falloff = 8.0;  // meters from comfort_hi to affiliation 0
  double density_comfort = 0.5;     // density at which crowding starts
  double independence_falloff = 0.5;  // density span from comfort to independence 0
  double threat_half_distance = 5.0;  // threat distance at which safety = 0.5
};

struct ObservationConfig {
  int num_peers = 4;          // P: peer slots in the observation
  double density_radius = 6.0;  // peers within this radius count toward density
  double density_cap = 8.0;     // peer count mapped to density 1.0
};

struct Scenario {
  Arena arena;
  Eigen::Vector2d agent_position{20.0, 20.0};
  double agent_heading = 0.0;
  double agent_speed = 0.5;  // meters per step
  std::vector<Eigen::Vector2d> peer_positions;
  PeerMotion peer_motion = PeerMotion::kStatic;
  double peer_walk_step = 0.1;  // random-walk step length
  ThreatScript threat;
  SafeRegion safe_region;
  NeedModel needs;
  ObservationConfig observation;
};

// ---------------------------------------------------------------------------
// World state and observation
// ---------------------------------------------------------------------------

struct WorldState {
  Eigen::Vector2d agent_position;
  double agent_heading = 0.0;
  double agent_speed = 0.5;
  std::vector<Eigen::Vector2d> peers;
  bool threat_active = false;
  bool threat_spent = false;  // despawned threats stay gone
  Eigen::Vector2d threat_position{0.0, 0.0};
  int tick = 0;
  Rng rng;  // world substream: peer walks

  WorldState() : rng(0) {}
};

WorldState make_world(const Scenario& scenario, std::uint64_t world_seed);

struct PeerSlot {
  double bearing = 0.0;   // world-frame, (-pi, pi]
  double distance = 0.0;  // meters
  bool present = false;   // absent slots are flag + zeros, never sentinels
};

/// Raw sensory state: nearest-P peer slots, local density, threat slot, and
/// proprioception. Fixed flattened dimension 3P + 8 for a given P.
struct Observation {
  std::vector<PeerSlot> peers;  // size P, nearest first
  double density = 0.0;         // in [0, 1]
  double threat_bearing = 0.0;
  double threat_distance = 0.0;
  bool threat_present = false;
  double heading = 0.0;
  Eigen::Vector2d position{0.0, 0.0};
  double speed = 0.0;

  Eigen::VectorXd flatten() const;
  static Observation unflatten(const Eigen::VectorXd& x, int num_peers);
};

inline int observation_dim(int num_peers) { return 3 * num_peers + 8; }

/// Concrete per-situation scalars used to instantiate policies into actions.
/// Bearings are world-frame radians in (-pi, pi]; flags mark absent referents.
struct InstantiationParams {
  double bearing_to_peers = 0.0;  // toward the centroid of observed peers
  bool peers_valid = false;
  double distance_to_nearest_peer = 0.0;
  double bearing_to_threat = 0.0;
  bool threat_valid = false;
  double bearing_to_safe_region = 0.0;
  bool safe_region_valid = false;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Wraps an angle into (-pi, pi].
double wrap_angle(double radians);

/// Deterministic observation synthesis (step 1). Nearest-P selection with
/// distance-then-index tie-break.
Observation observe(const WorldState& world, const Scenario& scenario);

/// Fuzzy categorization (step 2): triangular density memberships
/// {low, med, high} crossed with crisp threat {absent, present}, L2
/// normalized. A pure function of the observation alone.
std::pair<CategoryVector, InstantiationParams> categorize(const Observation& x,
                                                          const Scenario& scenario);

inline constexpr int kCategoryDim = 6;

/// Situational needs (step 3) from the geometric peer layout and threat.
Needs assess_needs(const CategoryVector& c, const InstantiationParams& y,
                   const Observation& x, const NeedModel& model);

/// Advances the world one step (step 16): agent kinematics, scripted peer
/// motion, threat script. Deterministic given the world rng state.
void execute(WorldState& world, const Scenario& scenario, ActionId action);

}  // namespace emoctl

#endif  // EMOCTL_WORLD_HPP
