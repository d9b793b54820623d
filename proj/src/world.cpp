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

#include "emoctl/world.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace emoctl {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

double clamp(double v, double lo, double hi) { return std::min(hi, std::max(lo, v)); }

Eigen::Vector2d clamp_to_arena(const Eigen::Vector2d& p, const Arena& arena) {
  return {clamp(p.x(), arena.xmin, arena.xmax), clamp(p.y(), arena.ymin, arena.ymax)};
}

double reflect(double v, double lo, double hi) {
  for (int i = 0; i < 8 && (v < lo || v > hi); ++i) {
    if (v < lo) v = lo + (lo - v);
    if (v > hi) v = hi - (v - hi);
  }
  return clamp(v, lo, hi);
}

// Triangular partition of unity over density with knots at 0, 0.5, 1.
void density_memberships(double density, double& low, double& med, double& high) {
  const double d = clamp(density, 0.0, 1.0);
  low = std::max(0.0, 1.0 - d / 0.5);
  med = 1.0 - std::abs(d - 0.5) / 0.5;
  high = std::max(0.0, (d - 0.5) / 0.5);
}

}  // namespace

double wrap_angle(double radians) {
  double r = std::fmod(radians + kPi, kTwoPi);
  if (r <= 0.0) r += kTwoPi;
  return r - kPi;
}

WorldState make_world(const Scenario& scenario, std::uint64_t world_seed) {
  WorldState world;
  world.agent_position = clamp_to_arena(scenario.agent_position, scenario.arena);
  world.agent_heading = wrap_angle(scenario.agent_heading);
  world.agent_speed = scenario.agent_speed;
  world.peers.reserve(scenario.peer_positions.size());
  for (const Eigen::Vector2d& p : scenario.peer_positions) {
    world.peers.push_back(clamp_to_arena(p, scenario.arena));
  }
  if (scenario.threat.enabled && scenario.threat.spawn_tick <= 0) {
    world.threat_active = true;
    world.threat_position = clamp_to_arena(scenario.threat.spawn_position, scenario.arena);
  }
  world.rng = Rng(world_seed);
  return world;
}

Eigen::VectorXd Observation::flatten() const {
  Eigen::VectorXd x(observation_dim(static_cast<int>(peers.size())));
  Eigen::Index i = 0;
  for (const PeerSlot& slot : peers) {
    x[i++] = slot.bearing;
    x[i++] = slot.distance;
    x[i++] = slot.present ? 1.0 : 0.0;
  }
  x[i++] = density;
  x[i++] = threat_bearing;
  x[i++] = threat_distance;
  x[i++] = threat_present ? 1.0 : 0.0;
  x[i++] = heading;
  x[i++] = position.x();
  x[i++] = position.y();
  x[i++] = speed;
  return x;
}

Observation Observation::unflatten(const Eigen::VectorXd& x, int num_peers) {
  if (x.size() != observation_dim(num_peers)) {
    throw std::invalid_argument("observation vector has unexpected dimension");
  }
  Observation o;
  Eigen::Index i = 0;
  o.peers.resize(static_cast<std::size_t>(num_peers));
  for (PeerSlot& slot : o.peers) {
    slot.bearing = x[i++];
    slot.distance = x[i++];
    slot.present = x[i++] != 0.0;
  }
  o.density = x[i++];
  o.threat_bearing = x[i++];
  o.threat_distance = x[i++];
  o.threat_present = x[i++] != 0.0;
  o.heading = x[i++];
  o.position.x() = x[i++];
  o.position.y() = x[i++];
  o.speed = x[i++];
  return o;
}

Observation observe(const WorldState& world, const Scenario& scenario) {
  const ObservationConfig& cfg = scenario.observation;
  Observation x;
  x.peers.resize(static_cast<std::size_t>(cfg.num_peers));

  std::vector<std::size_t> order(world.peers.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> distance(world.peers.size());
  for (std::size_t i = 0; i < world.peers.size(); ++i) {
    distance[i] = (world.peers[i] - world.agent_position).norm();
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (distance[a] != distance[b]) return distance[a] < distance[b];
    return a < b;
  });

  for (std::size_t slot = 0; slot < x.peers.size() && slot < order.size(); ++slot) {
    const Eigen::Vector2d offset = world.peers[order[slot]] - world.agent_position;
    x.peers[slot].bearing = wrap_angle(std::atan2(offset.y(), offset.x()));
    x.peers[slot].distance = distance[order[slot]];
    x.peers[slot].present = true;
  }

  int nearby = 0;
  for (double d : distance) {
    if (d <= cfg.density_radius) ++nearby;
  }
  x.density = clamp(static_cast<double>(nearby) / cfg.density_cap, 0.0, 1.0);

  if (world.threat_active) {
    const Eigen::Vector2d offset = world.threat_position - world.agent_position;
    x.threat_bearing = wrap_angle(std::atan2(offset.y(), offset.x()));
    x.threat_distance = offset.norm();
    x.threat_present = true;
  }

  x.heading = world.agent_heading;
  x.position = world.agent_position;
  x.speed = world.agent_speed;
  return x;
}

std::pair<CategoryVector, InstantiationParams> categorize(const Observation& x,
                                                          const Scenario& scenario) {
  double low, med, high;
  density_memberships(x.density, low, med, high);

  // (low, med, high) x (threat absent, threat present), L2 normalized.
  Eigen::VectorXd raw = Eigen::VectorXd::Zero(kCategoryDim);
  const int block = x.threat_present ? 3 : 0;
  raw[block + 0] = low;
  raw[block + 1] = med;
  raw[block + 2] = high;
  CategoryVector key{raw / raw.norm()};

  InstantiationParams y;
  Eigen::Vector2d centroid_offset = Eigen::Vector2d::Zero();
  int present = 0;
  for (const PeerSlot& slot : x.peers) {
    if (!slot.present) continue;
    centroid_offset +=
        slot.distance * Eigen::Vector2d(std::cos(slot.bearing), std::sin(slot.bearing));
    ++present;
  }
  if (present > 0) {
    centroid_offset /= static_cast<double>(present);
    y.bearing_to_peers = wrap_angle(std::atan2(centroid_offset.y(), centroid_offset.x()));
    y.peers_valid = true;
    y.distance_to_nearest_peer = x.peers.front().distance;
  }
  if (x.threat_present) {
    y.bearing_to_threat = x.threat_bearing;
    y.threat_valid = true;
  }
  const Eigen::Vector2d to_safe = scenario.safe_region.center - x.position;
  y.bearing_to_safe_region = wrap_angle(std::atan2(to_safe.y(), to_safe.x()));
  y.safe_region_valid = true;
  return {key, y};
}

Needs assess_needs(const CategoryVector&, const InstantiationParams& y,
                   const Observation& x, const NeedModel& model) {
  const Eigen::Index length = model.targets.size();
  Eigen::VectorXd values(length);

  // Affiliation: full inside the comfort band, ramping to zero with distance;
  // zero when no peers are observed at all.
  double affiliation = 0.0;
  if (y.peers_valid) {
    const double d = y.distance_to_nearest_peer;
    affiliation = d <= model.comfort_hi
                      ? 1.0
                      : std::max(0.0, 1.0 - (d - model.comfort_hi) / model.affiliation_falloff);
  }
  values[0] = affiliation;

  // Independence: eroded by crowding, either as density above the comfort
  // level or as a peer inside the personal-space radius.
  double by_density = 1.0;
  if (x.density > model.density_comfort) {
    by_density = std::max(0.0, 1.0 - (x.density - model.density_comfort) /
                                         model.independence_falloff);
  }
  double by_proximity = 1.0;
  if (y.peers_valid && y.distance_to_nearest_peer < model.comfort_lo) {
    by_proximity = y.distance_to_nearest_peer / model.comfort_lo;
  }
  values[1] = std::min(by_density, by_proximity);

  if (length > 2) {
    // Safety: rational response curve in threat distance, 0.5 at the
    // half-distance, 1 when no threat is present.
    double safety = 1.0;
    if (x.threat_present) {
      const double d = x.threat_distance;
      const double h = model.threat_half_distance;
      safety = (d * d) / (d * d + h * h);
    }
    values[2] = safety;
  }

  values = values.array().min(1.0).max(0.0).matrix();
  return Needs{values, model.targets};
}

void execute(WorldState& world, const Scenario& scenario, ActionId action) {
  if (is_move(action)) {
    const double heading = action_heading(action);
    world.agent_heading = wrap_angle(heading);
    world.agent_position +=
        world.agent_speed * Eigen::Vector2d(std::cos(heading), std::sin(heading));
    world.agent_position = clamp_to_arena(world.agent_position, scenario.arena);
  }

  if (scenario.peer_motion == PeerMotion::kRandomWalk) {
    for (Eigen::Vector2d& peer : world.peers) {
      const double angle = world.rng.uniform01() * kTwoPi;
      peer.x() = reflect(peer.x() + scenario.peer_walk_step * std::cos(angle),
                         scenario.arena.xmin, scenario.arena.xmax);
      peer.y() = reflect(peer.y() + scenario.peer_walk_step * std::sin(angle),
                         scenario.arena.ymin, scenario.arena.ymax);
    }
  }

  if (world.threat_active) {
    const Eigen::Vector2d offset = world.agent_position - world.threat_position;
    const double distance = offset.norm();
    if (distance > 0.0) {
      world.threat_position += std::min(scenario.threat.speed, distance) * offset / distance;
    }
    world.threat_position = clamp_to_arena(world.threat_position, scenario.arena);
    const double agent_to_safe =
        (world.agent_position - scenario.safe_region.center).norm();
    if (agent_to_safe <= scenario.safe_region.radius) {
      world.threat_active = false;
      world.threat_spent = true;
    }
  } else if (scenario.threat.enabled && !world.threat_spent &&
             world.tick + 1 >= scenario.threat.spawn_tick) {
    world.threat_active = true;
    world.threat_position = clamp_to_arena(scenario.threat.spawn_position, scenario.arena);
  }

  ++world.tick;
}

}  // namespace emoctl
