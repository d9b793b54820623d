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

#ifndef EMOCTL_CONTROLLER_HPP
#define EMOCTL_CONTROLLER_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "emoctl/affect.hpp"
#include "emoctl/memory.hpp"
#include "emoctl/policy.hpp"
#include "emoctl/rng.hpp"
#include "emoctl/world.hpp"

namespace emoctl {

// ---------------------------------------------------------------------------
// Controller parameters (frozen for the lifetime of a run)
// ---------------------------------------------------------------------------

struct MoodParams {
  bool enabled = true;
  double gamma = 0.95;  // leak factor, must lie in [0.9, 0.99]
};

struct SuccessParams {
  enum class Mode { kDriveReduction, kHedonic };
  Mode mode = Mode::kDriveReduction;
  double eta = 1.0;  // scale gain on the raw score
};

/// Per-policy action score templates; every template value lies in [0,1].
struct ActionTemplates {
  double explore_move = 0.6;
  double explore_pause = 0.2;
  double rest_move = 0.1;
  double rest_pause = 1.0;
  double directional_pause = 0.25;  // PAUSE score under SEEK/AVOID/FLEE
  double invalid_uniform = 0.5;     // used when a template's referent is absent
};

enum class SelectionMode { kSample, kArgmax };

struct ControllerParams {
  AffectMaps affect;
  HintMaps hints;
  TraitParams traits;
  TemperatureSchedule tau_policy{2.0, 0.25};
  TemperatureSchedule tau_action{1.0, 0.05};
  FusionParams fusion{0.6, 0.15};
  MoodParams mood;
  SuccessParams success;
  ActionTemplates templates;
  SelectionMode selection = SelectionMode::kSample;
  int top_k = 4;

  Eigen::Index channels() const { return affect.valence_map.rows(); }
  Eigen::Index drives() const { return affect.drive_gains.size(); }
};

/// Throws std::invalid_argument when dimensions disagree or a constant is
/// outside its documented range.
void validate(const ControllerParams& params);

/// Hash over every frozen parameter group; recorded before a run and compared
/// after it to witness frozen deployment.
std::string param_group_hash(const ControllerParams& params);

// ---------------------------------------------------------------------------
// Mood (leaky affect integrator)
// ---------------------------------------------------------------------------

struct MoodBuffer {
  AffectState average;
  double gamma = 0.95;
};

MoodBuffer make_mood(const MoodParams& params, Eigen::Index channels, Eigen::Index drives);

/// average <- gamma * average + (1 - gamma) * z, fieldwise. Convexity keeps
/// every field in range.
MoodBuffer update_mood(const MoodBuffer& buffer, const AffectState& z);

// ---------------------------------------------------------------------------
// Action instantiation and selection (steps 13-15)
// ---------------------------------------------------------------------------

/// Policy-weighted action scores s(u) = sum_pi q(pi) * template_pi(u).
/// Directional templates score cosine alignment of the move heading with the
/// template's referent bearing, mapped to [0,1]; templates with an absent
/// referent score all actions uniformly.
Eigen::VectorXd score_actions(const Eigen::VectorXd& q, const InstantiationParams& y,
                              const ActionTemplates& templates);

/// Samples from softmax(s / tau2(a)) or takes the argmax with lowest-index
/// tie-break. Deterministic given the rng state.
ActionId select_action(const Eigen::VectorXd& scores, double arousal, SelectionMode mode,
                       const TemperatureSchedule& schedule, Rng& rng);

/// Post-action affect and success (steps 17-18). The post-action affect is
/// the need-based appraisal of the post-act situation; success is scaled
/// aggregate drive reduction (or a hedonic comparison when configured),
/// clipped to [-1, +1].
std::pair<AffectState, double> reappraise(const AffectState& z_pre_fused,
                                          const Needs& needs_pre, const Needs& needs_post,
                                          const AffectState& z_need_post,
                                          const SuccessParams& params);

// ---------------------------------------------------------------------------
// Tick trace
// ---------------------------------------------------------------------------

inline constexpr const char* kTraceSchemaVersion = "emoctl-trace-1";

/// Complete record of one control tick; append-only log record driving the
/// golden tests, replay, and audits.
struct TickTrace {
  int tick = 0;
  Observation x;
  CategoryVector c;
  InstantiationParams y;
  Needs needs;
  AffectState z_need;
  PolicyHints h_need;
  RetrievalResult retrieval;
  AffectState z;
  PolicyHints h;
  Eigen::VectorXd q;             // policy probabilities
  Eigen::VectorXd action_scores;  // s(u), length |U|
  ActionId action = ActionId::kPause;
  Observation x_post;
  CategoryVector c_post;
  InstantiationParams y_post;
  Needs needs_post;
  AffectState z_post;
  double succ = 0.0;
  std::uint64_t episode_index = 0;
};

// ---------------------------------------------------------------------------
// Controller
// ---------------------------------------------------------------------------

using Categorizer =
    std::function<std::pair<CategoryVector, InstantiationParams>(const Observation&)>;

using NeedAssessor = std::function<Needs(const CategoryVector&, const InstantiationParams&,
                                         const Observation&)>;

/// Executes the chosen action against the world and returns the post-act
/// observation.
using Effector = std::function<Observation(ActionId)>;

/// The world-facing collaborators a controller drives: the categorizer, the
/// need assessor, and the effector. All hardwired functions of their inputs.
struct Collaborators {
  Categorizer categorize;
  NeedAssessor assess_needs;
  Effector execute_observe;
};

struct MemoryBinding {
  EpisodeStore* store = nullptr;
  const ReaderToken* reader = nullptr;
  const WriterToken* writer = nullptr;
};

/// One agent's control loop. Parameters are fixed at construction; all
/// mutable state is the mood buffer and the tick counter. Single-threaded
/// over its tick; distinct instances share nothing.
class Controller {
 public:
  Controller(ControllerParams params, std::uint64_t run_seed);

  /// Runs steps 1-20 for one tick: categorize, appraise, retrieve (phase
  /// A3), fuse, select and instantiate a policy, act, reappraise, store
  /// (phase A8). With ablate_memory the retrieval step is skipped and the
  /// empty result used in its place; the write still happens.
  TickTrace tick(const Observation& x, const Collaborators& collaborators,
                 const MemoryBinding& memory, bool ablate_memory = false);

  const ControllerParams& params() const { return params_; }
  const MoodBuffer& mood() const { return mood_; }
  int ticks_run() const { return tick_index_; }
  std::uint64_t seed() const { return seed_; }

  /// Transplants loop state into a fresh controller (used by harness code
  /// that rebuilds a controller mid-run).
  void restore_state(const MoodBuffer& mood, int tick_index);

 private:
  ControllerParams params_;
  MoodBuffer mood_;
  int tick_index_ = 0;
  std::uint64_t seed_;
};

}  // namespace emoctl

#endif  // EMOCTL_CONTROLLER_HPP
