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

#include "emoctl/controller.hpp"

#include <cassert>
#include <cmath>

#include "emoctl/hash.hpp"

namespace emoctl {

namespace {

bool in01(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

double cosine_template(double heading, double referent_bearing) {
  return 0.5 * (1.0 + std::cos(heading - referent_bearing));
}

}  // namespace

void validate(const ControllerParams& p) {
  const Eigen::Index channels = p.affect.valence_map.rows();
  const Eigen::Index drives = p.affect.drive_gains.size();
  if (p.affect.valence_map.cols() != drives || p.affect.magnitude_map.rows() != channels ||
      p.affect.magnitude_map.cols() != drives) {
    throw std::invalid_argument("affect maps disagree on channel/drive dimensions");
  }
  if ((p.affect.drive_gains.array() < 0.0).any()) {
    throw std::invalid_argument("drive gains must be nonnegative");
  }
  if (p.hints.need_map.rows() != kNumPolicies || p.hints.need_map.cols() != drives) {
    throw std::invalid_argument("need hint map must be |Pi| x L");
  }
  if (p.hints.affect_map.rows() != kNumPolicies ||
      p.hints.affect_map.cols() != 2 * channels + 1 + drives) {
    throw std::invalid_argument("affect hint map must be |Pi| x (2B+1+L)");
  }
  if (!p.hints.need_map.allFinite() || !p.hints.affect_map.allFinite() ||
      !p.affect.valence_map.allFinite() || !p.affect.magnitude_map.allFinite()) {
    throw std::invalid_argument("hint/affect maps must be finite");
  }
  if (p.hints.alpha_need < 0.0 || p.hints.alpha_mem < 0.0 || p.hints.alpha_affect < 0.0 ||
      p.hints.alpha_need + p.hints.alpha_mem + p.hints.alpha_affect <= 0.0) {
    throw std::invalid_argument("hint fusion weights must be nonnegative with positive sum");
  }
  if (p.traits.gains.size() != drives || (p.traits.gains.array() < 0.0).any()) {
    throw std::invalid_argument("trait gains must be nonnegative with one entry per drive");
  }
  for (const TemperatureSchedule& tau : {p.tau_policy, p.tau_action}) {
    if (!(tau.tau_max > tau.tau_min) || !(tau.tau_min > 0.0)) {
      throw std::invalid_argument("temperature schedule requires tau_max > tau_min > 0");
    }
  }
  if (!in01(p.fusion.beta) || !in01(p.fusion.mood_weight)) {
    throw std::invalid_argument("fusion constants must lie in [0,1]");
  }
  if (p.mood.gamma < 0.9 || p.mood.gamma > 0.99) {
    throw std::invalid_argument("mood gamma must lie in [0.9, 0.99]");
  }
  if (p.success.eta < 0.0 || !std::isfinite(p.success.eta)) {
    throw std::invalid_argument("success gain must be a nonnegative finite value");
  }
  const ActionTemplates& t = p.templates;
  for (double v : {t.explore_move, t.explore_pause, t.rest_move, t.rest_pause,
                   t.directional_pause, t.invalid_uniform}) {
    if (!in01(v)) throw std::invalid_argument("action template constants must lie in [0,1]");
  }
  if (p.top_k < 1) throw std::invalid_argument("top_k must be >= 1");
}

std::string param_group_hash(const ControllerParams& p) {
  ParamHasher h;
  h.update("affect");
  h.update(p.affect.valence_map);
  h.update(p.affect.magnitude_map);
  h.update(p.affect.drive_gains);
  h.update("hints");
  h.update(p.hints.need_map);
  h.update(p.hints.affect_map);
  h.update(p.hints.alpha_need);
  h.update(p.hints.alpha_mem);
  h.update(p.hints.alpha_affect);
  h.update("traits");
  h.update(p.traits.gains);
  h.update("temperatures");
  h.update(p.tau_policy.tau_max);
  h.update(p.tau_policy.tau_min);
  h.update(p.tau_action.tau_max);
  h.update(p.tau_action.tau_min);
  h.update("fusion");
  h.update(p.fusion.beta);
  h.update(p.fusion.mood_weight);
  h.update("mood");
  h.update(p.mood.enabled);
  h.update(p.mood.gamma);
  h.update("success");
  h.update(p.success.mode == SuccessParams::Mode::kDriveReduction ? 0 : 1);
  h.update(p.success.eta);
  h.update("templates");
  h.update(p.templates.explore_move);
  h.update(p.templates.explore_pause);
  h.update(p.templates.rest_move);
  h.update(p.templates.rest_pause);
  h.update(p.templates.directional_pause);
  h.update(p.templates.invalid_uniform);
  h.update("selection");
  h.update(p.selection == SelectionMode::kSample ? 0 : 1);
  h.update(p.top_k);
  return h.hex();
}

MoodBuffer make_mood(const MoodParams& params, Eigen::Index channels, Eigen::Index drives) {
  if (params.gamma < 0.9 || params.gamma > 0.99) {
    throw std::invalid_argument("mood gamma must lie in [0.9, 0.99]");
  }
  return MoodBuffer{AffectState::zero(channels, drives), params.gamma};
}

MoodBuffer update_mood(const MoodBuffer& buffer, const AffectState& z) {
  const double g = buffer.gamma;
  MoodBuffer out;
  out.gamma = g;
  out.average.valence = g * buffer.average.valence + (1.0 - g) * z.valence;
  out.average.magnitude = g * buffer.average.magnitude + (1.0 - g) * z.magnitude;
  out.average.arousal = g * buffer.average.arousal + (1.0 - g) * z.arousal;
  out.average.drive = g * buffer.average.drive + (1.0 - g) * z.drive;
  clip_to_ranges(out.average);
  return out;
}

Eigen::VectorXd score_actions(const Eigen::VectorXd& q, const InstantiationParams& y,
                              const ActionTemplates& templates) {
  if (q.size() != kNumPolicies) throw std::invalid_argument("score_actions: |q| != |Pi|");
  if (std::abs(q.sum() - 1.0) > 1e-9 || (q.array() < 0.0).any()) {
    throw std::invalid_argument("score_actions: q is not a probability vector");
  }

  // template_pi(u) per policy row; filled per action below.
  Eigen::MatrixXd per_policy(kNumPolicies, kNumActions);
  for (int u = 0; u < kNumActions; ++u) {
    const ActionId action = action_from_index(u);
    const bool move = is_move(action);
    const double heading = move ? action_heading(action) : 0.0;

    auto directional = [&](double bearing, bool valid) {
      if (!valid) return templates.invalid_uniform;
      return move ? cosine_template(heading, bearing) : templates.directional_pause;
    };

    per_policy(static_cast<int>(PolicyId::kSeek), u) =
        directional(y.bearing_to_peers, y.peers_valid);
    per_policy(static_cast<int>(PolicyId::kAvoid), u) =
        directional(wrap_angle(y.bearing_to_peers + 3.14159265358979323846), y.peers_valid);
    per_policy(static_cast<int>(PolicyId::kFlee), u) =
        directional(y.bearing_to_safe_region, y.safe_region_valid);
    per_policy(static_cast<int>(PolicyId::kExplore), u) =
        move ? templates.explore_move : templates.explore_pause;
    per_policy(static_cast<int>(PolicyId::kRest), u) =
        move ? templates.rest_move : templates.rest_pause;
  }

  return per_policy.transpose() * q;
}

ActionId select_action(const Eigen::VectorXd& scores, double arousal, SelectionMode mode,
                       const TemperatureSchedule& schedule, Rng& rng) {
  if (scores.size() != kNumActions) throw std::invalid_argument("select_action: |s| != |U|");
  if (!scores.allFinite()) throw std::invalid_argument("select_action: non-finite scores");

  if (mode == SelectionMode::kArgmax) {
    Eigen::Index best = 0;
    scores.maxCoeff(&best);  // Eigen returns the lowest index on ties
    return action_from_index(static_cast<int>(best));
  }
  const Eigen::VectorXd p = softmax(scores, schedule.at(arousal));
  return action_from_index(sample_discrete(p, rng.uniform01()));
}

std::pair<AffectState, double> reappraise(const AffectState& z_pre_fused,
                                          const Needs& needs_pre, const Needs& needs_post,
                                          const AffectState& z_need_post,
                                          const SuccessParams& params) {
  if (needs_pre.size() != needs_post.size()) {
    throw std::invalid_argument("reappraise: need-length mismatch");
  }
  double raw = 0.0;
  if (params.mode == SuccessParams::Mode::kDriveReduction) {
    raw = ((needs_pre.targets - needs_pre.values).array().abs() -
           (needs_post.targets - needs_post.values).array().abs())
              .sum();
  } else {
    // Hedonic comparison: change in signed pleasantness mass between the
    // post-act appraisal and the pre-act fused affect.
    raw = (z_need_post.valence.array() * z_need_post.magnitude.array()).sum() -
          (z_pre_fused.valence.array() * z_pre_fused.magnitude.array()).sum();
  }
  const double succ = std::clamp(params.eta * raw, -1.0, 1.0);
  return {z_need_post, succ};
}

Controller::Controller(ControllerParams params, std::uint64_t run_seed)
    : params_(std::move(params)),
      mood_(make_mood(params_.mood, params_.channels(), params_.drives())),
      seed_(run_seed) {
  validate(params_);
}

void Controller::restore_state(const MoodBuffer& mood, int tick_index) {
  mood_ = mood;
  tick_index_ = tick_index;
}

TickTrace Controller::tick(const Observation& x, const Collaborators& collaborators,
                           const MemoryBinding& memory, bool ablate_memory) {
  if (memory.store == nullptr || memory.reader == nullptr || memory.writer == nullptr) {
    throw std::invalid_argument("tick: memory binding is incomplete");
  }
  TickTrace trace;
  trace.tick = tick_index_;
  trace.x = x;

  // A1: classify the situation.
  std::tie(trace.c, trace.y) = collaborators.categorize(x);

  // A2: need appraisal and need-based hints.
  trace.needs = collaborators.assess_needs(trace.c, trace.y, x);
  trace.z_need = affect_from_needs(trace.needs, params_.affect);
  trace.h_need = need_hints(trace.z_need, params_.traits, params_.hints);

  // A3: the single bounded memory read of the tick.
  if (ablate_memory) {
    trace.retrieval =
        RetrievalResult::empty(params_.channels(), params_.drives(), kNumPolicies);
  } else {
    auto phase = memory.store->enter_phase(TickPhase::kRetrieval);
    trace.retrieval = memory.store->retrieve(*memory.reader, trace.c, params_.top_k);
  }

  // A4: affective integration and policy vote.
  const AffectState* mood_bias = params_.mood.enabled ? &mood_.average : nullptr;
  trace.z = fuse_affect(trace.z_need, trace.retrieval.z_mem, trace.retrieval.reliability,
                        params_.fusion, mood_bias);
  const PolicyHints h_aff = affect_hints(trace.z, params_.hints);
  trace.h = fuse_hints(trace.h_need, trace.retrieval.h_mem, h_aff, params_.hints);
  trace.q = policy_distribution(trace.h, trace.z.arousal, params_.tau_policy);

  // A5: instantiate policies as action scores.
  trace.action_scores = score_actions(trace.q, trace.y, params_.templates);

  // A6: select and execute.
  Rng action_rng(derive_stream(seed_, "action", static_cast<std::uint64_t>(tick_index_)));
  trace.action = select_action(trace.action_scores, trace.z.arousal, params_.selection,
                               params_.tau_action, action_rng);
  trace.x_post = collaborators.execute_observe(trace.action);

  // A7: reappraise the outcome.
  std::tie(trace.c_post, trace.y_post) = collaborators.categorize(trace.x_post);
  trace.needs_post = collaborators.assess_needs(trace.c_post, trace.y_post, trace.x_post);
  const AffectState z_need_post = affect_from_needs(trace.needs_post, params_.affect);
  std::tie(trace.z_post, trace.succ) =
      reappraise(trace.z, trace.needs, trace.needs_post, z_need_post, params_.success);

  // A8: the single memory write of the tick.
  const Episode episode{trace.c, trace.z, trace.h, trace.z_post, trace.succ};
  {
    auto phase = memory.store->enter_phase(TickPhase::kStorage);
    trace.episode_index = memory.store->store(*memory.writer, episode);
  }

  // Mood trails the fused affect; controller-local, never stored or keyed.
  if (params_.mood.enabled) mood_ = update_mood(mood_, trace.z);

  ++tick_index_;
  return trace;
}

}  // namespace emoctl
