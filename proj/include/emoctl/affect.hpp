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

#ifndef EMOCTL_AFFECT_HPP
#define EMOCTL_AFFECT_HPP

#include <cmath>
#include <optional>
#include <stdexcept>

#include <Eigen/Dense>

namespace emoctl {

template <typename Scalar>
using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// Per-channel satisfaction levels and homeostatic set-points, both in [0,1].
template <typename Scalar>
struct NeedsT {
  VecX<Scalar> values;
  VecX<Scalar> targets;

  Eigen::Index size() const { return values.size(); }
};

/// Control-signal vector [valence, magnitude, arousal, drive]: one
/// (valence, magnitude) pair per affect channel, a scalar arousal, and one
/// signed drive per need channel.
template <typename Scalar>
struct AffectStateT {
  VecX<Scalar> valence;    // length B, each in [-1, 1]
  VecX<Scalar> magnitude;  // length B, each in [0, 1]
  Scalar arousal{0};       // in [0, 1]
  VecX<Scalar> drive;      // length L, each in [-1, 1]

  static AffectStateT zero(Eigen::Index channels, Eigen::Index drives) {
    AffectStateT z;
    z.valence = VecX<Scalar>::Zero(channels);
    z.magnitude = VecX<Scalar>::Zero(channels);
    z.arousal = Scalar(0);
    z.drive = VecX<Scalar>::Zero(drives);
    return z;
  }

  Eigen::Index channels() const { return valence.size(); }
  Eigen::Index drives() const { return drive.size(); }

  /// Concatenation [v, m, a, d]; dimension 2B + 1 + L.
  VecX<Scalar> flatten() const {
    VecX<Scalar> out(2 * channels() + 1 + drives());
    out << valence, magnitude, arousal, drive;
    return out;
  }
};

/// One preference score per abstract policy; unbounded reals.
template <typename Scalar>
struct PolicyHintsT {
  VecX<Scalar> scores;

  static PolicyHintsT zero(Eigen::Index policies) {
    return PolicyHintsT{VecX<Scalar>::Zero(policies)};
  }

  Eigen::Index size() const { return scores.size(); }
};

/// Fixed maps from drives to affect channels (A2). Row k of valence_map /
/// magnitude_map produces channel k from the drive vector; drive_gains scale
/// the raw need discrepancies.
template <typename Scalar>
struct AffectMapsT {
  MatX<Scalar> valence_map;    // B x L
  MatX<Scalar> magnitude_map;  // B x L
  VecX<Scalar> drive_gains;    // L
};

/// Fixed maps from drives / flattened affect to policy hints, plus the
/// fusion weights for the three hint sources.
template <typename Scalar>
struct HintMapsT {
  MatX<Scalar> need_map;    // |Pi| x L
  MatX<Scalar> affect_map;  // |Pi| x (2B + 1 + L)
  Scalar alpha_need{1};
  Scalar alpha_mem{1};
  Scalar alpha_affect{1};
};

/// Per-actor constant gains applied inside the need-to-hint map. Immutable
/// for the lifetime of a deployment run.
template <typename Scalar>
struct TraitParamsT {
  VecX<Scalar> gains;  // length L, nonnegative
};

/// Affine temperature schedule: high arousal lowers the temperature and
/// sharpens the corresponding softmax.
template <typename Scalar>
struct TemperatureScheduleT {
  Scalar tau_max;
  Scalar tau_min;

  Scalar at(Scalar arousal) const {
    return tau_max - arousal * (tau_max - tau_min);
  }
};

/// Reliability-weighted blend of need- and memory-based affect, with an
/// optional mood bias applied afterwards.
template <typename Scalar>
struct FusionParamsT {
  Scalar beta;         // in [0, 1]; memory weight at reliability 1
  Scalar mood_weight;  // in [0, 1]
};

// ---------------------------------------------------------------------------
// Helpers
// ---------------------------------------------------------------------------

template <typename Scalar>
Scalar clamp_unit(Scalar x) {
  return std::min(Scalar(1), std::max(Scalar(-1), x));
}

template <typename Scalar>
Scalar clamp01(Scalar x) {
  return std::min(Scalar(1), std::max(Scalar(0), x));
}

template <typename Scalar>
bool is_valid(const AffectStateT<Scalar>& z) {
  auto in = [](const VecX<Scalar>& v, Scalar lo, Scalar hi) {
    return v.allFinite() && (v.array() >= lo).all() && (v.array() <= hi).all();
  };
  return in(z.valence, Scalar(-1), Scalar(1)) && in(z.magnitude, Scalar(0), Scalar(1)) &&
         std::isfinite(static_cast<double>(z.arousal)) && z.arousal >= Scalar(0) &&
         z.arousal <= Scalar(1) && in(z.drive, Scalar(-1), Scalar(1));
}

template <typename Scalar>
bool is_valid(const NeedsT<Scalar>& n) {
  auto in01 = [](const VecX<Scalar>& v) {
    return v.allFinite() && (v.array() >= Scalar(0)).all() && (v.array() <= Scalar(1)).all();
  };
  return n.values.size() == n.targets.size() && in01(n.values) && in01(n.targets);
}

template <typename Scalar>
void clip_to_ranges(AffectStateT<Scalar>& z) {
  z.valence = z.valence.array().min(Scalar(1)).max(Scalar(-1)).matrix();
  z.magnitude = z.magnitude.array().min(Scalar(1)).max(Scalar(0)).matrix();
  z.arousal = clamp01(z.arousal);
  z.drive = z.drive.array().min(Scalar(1)).max(Scalar(-1)).matrix();
}

// ---------------------------------------------------------------------------
// Operations (steps 4-5 and 9-12 of the control loop)
// ---------------------------------------------------------------------------

/// Need appraisal: signed drives from gained discrepancies, affect channels
/// from fixed linear maps of the drive vector, arousal as the largest
/// absolute drive.
template <typename Scalar>
AffectStateT<Scalar> affect_from_needs(const NeedsT<Scalar>& needs,
                                       const AffectMapsT<Scalar>& maps) {
  if (needs.values.size() != needs.targets.size() ||
      needs.values.size() != maps.drive_gains.size() ||
      maps.valence_map.cols() != needs.values.size() ||
      maps.magnitude_map.cols() != needs.values.size() ||
      maps.valence_map.rows() != maps.magnitude_map.rows()) {
    throw std::invalid_argument("affect_from_needs: dimension mismatch");
  }
  AffectStateT<Scalar> z;
  z.drive = (maps.drive_gains.array() * (needs.targets - needs.values).array())
                .min(Scalar(1))
                .max(Scalar(-1))
                .matrix();
  z.valence = (maps.valence_map * z.drive).array().min(Scalar(1)).max(Scalar(-1)).matrix();
  z.magnitude = (maps.magnitude_map * z.drive).array().min(Scalar(1)).max(Scalar(0)).matrix();
  z.arousal = z.drive.size() > 0 ? clamp01(z.drive.template lpNorm<Eigen::Infinity>())
                                 : Scalar(0);
  return z;
}

/// Policy hints from need-based affect: H_n * (gains ⊙ d). With all-ones
/// trait gains this is the plain drive-to-hint map.
template <typename Scalar>
PolicyHintsT<Scalar> need_hints(const AffectStateT<Scalar>& z_need,
                                const TraitParamsT<Scalar>& traits,
                                const HintMapsT<Scalar>& maps) {
  if (traits.gains.size() != z_need.drive.size() ||
      maps.need_map.cols() != z_need.drive.size()) {
    throw std::invalid_argument("need_hints: dimension mismatch");
  }
  return PolicyHintsT<Scalar>{
      maps.need_map * (traits.gains.array() * z_need.drive.array()).matrix()};
}

/// Policy hints from fused affect: H * flatten(z).
template <typename Scalar>
PolicyHintsT<Scalar> affect_hints(const AffectStateT<Scalar>& z,
                                  const HintMapsT<Scalar>& maps) {
  VecX<Scalar> flat = z.flatten();
  if (maps.affect_map.cols() != flat.size()) {
    throw std::invalid_argument("affect_hints: dimension mismatch");
  }
  return PolicyHintsT<Scalar>{maps.affect_map * flat};
}

/// Affective integration: convex reliability-weighted blend of the two
/// sources, then an optional mood blend, re-clipped to field ranges.
/// At reliability 0 the need-based state passes through bit-identically.
template <typename Scalar>
AffectStateT<Scalar> fuse_affect(const AffectStateT<Scalar>& z_need,
                                 const AffectStateT<Scalar>& z_mem, Scalar reliability,
                                 const FusionParamsT<Scalar>& fusion,
                                 const AffectStateT<Scalar>* mood = nullptr) {
  if (z_need.channels() != z_mem.channels() || z_need.drives() != z_mem.drives()) {
    throw std::invalid_argument("fuse_affect: dimension mismatch");
  }
  const Scalar w = fusion.beta * reliability;
  if (w == Scalar(0) && mood == nullptr) return z_need;

  AffectStateT<Scalar> z;
  if (w == Scalar(0)) {
    z = z_need;
  } else {
    z.valence = (Scalar(1) - w) * z_need.valence + w * z_mem.valence;
    z.magnitude = (Scalar(1) - w) * z_need.magnitude + w * z_mem.magnitude;
    z.arousal = (Scalar(1) - w) * z_need.arousal + w * z_mem.arousal;
    z.drive = (Scalar(1) - w) * z_need.drive + w * z_mem.drive;
  }
  if (mood != nullptr) {
    const Scalar mu = fusion.mood_weight;
    z.valence = (Scalar(1) - mu) * z.valence + mu * mood->valence;
    z.magnitude = (Scalar(1) - mu) * z.magnitude + mu * mood->magnitude;
    z.arousal = (Scalar(1) - mu) * z.arousal + mu * mood->arousal;
    z.drive = (Scalar(1) - mu) * z.drive + mu * mood->drive;
  }
  clip_to_ranges(z);
  return z;
}

/// Hint fusion: alpha_n * h_need + alpha_m * h_mem + alpha_a * h_aff.
template <typename Scalar>
PolicyHintsT<Scalar> fuse_hints(const PolicyHintsT<Scalar>& h_need,
                                const PolicyHintsT<Scalar>& h_mem,
                                const PolicyHintsT<Scalar>& h_aff,
                                const HintMapsT<Scalar>& maps) {
  if (h_need.size() != h_mem.size() || h_need.size() != h_aff.size()) {
    throw std::invalid_argument("fuse_hints: dimension mismatch");
  }
  return PolicyHintsT<Scalar>{maps.alpha_need * h_need.scores +
                              maps.alpha_mem * h_mem.scores +
                              maps.alpha_affect * h_aff.scores};
}

/// Numerically stable softmax of x / tau.
template <typename Scalar>
VecX<Scalar> softmax(const VecX<Scalar>& x, Scalar tau) {
  if (!x.allFinite()) throw std::invalid_argument("softmax: non-finite input");
  VecX<Scalar> scaled = x / tau;
  VecX<Scalar> shifted = (scaled.array() - scaled.maxCoeff()).exp().matrix();
  return shifted / shifted.sum();
}

/// Policy probabilities: softmax(h / tau1(a)). High arousal sharpens the
/// vote; entropy is non-increasing in arousal for fixed hints.
template <typename Scalar>
VecX<Scalar> policy_distribution(const PolicyHintsT<Scalar>& hints, Scalar arousal,
                                 const TemperatureScheduleT<Scalar>& schedule) {
  if (arousal < Scalar(0) || arousal > Scalar(1)) {
    throw std::invalid_argument("policy_distribution: arousal out of range");
  }
  return softmax(hints.scores, schedule.at(arousal));
}

/// Shannon entropy in nats; 0 log 0 taken as 0.
template <typename Scalar>
Scalar entropy(const VecX<Scalar>& p) {
  Scalar h = 0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] > Scalar(0)) h -= p[i] * std::log(p[i]);
  }
  return h;
}

// ---------------------------------------------------------------------------
// Default scalar aliases
// ---------------------------------------------------------------------------

using Needs = NeedsT<double>;
using AffectState = AffectStateT<double>;
using PolicyHints = PolicyHintsT<double>;
using AffectMaps = AffectMapsT<double>;
using HintMaps = HintMapsT<double>;
using TraitParams = TraitParamsT<double>;
using TemperatureSchedule = TemperatureScheduleT<double>;
using FusionParams = FusionParamsT<double>;

}  // namespace emoctl

#endif  // EMOCTL_AFFECT_HPP
