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

#ifndef EMOCTL_POLICY_HPP
#define EMOCTL_POLICY_HPP

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>

namespace emoctl {

/// Abstract behavioral modes. The set is fixed per configuration; row order
/// of the hint maps follows this enumeration.
enum class PolicyId : int { kSeek = 0, kAvoid, kExplore, kFlee, kRest };

inline constexpr int kNumPolicies = 5;

inline constexpr std::array<const char*, kNumPolicies> kPolicyNames = {
    "SEEK", "AVOID", "EXPLORE", "FLEE", "REST"};

inline const char* to_string(PolicyId p) {
  return kPolicyNames[static_cast<std::size_t>(static_cast<int>(p))];
}

inline PolicyId policy_from_index(int i) {
  if (i < 0 || i >= kNumPolicies) throw std::invalid_argument("policy index out of range");
  return static_cast<PolicyId>(i);
}

/// Concrete actions: 8 compass headings at k*pi/4 (k = 0..7, 0 = +x,
/// counterclockwise) plus PAUSE.
enum class ActionId : int {
  kHeading0 = 0,
  kHeading1,
  kHeading2,
  kHeading3,
  kHeading4,
  kHeading5,
  kHeading6,
  kHeading7,
  kPause
};

inline constexpr int kNumActions = 9;
inline constexpr int kNumHeadings = 8;

inline int action_index(ActionId a) { return static_cast<int>(a); }

inline ActionId action_from_index(int i) {
  if (i < 0 || i >= kNumActions) throw std::invalid_argument("action index out of range");
  return static_cast<ActionId>(i);
}

inline bool is_move(ActionId a) { return action_index(a) < kNumHeadings; }

/// World-frame heading of a move action, in radians.
inline double action_heading(ActionId a) {
  constexpr double kPi = 3.14159265358979323846;
  return static_cast<double>(action_index(a)) * (kPi / 4.0);
}

inline std::string action_name(ActionId a) {
  if (a == ActionId::kPause) return "PAUSE";
  return "H" + std::to_string(action_index(a));
}

}  // namespace emoctl

#endif  // EMOCTL_POLICY_HPP
