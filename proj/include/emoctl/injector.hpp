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

#ifndef EMOCTL_INJECTOR_HPP
#define EMOCTL_INJECTOR_HPP

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace emoctl {

/// Negative-control perturbations for the audit suite. Each injector taints
/// exactly one declared pathway and must flip exactly its designated check.
enum class InjectorId : int {
  kIdentityKey = 0,        // agent identity mixed into retrieval keys
  kTimestampKey,           // tick index mixed into retrieval keys
  kSecondReader,           // second memory-external reader attached
  kCrossEpisodeSummary,    // retrieval blends in a cross-episode aggregate
  kTelemetryFeedback,      // previous trace output piped into the observation
  kUnfrozenParam           // one hint-map entry mutated mid-run
};

inline constexpr int kNumInjectors = 6;

inline constexpr std::array<std::string_view, kNumInjectors> kInjectorNames = {
    "IDENTITY_KEY",     "TIMESTAMP_KEY",      "SECOND_READER",
    "CROSS_EPISODE_SUMMARY", "TELEMETRY_FEEDBACK", "UNFROZEN_PARAM"};

inline std::string_view to_string(InjectorId id) {
  return kInjectorNames[static_cast<std::size_t>(static_cast<int>(id))];
}

inline std::optional<InjectorId> parse_injector(std::string_view name) {
  if (name.empty()) return std::nullopt;
  for (int i = 0; i < kNumInjectors; ++i) {
    if (kInjectorNames[static_cast<std::size_t>(i)] == name) {
      return static_cast<InjectorId>(i);
    }
  }
  throw std::invalid_argument("unknown injector: " + std::string(name));
}

}  // namespace emoctl

#endif  // EMOCTL_INJECTOR_HPP
