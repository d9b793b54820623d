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

#ifndef EMOCTL_RNG_HPP
#define EMOCTL_RNG_HPP

#include <cstdint>
#include <stdexcept>
#include <string_view>

#include <Eigen/Dense>

namespace emoctl {

/// Splitmix64 generator. Chosen over std engines so that draw sequences are
/// identical across platforms and standard libraries; replay and golden-trace
/// checks depend on that.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). Multiply-shift mapping; deterministic.
  int uniform_int(int n) {
    return static_cast<int>((static_cast<unsigned __int128>(next()) *
                             static_cast<unsigned __int128>(n)) >>
                            64);
  }

 private:
  std::uint64_t state_;
};

/// Derives an independent stream seed from a run seed and a role tag
/// (e.g. "world", "action"). FNV-1a over the tag, mixed with the seed.
inline std::uint64_t derive_stream(std::uint64_t seed, std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char ch : tag) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001b3ULL;
  }
  return h ^ (seed * 0x9e3779b97f4a7c15ULL);
}

/// Per-tick substream: the nth element of a tagged stream. Stateless across
/// ticks so a replay can re-derive any tick's draws without running the
/// preceding ones.
inline std::uint64_t derive_stream(std::uint64_t seed, std::string_view tag,
                                   std::uint64_t index) {
  std::uint64_t h = derive_stream(seed, tag);
  h ^= index + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

/// Inverse-CDF draw from a normalized probability vector.
inline int sample_discrete(const Eigen::VectorXd& probabilities, double u01) {
  double cumulative = 0.0;
  for (int i = 0; i < probabilities.size(); ++i) {
    cumulative += probabilities[i];
    if (u01 < cumulative) return i;
  }
  return static_cast<int>(probabilities.size()) - 1;  // guard against rounding
}

}  // namespace emoctl

#endif  // EMOCTL_RNG_HPP
