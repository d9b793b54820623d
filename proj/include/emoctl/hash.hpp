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

#ifndef EMOCTL_HASH_HPP
#define EMOCTL_HASH_HPP

#include <bit>
#include <cstdint>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace emoctl {

/// FNV-1a accumulator over raw parameter bytes. Used to witness that frozen
/// parameter groups are bit-identical before and after a run; not a
/// cryptographic hash.
class ParamHasher {
 public:
  void update(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      step(static_cast<unsigned char>(v >> (8 * i)));
    }
  }

  void update(double v) { update(std::bit_cast<std::uint64_t>(v)); }

  void update(int v) { update(static_cast<std::uint64_t>(static_cast<std::int64_t>(v))); }

  void update(bool v) { step(v ? 1 : 0); }

  void update(std::string_view s) {
    update(static_cast<std::uint64_t>(s.size()));
    for (char ch : s) step(static_cast<unsigned char>(ch));
  }

  template <typename Derived>
  void update(const Eigen::MatrixBase<Derived>& m) {
    update(static_cast<std::uint64_t>(m.rows()));
    update(static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        update(static_cast<double>(m(r, c)));
      }
    }
  }

  std::uint64_t digest() const { return hash_; }

  std::string hex() const {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    std::uint64_t h = hash_;
    for (int i = 15; i >= 0; --i) {
      out[static_cast<std::size_t>(i)] = digits[h & 0xf];
      h >>= 4;
    }
    return out;
  }

 private:
  void step(unsigned char byte) {
    hash_ ^= byte;
    hash_ *= 0x100000001b3ULL;
  }

  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

}  // namespace emoctl

#endif  // EMOCTL_HASH_HPP
