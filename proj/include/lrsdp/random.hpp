// Copyright 2026 The lrsdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>

namespace lrsdp {

namespace detail {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

__extension__ using uint128 = unsigned __int128;

}  // namespace detail

/// Counter-based random stream.
///
/// The n-th output is a pure function of (key, n), so a stream can be split
/// into independent children keyed by an integer without sharing state.
/// Every sampling routine takes a caller-owned stream; parallel code derives
/// one child per work item (e.g. per batch) so results do not depend on the
/// thread count.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t seed = 0)
      : key_(detail::mix64(seed + detail::kGolden)) {}

  /// Child stream keyed by `id`; independent of this stream's position.
  [[nodiscard]] RandomStream split(std::uint64_t id) const {
    RandomStream child;
    child.key_ = detail::mix64(key_ ^ detail::mix64(id * detail::kGolden + 0x632be59bd9b4e019ULL));
    return child;
  }

  result_type operator()() { return next(); }

  result_type next() {
    ++counter_;
    return detail::mix64(key_ + counter_ * detail::kGolden);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound).
  std::size_t uniform_index(std::size_t bound) {
    // Lemire's multiply-shift; the bias is below 2^-64 * bound.
    const auto wide = static_cast<detail::uint128>(next()) * bound;
    return static_cast<std::size_t>(wide >> 64);
  }

  /// Standard normal via Box-Muller (one value per call).
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  [[nodiscard]] std::uint64_t key() const { return key_; }
  [[nodiscard]] std::uint64_t position() const { return counter_; }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace lrsdp
