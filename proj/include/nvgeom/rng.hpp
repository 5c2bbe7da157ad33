// Copyright 2026 The nvgeom Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>

namespace nvgeom {

namespace detail {

// SplitMix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace detail

/// Independent random stream keyed by (seed, stream, substream).
///
/// The key is hashed with SplitMix64 into the 256-bit state of a
/// xoshiro256++ generator, so a stream's output depends only on its key and
/// parallel callers never share state. Outputs are identical on every
/// platform (integer arithmetic only, hand-rolled double conversion).
class RngStream {
 public:
  explicit constexpr RngStream(std::uint64_t seed, std::uint64_t stream = 0,
                               std::uint64_t substream = 0) {
    std::uint64_t h = seed;
    h = detail::splitmix64(h) ^ stream;
    h = detail::splitmix64(h) ^ substream;
    std::uint64_t sm = detail::splitmix64(h);
    for (auto& word : state_) word = detail::splitmix64(sm);
  }

  constexpr std::uint64_t next_u64() {
    const std::uint64_t result = detail::rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = detail::rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  constexpr double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  constexpr double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::array<std::uint64_t, 4> state_{};
};

/// Child seed for grid point `index` of a sweep rooted at `seed`.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t h = seed ^ 0x5eed5eed5eed5eedull;
  h = detail::splitmix64(h) ^ index;
  return detail::splitmix64(h);
}

}  // namespace nvgeom
