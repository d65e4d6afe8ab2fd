// Copyright 2026 The dpsynth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Seeded, splittable random streams.
//
// Every randomized operation in the library draws from an RngStream
// identified by a (seed, stream_id) pair: the same pair always yields the
// same draw sequence, on every platform. Sub-streams derived with
// substream() are statistically independent of their parent and of each
// other, which is what lets replications, strata, and per-margin noise run
// in any order (or in parallel) without changing results.
//
// The generator is xoshiro256++ seeded through SplitMix64. The standard
// <random> distributions are deliberately not used: their algorithms are
// implementation-defined, so results would not reproduce across standard
// libraries. All samplers here are exact inverse-CDF or waiting-time
// constructions over raw 64-bit engine output.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "dpsynth/errors.hpp"

namespace dpsynth {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t x) { return splitmix64(x); }

inline std::uint64_t rotl64(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace detail

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0)
      : seed_(seed), stream_id_(stream_id) {
    std::uint64_t s = seed ^ detail::mix64(stream_id + 0x9E3779B97F4A7C15ULL);
    for (auto& word : state_) word = detail::splitmix64(s);
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  // Derives an independent child stream. Deterministic: the child depends
  // only on (seed, stream_id, index), never on how much the parent has
  // already been consumed.
  RngStream substream(std::uint64_t index) const {
    std::uint64_t folded =
        detail::mix64(seed_ ^ detail::rotl64(stream_id_, 31) ^
                      0xA5A5A5A55A5A5A5AULL);
    return RngStream(folded, index);
  }

  std::uint64_t next_u64() {
    std::uint64_t result =
        detail::rotl64(state_[0] + state_[3], 23) + state_[0];
    std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = detail::rotl64(state_[3], 45);
    return result;
  }

  // Uniform on the open interval (0, 1); never returns 0 or 1, so logs of
  // the result are always finite.
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound). Lemire multiply-shift with rejection.
  std::uint64_t below(std::uint64_t bound) {
    if (bound == 0) throw DataError("RngStream::below: bound must be > 0");
    unsigned __int128 m =
        static_cast<unsigned __int128>(next_u64()) * bound;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < bound) {
      std::uint64_t threshold = (0 - bound) % bound;
      while (lo < threshold) {
        m = static_cast<unsigned __int128>(next_u64()) * bound;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  // Laplace(0, scale) by inverse-CDF transform of a single uniform.
  double laplace(double scale) {
    double u = uniform01() - 0.5;
    return u < 0 ? scale * std::log1p(2.0 * u)
                 : -scale * std::log1p(-2.0 * u);
  }

  // Standard normal via Box-Muller (one value per pair of uniforms).
  double normal01() {
    double u1 = uniform01();
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  // Binomial(n, p), exact. Waiting-time method: geometric gaps between
  // successes, so expected cost is O(n*p + 1) rather than O(n).
  std::uint64_t binomial(std::uint64_t n, double p) {
    if (n == 0 || p <= 0.0) return 0;
    if (p >= 1.0) return n;
    if (p > 0.5) return n - binomial(n, 1.0 - p);
    double log_q = std::log1p(-p);
    std::uint64_t successes = 0;
    double position = 0.0;
    while (true) {
      position += std::floor(std::log(uniform01()) / log_q) + 1.0;
      if (position > static_cast<double>(n)) break;
      ++successes;
    }
    return successes;
  }

  // Poisson(mean), exact, by counting exponential arrivals. O(mean) time;
  // used once per synthesis for the optional Poisson sample size.
  std::uint64_t poisson(double mean) {
    if (!(mean > 0.0)) return 0;
    std::uint64_t count = 0;
    double sum = 0.0;
    while (true) {
      sum += -std::log(uniform01());
      if (sum >= mean) break;
      ++count;
    }
    return count;
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::array<std::uint64_t, 4> state_{};
};

// Fisher-Yates shuffle of fixed-width rows stored in one flat vector.
template <typename T>
void shuffle_rows(std::vector<T>& flat, std::size_t width, RngStream& rng) {
  if (width == 0 || flat.empty()) return;
  std::size_t n = flat.size() / width;
  for (std::size_t i = n; i > 1; --i) {
    std::size_t j = rng.below(i);
    if (j != i - 1) {
      auto a = flat.begin() + static_cast<std::ptrdiff_t>((i - 1) * width);
      auto b = flat.begin() + static_cast<std::ptrdiff_t>(j * width);
      std::swap_ranges(a, a + static_cast<std::ptrdiff_t>(width), b);
    }
  }
}

}  // namespace dpsynth
