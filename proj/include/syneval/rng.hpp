/* Copyright 2026 The Syneval Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Portable, seedable pseudo-random generation.
//
// All randomness in the toolkit flows through the two generators below so
// that a port in another language reproduces every subsample and pair list
// bit for bit:
//
//   * SplitMix64 (Steele, Lea, Flood 2014) expands a 64-bit seed into the
//     256-bit xoshiro state and serves as the seed-mixing hash.
//   * xoshiro256** 1.0 (Blackman, Vigna 2018) produces the actual stream.
//
// Bounded integers use Lemire's multiply-shift method with rejection, which
// is exact (unbiased) and defined purely in terms of 64-bit outputs.
// std::uniform_int_distribution is deliberately not used: its algorithm is
// implementation-defined.

#ifndef SYNEVAL_RNG_HPP_
#define SYNEVAL_RNG_HPP_

#include <array>
#include <cstdint>

namespace syneval {

// SplitMix64 finalizer applied to x + golden gamma; one step of the
// SplitMix64 sequence seeded with x.
constexpr std::uint64_t Mix64(std::uint64_t x) noexcept {
  std::uint64_t z = x + 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t Next() noexcept {
    const std::uint64_t out = Mix64(state_);
    state_ += 0x9E3779B97F4A7C15ULL;
    return out;
  }

 private:
  std::uint64_t state_;
};

class Xoshiro256StarStar {
 public:
  using result_type = std::uint64_t;

  // State is filled with four consecutive SplitMix64 outputs, as recommended
  // by the xoshiro authors.
  explicit Xoshiro256StarStar(std::uint64_t seed) noexcept;

  // Raw state constructor; used to check against the reference vectors.
  explicit Xoshiro256StarStar(const std::array<std::uint64_t, 4>& state) noexcept
      : s_(state) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  result_type operator()() noexcept { return Next(); }
  std::uint64_t Next() noexcept;

  // Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t UniformBelow(std::uint64_t bound) noexcept;

  // Uniform double in [0, 1) with 53 random bits.
  double Uniform01() noexcept;

  // Standard normal via Box-Muller. Depends on libm log/cos/sin, so it is
  // only bit-portable across platforms with identical libm; used for
  // fixtures, never for subsampling.
  double Normal() noexcept;

 private:
  std::array<std::uint64_t, 4> s_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

// Seed for trial `trial` at sample fraction `fraction`:
//   key  = round(fraction * 1e9)
//   seed = Mix64(Mix64(Mix64(base) ^ key) ^ trial)
std::uint64_t DeriveTrialSeed(std::uint64_t base_seed, double fraction,
                              std::uint64_t trial) noexcept;

// Independent sub-stream of a seed: Mix64(seed ^ stream_tag).
constexpr std::uint64_t SubStream(std::uint64_t seed,
                                  std::uint64_t stream_tag) noexcept {
  return Mix64(seed ^ stream_tag);
}

}  // namespace syneval

#endif  // SYNEVAL_RNG_HPP_
