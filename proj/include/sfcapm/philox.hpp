#pragma once

// Counter-based Philox-4x32-10 generator: a pure function from (key,
// counter) to 128 random bits, verified against the reference known-answer
// vectors. Draws are addressed by (seed, stream, index), so any draw can be
// produced in isolation, in any order, on any thread, with identical output.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace sfcapm {

inline std::array<std::uint32_t, 4> philox4x32(
    std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t mult0 = 0xD2511F53u;
  constexpr std::uint32_t mult1 = 0xCD9E8D57u;
  constexpr std::uint32_t bump0 = 0x9E3779B9u;
  constexpr std::uint32_t bump1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    if (round != 0) {
      key[0] += bump0;
      key[1] += bump1;
    }
    const std::uint64_t product0 = std::uint64_t{mult0} * counter[0];
    const std::uint64_t product1 = std::uint64_t{mult1} * counter[2];
    counter = {static_cast<std::uint32_t>(product1 >> 32) ^ counter[1] ^ key[0],
               static_cast<std::uint32_t>(product1),
               static_cast<std::uint32_t>(product0 >> 32) ^ counter[3] ^ key[1],
               static_cast<std::uint32_t>(product0)};
  }
  return counter;
}

struct RandomBits {
  std::uint64_t lo;
  std::uint64_t hi;
};

// 128 bits for draw `index` of substream `stream` under `seed`.
inline RandomBits random_bits(std::uint64_t seed, std::uint64_t index,
                              std::uint64_t stream = 0) {
  const std::array<std::uint32_t, 4> counter = {
      static_cast<std::uint32_t>(index),
      static_cast<std::uint32_t>(index >> 32),
      static_cast<std::uint32_t>(stream),
      static_cast<std::uint32_t>(stream >> 32)};
  const std::array<std::uint32_t, 2> key = {
      static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  const std::array<std::uint32_t, 4> out = philox4x32(counter, key);
  return {out[0] | (std::uint64_t{out[1]} << 32),
          out[2] | (std::uint64_t{out[3]} << 32)};
}

// Maps 64 random bits into the open interval (0, 1): top 52 bits offset by
// half a step. Every value of the sum is exactly representable, so the
// result lies in [2^-53, 1 - 2^-53] and neither endpoint is reachable.
// (A 53-bit mantissa would round the all-ones pattern up to exactly 1.0.)
inline double uniform01(std::uint64_t bits) {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1p-52;
}

struct GaussPair {
  double z0;
  double z1;
};

// Box-Muller transform of one Philox block: two independent standard
// normals per draw index.
inline GaussPair normal_pair(std::uint64_t seed, std::uint64_t index,
                             std::uint64_t stream = 0) {
  const RandomBits bits = random_bits(seed, index, stream);
  const double u1 = uniform01(bits.lo);
  const double u2 = uniform01(bits.hi);
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

}  // namespace sfcapm
