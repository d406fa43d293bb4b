#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdint>

#include "sfcapm/philox.hpp"

using namespace sfcapm;

TEST_CASE("reference vectors") {
  // Known-answer vectors for Philox-4x32-10 from the reference
  // implementation's kat_vectors file.
  const std::array<std::uint32_t, 4> zero =
      philox4x32({0u, 0u, 0u, 0u}, {0u, 0u});
  CHECK(zero[0] == 0x6627e8d5u);
  CHECK(zero[1] == 0xe169c58du);
  CHECK(zero[2] == 0xbc57ac4cu);
  CHECK(zero[3] == 0x9b00dbd8u);

  const std::array<std::uint32_t, 4> ones = philox4x32(
      {0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
      {0xffffffffu, 0xffffffffu});
  CHECK(ones[0] == 0x408f276du);
  CHECK(ones[1] == 0x41c83b0eu);
  CHECK(ones[2] == 0xa20bc7c6u);
  CHECK(ones[3] == 0x6d5451fdu);

  const std::array<std::uint32_t, 4> pi = philox4x32(
      {0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
      {0xa4093822u, 0x299f31d0u});
  CHECK(pi[0] == 0xd16cfe09u);
  CHECK(pi[1] == 0x94fdccebu);
  CHECK(pi[2] == 0x5001e420u);
  CHECK(pi[3] == 0x24126ea1u);
}

TEST_CASE("block addressing packs words little end first") {
  const RandomBits zero = random_bits(0, 0);
  CHECK(zero.lo == 0xe169c58d6627e8d5ull);
  CHECK(zero.hi == 0x9b00dbd8bc57ac4cull);

  const std::uint64_t seed = 0x123456789abcdef0ull;
  const std::uint64_t index = 0xfedcba9876543210ull;
  const std::uint64_t stream = 0x0f0f0f0f0f0f0f0full;
  const std::array<std::uint32_t, 4> words = philox4x32(
      {0x76543210u, 0xfedcba98u, 0x0f0f0f0fu, 0x0f0f0f0fu},
      {0x9abcdef0u, 0x12345678u});
  const RandomBits bits = random_bits(seed, index, stream);
  CHECK(bits.lo == (words[0] | (std::uint64_t{words[1]} << 32)));
  CHECK(bits.hi == (words[2] | (std::uint64_t{words[3]} << 32)));
}

TEST_CASE("draws are deterministic and separated") {
  const RandomBits a = random_bits(7, 42);
  const RandomBits b = random_bits(7, 42);
  CHECK(a.lo == b.lo);
  CHECK(a.hi == b.hi);

  CHECK(random_bits(7, 43).lo != a.lo);
  CHECK(random_bits(8, 42).lo != a.lo);
  CHECK(random_bits(7, 42, 1).lo != a.lo);

  const GaussPair g1 = normal_pair(7, 42);
  const GaussPair g2 = normal_pair(7, 42);
  CHECK(g1.z0 == g2.z0);
  CHECK(g1.z1 == g2.z1);
  CHECK(normal_pair(7, 42, 1).z0 != g1.z0);
}

TEST_CASE("uniform mapping stays inside the open interval") {
  CHECK(uniform01(0) == std::ldexp(1.0, -53));
  CHECK(uniform01(~0ull) == 1.0 - std::ldexp(1.0, -53));
  CHECK(uniform01(0) > 0.0);
  CHECK(uniform01(~0ull) < 1.0);

  // The low twelve bits are discarded; each step of the kept bits moves
  // the value by one part in 2^52.
  CHECK(uniform01((1ull << 12) - 1) == uniform01(0));
  CHECK(uniform01(1ull << 12) == std::ldexp(1.5, -52));
  CHECK(uniform01(1ull << 63) == 0.5 + std::ldexp(1.0, -53));
}

TEST_CASE("uniform sample mean") {
  const std::uint64_t n = 100000;
  double sum = 0.0;
  for (std::uint64_t i = 0; i < n; ++i)
    sum += uniform01(random_bits(11, i).lo);
  const double mean = sum / static_cast<double>(n);
  // Five standard errors of the uniform mean, sigma = 1/sqrt(12 n).
  CHECK(std::abs(mean - 0.5) <= 0.005);
}

TEST_CASE("normal pairs have standard joint moments") {
  const std::uint64_t n = 100000;
  double sum0 = 0.0, sum1 = 0.0, sq0 = 0.0, sq1 = 0.0, cross = 0.0;
  std::uint64_t inside_one = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    const GaussPair g = normal_pair(7, i);
    sum0 += g.z0;
    sum1 += g.z1;
    sq0 += g.z0 * g.z0;
    sq1 += g.z1 * g.z1;
    cross += g.z0 * g.z1;
    if (std::abs(g.z0) <= 1.0) ++inside_one;
  }
  const double nd = static_cast<double>(n);
  const double mean0 = sum0 / nd;
  const double mean1 = sum1 / nd;
  const double var0 = sq0 / nd - mean0 * mean0;
  const double var1 = sq1 / nd - mean1 * mean1;
  const double cov = cross / nd - mean0 * mean1;

  // All bounds sit at five standard errors for this sample size.
  CHECK(std::abs(mean0) <= 0.016);
  CHECK(std::abs(mean1) <= 0.016);
  CHECK(std::abs(var0 - 1.0) <= 0.023);
  CHECK(std::abs(var1 - 1.0) <= 0.023);
  CHECK(std::abs(cov) <= 0.016);
  CHECK(std::abs(static_cast<double>(inside_one) / nd - 0.682689) <= 0.0074);
}
