#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace gmcflow {

// Counter-based randomness: Philox4x32-10. A draw is addressed by
// (seed, stream, realization, element) so parallel sampling is
// order-independent and bit-reproducible.

enum class Stream : std::uint32_t { field = 1, mc = 2, aux = 3 };

namespace detail {

inline void philox_round(std::array<std::uint32_t, 4>& ctr, std::array<std::uint32_t, 2>& key) {
  constexpr std::uint64_t M0 = 0xD2511F53ull, M1 = 0xCD9E8D57ull;
  std::uint64_t p0 = M0 * ctr[0];
  std::uint64_t p1 = M1 * ctr[2];
  std::array<std::uint32_t, 4> next;
  next[0] = static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0];
  next[1] = static_cast<std::uint32_t>(p1);
  next[2] = static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1];
  next[3] = static_cast<std::uint32_t>(p0);
  ctr = next;
  key[0] += 0x9E3779B9u;
  key[1] += 0xBB67AE85u;
}

}  // namespace detail

inline std::array<std::uint32_t, 4> philox_block(std::uint64_t seed, std::uint32_t stream,
                                                 std::uint64_t realization, std::uint64_t element) {
  std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed) ^ stream,
                                      static_cast<std::uint32_t>(seed >> 32) + stream * 0x9E3779B9u};
  std::array<std::uint32_t, 4> ctr = {
      static_cast<std::uint32_t>(element), static_cast<std::uint32_t>(element >> 32),
      static_cast<std::uint32_t>(realization), static_cast<std::uint32_t>(realization >> 32)};
  for (int r = 0; r < 10; ++r) detail::philox_round(ctr, key);
  return ctr;
}

inline double to_unit_open(std::uint64_t x) {
  // (0,1]; never 0 so log() below is safe
  return (static_cast<double>(x >> 11) + 1.0) * 0x1p-53;
}

struct GaussianPair {
  double z0, z1;
};

// Two independent N(0,1) draws at a fixed address (Box-Muller).
inline GaussianPair gaussian_pair(std::uint64_t seed, Stream stream, std::uint64_t realization,
                                  std::uint64_t element) {
  auto b = philox_block(seed, static_cast<std::uint32_t>(stream), realization, element);
  std::uint64_t u = (static_cast<std::uint64_t>(b[0]) << 32) | b[1];
  std::uint64_t v = (static_cast<std::uint64_t>(b[2]) << 32) | b[3];
  double r = std::sqrt(-2.0 * std::log(to_unit_open(u)));
  double theta = 2.0 * std::numbers::pi * to_unit_open(v);
  return {r * std::cos(theta), r * std::sin(theta)};
}

}  // namespace gmcflow
