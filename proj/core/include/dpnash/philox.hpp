#pragma once

#include <array>
#include <cstdint>

namespace dpnash {

// Philox 4x32-10 counter-based generator (Salmon et al., SC'11).  A block is a
// pure function of (counter, key), so draws are addressable by coordinates:
// streams keyed by (seed, replica, player, iteration) give identical values on
// any thread in any execution order.
struct PhiloxCounter {
  std::uint32_t v0 = 0, v1 = 0, v2 = 0, v3 = 0;
};

struct PhiloxKey {
  std::uint32_t k0 = 0, k1 = 0;
};

namespace detail {

inline std::uint32_t mulhi32(std::uint32_t a, std::uint32_t b, std::uint32_t& lo) {
  const std::uint64_t prod = static_cast<std::uint64_t>(a) * b;
  lo = static_cast<std::uint32_t>(prod);
  return static_cast<std::uint32_t>(prod >> 32);
}

}  // namespace detail

inline std::array<std::uint32_t, 4> philox4x32_10(PhiloxCounter ctr, PhiloxKey key) {
  constexpr std::uint32_t kMul0 = 0xD2511F53u;
  constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  std::uint32_t x0 = ctr.v0, x1 = ctr.v1, x2 = ctr.v2, x3 = ctr.v3;
  std::uint32_t k0 = key.k0, k1 = key.k1;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k0 += kWeyl0;
      k1 += kWeyl1;
    }
    std::uint32_t lo0, lo1;
    const std::uint32_t hi0 = detail::mulhi32(kMul0, x0, lo0);
    const std::uint32_t hi1 = detail::mulhi32(kMul1, x2, lo1);
    const std::uint32_t n0 = hi1 ^ x1 ^ k0;
    const std::uint32_t n2 = hi0 ^ x3 ^ k1;
    x0 = n0;
    x1 = lo1;
    x2 = n2;
    x3 = lo0;
  }
  return {x0, x1, x2, x3};
}

// Two 32-bit words to a double in the open interval (0, 1).  The +0.5 offset
// centers each of the 2^52 cells, so 0, 1, and exactly 1/2 never occur and
// inverse-CDF transforms stay finite.  52 cells, not 53: every (k + 0.5) with
// k < 2^52 is exactly representable, whereas (2^53 - 1) + 0.5 would round up
// and map the all-ones input to 1.0.
inline double uniform_open01(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

}  // namespace dpnash
