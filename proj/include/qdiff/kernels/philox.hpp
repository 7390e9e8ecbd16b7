#pragma once

#include <cstdint>

namespace qdiff::kernels {

/// Philox4x32-10 counter-based generator. A block is a pure function of
/// (block index, stream, seed); every sample in a run is addressed by its
/// global index, so the produced stream is independent of chunking and
/// thread count by construction.
struct PhiloxBlock {
  std::uint32_t x0, x1, x2, x3;
};

namespace detail {

inline constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
inline constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
inline constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline PhiloxBlock philox_round(PhiloxBlock c, std::uint32_t k0, std::uint32_t k1) {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * c.x0;
  const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * c.x2;
  return {static_cast<std::uint32_t>(p1 >> 32) ^ c.x1 ^ k0, static_cast<std::uint32_t>(p1),
          static_cast<std::uint32_t>(p0 >> 32) ^ c.x3 ^ k1, static_cast<std::uint32_t>(p0)};
}

}  // namespace detail

inline PhiloxBlock philox4x32(std::uint64_t block, std::uint64_t stream, std::uint64_t seed) {
  PhiloxBlock c{static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
                static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  std::uint32_t k0 = static_cast<std::uint32_t>(seed);
  std::uint32_t k1 = static_cast<std::uint32_t>(seed >> 32);
  for (int round = 0; round < 10; ++round) {
    c = detail::philox_round(c, k0, k1);
    k0 += detail::kPhiloxW0;
    k1 += detail::kPhiloxW1;
  }
  return c;
}

/// Strictly interior uniform in (0,1) from 52 high bits of a 64-bit word.
inline double uniform_from_bits(std::uint64_t w) {
  return static_cast<double>(w >> 12) * 0x1.0p-52 + 0x1.0p-53;
}

}  // namespace qdiff::kernels
