#include <cstdint>

#include "qdiff/kernels/kernels.hpp"
#include "qdiff/kernels/normal_detail.hpp"
#include "qdiff/kernels/philox.hpp"
#include "qdiff/kernels/reduce_detail.hpp"

namespace qdiff::kernels {

namespace {

inline double value_at(std::uint64_t idx, std::uint64_t seed, std::uint64_t stream) {
  const PhiloxBlock b = philox4x32(idx >> 1, stream, seed);
  const std::uint64_t w = (idx & 1) == 0
                              ? (static_cast<std::uint64_t>(b.x0) << 32) | b.x1
                              : (static_cast<std::uint64_t>(b.x2) << 32) | b.x3;
  return detail::inverse_normal_cdf(uniform_from_bits(w));
}

}  // namespace

void normal_fill_scalar(double* out, std::size_t n, std::uint64_t seed, std::uint64_t stream,
                        std::uint64_t index0) {
  std::size_t i = 0;
  if (n > 0 && (index0 & 1) != 0) {
    out[0] = value_at(index0, seed, stream);
    i = 1;
  }
  for (; i + 1 < n; i += 2) {
    const std::uint64_t idx = index0 + i;
    const PhiloxBlock b = philox4x32(idx >> 1, stream, seed);
    const std::uint64_t w0 = (static_cast<std::uint64_t>(b.x0) << 32) | b.x1;
    const std::uint64_t w1 = (static_cast<std::uint64_t>(b.x2) << 32) | b.x3;
    out[i] = detail::inverse_normal_cdf(uniform_from_bits(w0));
    out[i + 1] = detail::inverse_normal_cdf(uniform_from_bits(w1));
  }
  if (i < n) out[i] = value_at(index0 + i, seed, stream);
}

namespace {

// 4 stride lanes, combined ((l0+l1)+(l2+l3)); mirrors the AVX2 register
// layout exactly.
double sum_squares_block(const double* x, std::size_t n) {
  double lane[4] = {0, 0, 0, 0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    lane[0] = std::fma(x[i], x[i], lane[0]);
    lane[1] = std::fma(x[i + 1], x[i + 1], lane[1]);
    lane[2] = std::fma(x[i + 2], x[i + 2], lane[2]);
    lane[3] = std::fma(x[i + 3], x[i + 3], lane[3]);
  }
  for (; i < n; ++i) lane[i & 3] = std::fma(x[i], x[i], lane[i & 3]);
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

// lanes split by pair-index parity (even, odd), as the AVX2 kernel sees
// them in one 4-lane register holding two interleaved pairs.
void pair_moments_block(const double* xy, std::size_t n_pairs, double acc[3]) {
  double xx[2] = {0, 0}, yy[2] = {0, 0}, xyl[2] = {0, 0};
  for (std::size_t p = 0; p < n_pairs; ++p) {
    const std::size_t par = p & 1;
    const double x = xy[2 * p], y = xy[2 * p + 1];
    xx[par] = std::fma(x, x, xx[par]);
    yy[par] = std::fma(y, y, yy[par]);
    xyl[par] = std::fma(x, y, xyl[par]);
  }
  acc[0] = xx[0] + xx[1];
  acc[1] = xyl[0] + xyl[1];
  acc[2] = yy[0] + yy[1];
}

}  // namespace

double sum_squares_scalar(const double* x, std::size_t n) {
  return detail::blocked_reduce(n, detail::kBlockDoubles, [x](std::size_t off, std::size_t len) {
    return sum_squares_block(x + off, len);
  });
}

PairMoments pair_moments_scalar(const double* xy, std::size_t n_pairs) {
  double out[3];
  detail::blocked_reduce3(
      n_pairs, detail::kBlockDoubles / 2,
      [xy](std::size_t off, std::size_t len, double acc[3]) {
        pair_moments_block(xy + 2 * off, len, acc);
      },
      out);
  return {out[0], out[1], out[2]};
}

}  // namespace qdiff::kernels
