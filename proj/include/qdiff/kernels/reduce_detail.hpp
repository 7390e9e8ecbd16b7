#pragma once

// Shared outer reduction structure for the moment kernels. Backends differ
// only in the in-block accumulation; the block partials they produce are
// bit-identical, and this common combination tree keeps the totals
// bit-identical too.

#include <cstddef>

namespace qdiff::kernels::detail {

inline constexpr std::size_t kBlockDoubles = 4096;
inline constexpr std::size_t kGroup = 512;  // block partials combined per group

inline double pairwise_combine(double* v, std::size_t n) {
  while (n > 1) {
    std::size_t m = 0;
    for (std::size_t i = 0; i + 1 < n; i += 2) v[m++] = v[i] + v[i + 1];
    if (n & 1) v[m++] = v[n - 1];
    n = m;
  }
  return n == 1 ? v[0] : 0.0;
}

/// fn(offset, length) -> block partial sum over [offset, offset+length)
template <class BlockFn>
double blocked_reduce(std::size_t n, std::size_t block, BlockFn&& fn) {
  double partial[kGroup];
  double total = 0.0;
  bool first = true;
  std::size_t nb = 0;
  for (std::size_t off = 0; off < n; off += block) {
    partial[nb++] = fn(off, n - off < block ? n - off : block);
    if (nb == kGroup) {
      const double s = pairwise_combine(partial, nb);
      total = first ? s : total + s;
      first = false;
      nb = 0;
    }
  }
  if (nb > 0) {
    const double s = pairwise_combine(partial, nb);
    total = first ? s : total + s;
  }
  return total;
}

/// 3-channel variant for the pair-moment kernels; fn fills acc[3].
template <class BlockFn>
void blocked_reduce3(std::size_t n, std::size_t block, BlockFn&& fn, double out[3]) {
  double p0[kGroup], p1[kGroup], p2[kGroup];
  double tot[3] = {0, 0, 0};
  bool first = true;
  std::size_t nb = 0;
  for (std::size_t off = 0; off < n; off += block) {
    double acc[3];
    fn(off, n - off < block ? n - off : block, acc);
    p0[nb] = acc[0];
    p1[nb] = acc[1];
    p2[nb] = acc[2];
    if (++nb == kGroup) {
      const double a = pairwise_combine(p0, nb);
      const double b = pairwise_combine(p1, nb);
      const double c = pairwise_combine(p2, nb);
      if (first) {
        tot[0] = a; tot[1] = b; tot[2] = c;
        first = false;
      } else {
        tot[0] += a; tot[1] += b; tot[2] += c;
      }
      nb = 0;
    }
  }
  if (nb > 0) {
    const double a = pairwise_combine(p0, nb);
    const double b = pairwise_combine(p1, nb);
    const double c = pairwise_combine(p2, nb);
    if (first) {
      tot[0] = a; tot[1] = b; tot[2] = c;
    } else {
      tot[0] += a; tot[1] += b; tot[2] += c;
    }
  }
  out[0] = tot[0];
  out[1] = tot[1];
  out[2] = tot[2];
}

}  // namespace qdiff::kernels::detail
