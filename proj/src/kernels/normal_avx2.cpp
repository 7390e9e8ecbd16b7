// AVX2 variants of the sampling and moment kernels. Every floating-point
// operation pairs one-to-one with the scalar reference in normal_detail.hpp
// and normal_scalar.cpp, so outputs are byte-identical; the equivalence
// tests assert that. Compiled with -mavx2 -mfma -ffp-contract=off.

#ifdef __x86_64__

#include <immintrin.h>

#include <cstdint>

#include "qdiff/kernels/kernels.hpp"
#include "qdiff/kernels/normal_detail.hpp"
#include "qdiff/kernels/philox.hpp"
#include "qdiff/kernels/reduce_detail.hpp"

namespace qdiff::kernels {

namespace {

using detail::kAtanhC;
using detail::kLn2Hi;
using detail::kLn2Lo;
using detail::kPpndA;
using detail::kPpndB;
using detail::kPpndC;
using detail::kPpndD;
using detail::kPpndE;
using detail::kPpndF;
using detail::kSqrt2;

inline __m256d v_log(__m256d x) {
  const __m256i bits = _mm256_castpd_si256(x);
  __m256i e = _mm256_sub_epi64(_mm256_srli_epi64(bits, 52), _mm256_set1_epi64x(1023));
  __m256d m = _mm256_castsi256_pd(
      _mm256_or_si256(_mm256_and_si256(bits, _mm256_set1_epi64x(0x000FFFFFFFFFFFFFll)),
                      _mm256_set1_epi64x(0x3FF0000000000000ll)));
  const __m256d big = _mm256_cmp_pd(m, _mm256_set1_pd(kSqrt2), _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), big);
  e = _mm256_sub_epi64(e, _mm256_castpd_si256(big));  // mask lanes are -1

  // exact int64 -> double for |e| < 2^51
  const __m256i magic = _mm256_set1_epi64x(0x4338000000000000ll);
  const __m256d ed = _mm256_sub_pd(_mm256_castsi256_pd(_mm256_add_epi64(e, magic)),
                                   _mm256_set1_pd(6755399441055744.0));

  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d t = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
  const __m256d t2 = _mm256_mul_pd(t, t);
  __m256d p = _mm256_set1_pd(kAtanhC[11]);
  for (int i = 10; i >= 0; --i) p = _mm256_fmadd_pd(p, t2, _mm256_set1_pd(kAtanhC[i]));
  const __m256d u = _mm256_mul_pd(t, t2);
  const __m256d w = _mm256_add_pd(t, _mm256_mul_pd(u, p));
  const __m256d lnm = _mm256_add_pd(w, w);
  const __m256d hi = _mm256_mul_pd(ed, _mm256_set1_pd(kLn2Hi));
  const __m256d lo = _mm256_fmadd_pd(ed, _mm256_set1_pd(kLn2Lo), lnm);
  return _mm256_add_pd(hi, lo);
}

inline __m256d v_horner8(const double (&c)[8], __m256d x) {
  __m256d p = _mm256_set1_pd(c[7]);
  for (int i = 6; i >= 0; --i) p = _mm256_fmadd_pd(p, x, _mm256_set1_pd(c[i]));
  return p;
}

inline __m256d v_inverse_normal_cdf(__m256d uu) {
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  const __m256d q = _mm256_sub_pd(uu, _mm256_set1_pd(0.5));
  const __m256d absq = _mm256_andnot_pd(sign_mask, q);
  const __m256d central = _mm256_cmp_pd(absq, _mm256_set1_pd(0.425), _CMP_LE_OQ);

  const __m256d rc = _mm256_fnmadd_pd(q, q, _mm256_set1_pd(0.180625));
  const __m256d vc = _mm256_mul_pd(q, _mm256_div_pd(v_horner8(kPpndA, rc), v_horner8(kPpndB, rc)));

  const __m256d pmin = _mm256_min_pd(uu, _mm256_sub_pd(_mm256_set1_pd(1.0), uu));
  const __m256d rl = _mm256_sqrt_pd(_mm256_xor_pd(v_log(pmin), sign_mask));
  const __m256d mid = _mm256_cmp_pd(rl, _mm256_set1_pd(5.0), _CMP_LE_OQ);
  const __m256d rm = _mm256_sub_pd(rl, _mm256_set1_pd(1.6));
  const __m256d rf = _mm256_sub_pd(rl, _mm256_set1_pd(5.0));
  const __m256d vm = _mm256_div_pd(v_horner8(kPpndC, rm), v_horner8(kPpndD, rm));
  const __m256d vf = _mm256_div_pd(v_horner8(kPpndE, rf), v_horner8(kPpndF, rf));
  __m256d vt = _mm256_blendv_pd(vf, vm, mid);
  const __m256d qneg = _mm256_cmp_pd(q, _mm256_setzero_pd(), _CMP_LT_OQ);
  vt = _mm256_blendv_pd(vt, _mm256_xor_pd(vt, sign_mask), qneg);
  return _mm256_blendv_pd(vt, vc, central);
}

struct VPhiloxOut {
  __m256i w0;  // (x0 << 32) | x1 per block
  __m256i w1;  // (x2 << 32) | x3 per block
};

inline VPhiloxOut v_philox4x32(std::uint64_t block0, std::uint64_t stream, std::uint64_t seed) {
  const __m256i lo32 = _mm256_set1_epi64x(0xFFFFFFFFll);
  const __m256i blocks = _mm256_add_epi64(
      _mm256_set1_epi64x(static_cast<long long>(block0)), _mm256_set_epi64x(3, 2, 1, 0));
  __m256i c0 = _mm256_and_si256(blocks, lo32);
  __m256i c1 = _mm256_srli_epi64(blocks, 32);
  __m256i c2 = _mm256_set1_epi64x(static_cast<long long>(stream & 0xFFFFFFFFull));
  __m256i c3 = _mm256_set1_epi64x(static_cast<long long>(stream >> 32));
  __m256i k0 = _mm256_set1_epi64x(static_cast<long long>(seed & 0xFFFFFFFFull));
  __m256i k1 = _mm256_set1_epi64x(static_cast<long long>(seed >> 32));

  const __m256i m0 = _mm256_set1_epi64x(static_cast<long long>(detail::kPhiloxM0));
  const __m256i m1 = _mm256_set1_epi64x(static_cast<long long>(detail::kPhiloxM1));
  const __m256i w0inc = _mm256_set1_epi64x(static_cast<long long>(detail::kPhiloxW0));
  const __m256i w1inc = _mm256_set1_epi64x(static_cast<long long>(detail::kPhiloxW1));
  for (int round = 0; round < 10; ++round) {
    const __m256i p0 = _mm256_mul_epu32(c0, m0);
    const __m256i p1 = _mm256_mul_epu32(c2, m1);
    const __m256i n0 = _mm256_xor_si256(_mm256_xor_si256(_mm256_srli_epi64(p1, 32), c1), k0);
    const __m256i n1 = _mm256_and_si256(p1, lo32);
    const __m256i n2 = _mm256_xor_si256(_mm256_xor_si256(_mm256_srli_epi64(p0, 32), c3), k1);
    const __m256i n3 = _mm256_and_si256(p0, lo32);
    c0 = n0;
    c1 = n1;
    c2 = n2;
    c3 = n3;
    k0 = _mm256_and_si256(_mm256_add_epi64(k0, w0inc), lo32);
    k1 = _mm256_and_si256(_mm256_add_epi64(k1, w1inc), lo32);
  }
  return {_mm256_or_si256(_mm256_slli_epi64(c0, 32), c1),
          _mm256_or_si256(_mm256_slli_epi64(c2, 32), c3)};
}

// (w >> 12) * 2^-52 + 2^-53, matching uniform_from_bits
inline __m256d v_uniform(__m256i w) {
  const __m256i v = _mm256_srli_epi64(w, 12);
  const __m256d vd = _mm256_sub_pd(
      _mm256_castsi256_pd(_mm256_or_si256(v, _mm256_set1_epi64x(0x4330000000000000ll))),
      _mm256_set1_pd(4503599627370496.0));
  return _mm256_add_pd(_mm256_mul_pd(vd, _mm256_set1_pd(0x1.0p-52)),
                       _mm256_set1_pd(0x1.0p-53));
}

}  // namespace

void normal_fill_avx2(double* out, std::size_t n, std::uint64_t seed, std::uint64_t stream,
                      std::uint64_t index0) {
  std::size_t i = 0;
  // align to an even sample index so vector blocks start clean
  while (i < n && ((index0 + i) & 1) != 0) {
    normal_fill_scalar(out + i, 1, seed, stream, index0 + i);
    ++i;
  }
  for (; i + 8 <= n; i += 8) {
    const std::uint64_t idx = index0 + i;
    const VPhiloxOut po = v_philox4x32(idx >> 1, stream, seed);
    const __m256d z_even = v_inverse_normal_cdf(v_uniform(po.w0));
    const __m256d z_odd = v_inverse_normal_cdf(v_uniform(po.w1));
    const __m256d lo = _mm256_unpacklo_pd(z_even, z_odd);
    const __m256d hi = _mm256_unpackhi_pd(z_even, z_odd);
    _mm256_storeu_pd(out + i, _mm256_permute2f128_pd(lo, hi, 0x20));
    _mm256_storeu_pd(out + i + 4, _mm256_permute2f128_pd(lo, hi, 0x31));
  }
  if (i < n) normal_fill_scalar(out + i, n - i, seed, stream, index0 + i);
}

namespace {

double sum_squares_block_avx2(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x + i);
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
  for (; i < n; ++i) lane[i & 3] = std::fma(x[i], x[i], lane[i & 3]);
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

void pair_moments_block_avx2(const double* xy, std::size_t n_pairs, double acc[3]) {
  __m256d acc_sq = _mm256_setzero_pd();
  __m256d acc_xy = _mm256_setzero_pd();
  std::size_t p = 0;
  for (; p + 2 <= n_pairs; p += 2) {
    const __m256d v = _mm256_loadu_pd(xy + 2 * p);  // [x_e, y_e, x_o, y_o]
    acc_sq = _mm256_fmadd_pd(v, v, acc_sq);
    const __m256d w = _mm256_shuffle_pd(v, v, 0b0101);  // [y_e, x_e, y_o, x_o]
    acc_xy = _mm256_fmadd_pd(v, w, acc_xy);
  }
  alignas(32) double sq[4], xyl4[4];
  _mm256_store_pd(sq, acc_sq);
  _mm256_store_pd(xyl4, acc_xy);
  double xx[2] = {sq[0], sq[2]}, yy[2] = {sq[1], sq[3]}, xyl[2] = {xyl4[0], xyl4[2]};
  for (; p < n_pairs; ++p) {
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

double sum_squares_avx2(const double* x, std::size_t n) {
  return detail::blocked_reduce(n, detail::kBlockDoubles, [x](std::size_t off, std::size_t len) {
    return sum_squares_block_avx2(x + off, len);
  });
}

PairMoments pair_moments_avx2(const double* xy, std::size_t n_pairs) {
  double out[3];
  detail::blocked_reduce3(
      n_pairs, detail::kBlockDoubles / 2,
      [xy](std::size_t off, std::size_t len, double acc[3]) {
        pair_moments_block_avx2(xy + 2 * off, len, acc);
      },
      out);
  return {out[0], out[1], out[2]};
}

}  // namespace qdiff::kernels

#endif  // __x86_64__
