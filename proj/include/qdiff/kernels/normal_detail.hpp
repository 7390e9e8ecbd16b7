#pragma once

// Scalar reference DAG for the inverse-normal-CDF sampling kernel.
//
// Every operation here has a bit-identical twin in the AVX2 kernel: the same
// multiplies, fused multiply-adds, divisions and square roots in the same
// order, so the two backends produce byte-identical streams. Compile the
// containing translation units with -ffp-contract=off; spontaneous fma
// contraction would break the pairing.

#include <bit>
#include <cmath>
#include <cstdint>

namespace qdiff::kernels::detail {

// natural log for x in (0, 1), normal (not denormal) inputs.
// atanh-series log: x = m 2^e, m in [sqrt(1/2), sqrt(2)),
// ln m = 2 atanh((m-1)/(m+1)), ln x = e ln2_hi + (e ln2_lo + ln m).
inline constexpr double kSqrt2 = 1.4142135623730951;       // 0x3FF6A09E667F3BCD
inline constexpr double kLn2Hi = 6.93147180369123816490e-01;
inline constexpr double kLn2Lo = 1.90821492927058770002e-10;

// 1/3, 1/5, ..., 1/25 (atanh series over t^2; truncation < 1 ulp for
// |t| <= (sqrt2-1)/(sqrt2+1)).
inline constexpr double kAtanhC[12] = {
    1.0 / 3,  1.0 / 5,  1.0 / 7,  1.0 / 9,  1.0 / 11, 1.0 / 13,
    1.0 / 15, 1.0 / 17, 1.0 / 19, 1.0 / 21, 1.0 / 23, 1.0 / 25,
};

inline double kern_log(double x) {
  const std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
  std::int64_t e = static_cast<std::int64_t>(bits >> 52) - 1023;
  double m = std::bit_cast<double>((bits & 0x000FFFFFFFFFFFFFull) | 0x3FF0000000000000ull);
  if (m > kSqrt2) {
    m *= 0.5;
    e += 1;
  }
  const double ed = static_cast<double>(e);
  const double t = (m - 1.0) / (m + 1.0);
  const double t2 = t * t;
  double p = kAtanhC[11];
  for (int i = 10; i >= 0; --i) p = std::fma(p, t2, kAtanhC[i]);
  const double u = t * t2;
  const double w = t + u * p;
  const double lnm = w + w;
  const double hi = ed * kLn2Hi;
  const double lo = std::fma(ed, kLn2Lo, lnm);
  return hi + lo;
}

// AS241 (PPND16) rational approximations for the inverse normal CDF.
inline constexpr double kPpndA[8] = {
    3.3871328727963666080e+0, 1.3314166789178437745e+2, 1.9715909503065514427e+3,
    1.3731693765509461125e+4, 4.5921953931549871457e+4, 6.7265770927008700853e+4,
    3.3430575583588128105e+4, 2.5090809287301226727e+3};
inline constexpr double kPpndB[8] = {
    1.0,                      4.2313330701600911252e+1, 6.8718700749205790830e+2,
    5.3941960214247511077e+3, 2.1213794301586595867e+4, 3.9307895800092710610e+4,
    2.8729085735721942674e+4, 5.2264952788528545610e+3};
inline constexpr double kPpndC[8] = {
    1.42343711074968357734e+0, 4.63033784615654529590e+0, 5.76949722146069140550e+0,
    3.64784832476320460504e+0, 1.27045825245236838258e+0, 2.41780725177450611770e-1,
    2.27238449892691845833e-2, 7.74545014278341407640e-4};
inline constexpr double kPpndD[8] = {
    1.0,                       2.05319162663775882187e+0, 1.67638483018380384940e+0,
    6.89767334985100004550e-1, 1.48103976427480074590e-1, 1.51986665636164571966e-2,
    5.47593808499534494600e-4, 1.05075007164441684324e-9};
inline constexpr double kPpndE[8] = {
    6.65790464350110377720e+0, 5.46378491116411436990e+0, 1.78482653991729133580e+0,
    2.96560571828504891230e-1, 2.65321895265761230930e-2, 1.24266094738807843860e-3,
    2.71155556874348757815e-5, 2.01033439929228813265e-7};
inline constexpr double kPpndF[8] = {
    1.0,                       5.99832206555887937690e-1, 1.36929880922735805310e-1,
    1.48753612908506148525e-2, 7.86869131145613259100e-4, 1.84631831751005468180e-6,
    1.42151175831644588870e-7, 2.04426310338993978564e-15};

inline double horner8(const double (&c)[8], double x) {
  double p = c[7];
  for (int i = 6; i >= 0; --i) p = std::fma(p, x, c[i]);
  return p;
}

/// Inverse standard normal CDF for u strictly inside (0,1).
inline double inverse_normal_cdf(double u) {
  const double q = u - 0.5;
  if (q >= -0.425 && q <= 0.425) {
    const double rc = std::fma(-q, q, 0.180625);
    return q * (horner8(kPpndA, rc) / horner8(kPpndB, rc));
  }
  const double pmin = q < 0.0 ? u : 1.0 - u;
  const double rl = std::sqrt(-kern_log(pmin));
  double v;
  if (rl <= 5.0) {
    const double rm = rl - 1.6;
    v = horner8(kPpndC, rm) / horner8(kPpndD, rm);
  } else {
    const double rf = rl - 5.0;
    v = horner8(kPpndE, rf) / horner8(kPpndF, rf);
  }
  return q < 0.0 ? -v : v;
}

}  // namespace qdiff::kernels::detail
