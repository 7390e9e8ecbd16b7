#pragma once

#include <cmath>
#include <concepts>
#include <limits>
#include <type_traits>

#ifdef __SIZEOF_FLOAT128__
#include <quadmath.h>
#endif

namespace qdiff {

/// Floating-point types the dimensionless core is instantiated with.
/// double is the production default; __float128 is used by verification
/// suites that push the free-evolution shear far beyond what a 53-bit
/// mantissa can represent faithfully.
template <class T>
concept Real = std::is_floating_point_v<T>
#ifdef __SIZEOF_FLOAT128__
               || std::is_same_v<T, __float128>
#endif
    ;

namespace num {

using std::atan;
using std::atan2;
using std::cos;
using std::cosh;
using std::exp;
using std::fabs;
using std::isfinite;
using std::log;
using std::log10;
using std::sin;
using std::sinh;
using std::sqrt;
using std::tan;

#ifdef __SIZEOF_FLOAT128__
inline __float128 atan(__float128 x) { return atanq(x); }
inline __float128 atan2(__float128 y, __float128 x) { return atan2q(y, x); }
inline __float128 cos(__float128 x) { return cosq(x); }
inline __float128 cosh(__float128 x) { return coshq(x); }
inline __float128 exp(__float128 x) { return expq(x); }
inline __float128 fabs(__float128 x) { return fabsq(x); }
inline bool isfinite(__float128 x) { return finiteq(x) != 0; }
inline __float128 log(__float128 x) { return logq(x); }
inline __float128 log10(__float128 x) { return log10q(x); }
inline __float128 sin(__float128 x) { return sinq(x); }
inline __float128 sinh(__float128 x) { return sinhq(x); }
inline __float128 sqrt(__float128 x) { return sqrtq(x); }
inline __float128 tan(__float128 x) { return tanq(x); }
#endif

template <Real R>
constexpr R pi_v() {
#ifdef __SIZEOF_FLOAT128__
  if constexpr (std::is_same_v<R, __float128>) {
    // double-double-double split of pi; accurate to ~1e-49
    return R(3.14159265358979311599796346854418516159057617187500) +
           R(1.2246467991473531772260659322749979970830839403e-16) +
           R(-2.9947698097183396658870093832955111483635226e-33);
  }
#endif
  return R(3.141592653589793238462643383279502884L);
}

template <Real R>
constexpr R eps_v() {
#ifdef __SIZEOF_FLOAT128__
  if constexpr (std::is_same_v<R, __float128>) {
    return R(1) / (R(1ull << 56) * R(1ull << 56));  // 2^-112
  }
#endif
  return std::numeric_limits<R>::epsilon();
}

}  // namespace num

namespace constants {

// CODATA 2018
inline constexpr double hbar = 1.054571817e-34;          // J s
inline constexpr double amu_kg = 1.66053906660e-27;      // kg
inline constexpr double seconds_per_year = 365.25 * 86400.0;

}  // namespace constants

}  // namespace qdiff
