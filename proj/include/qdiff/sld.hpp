#pragma once

#include <cmath>

#include "qdiff/errors.hpp"
#include "qdiff/gaussian.hpp"
#include "qdiff/real.hpp"

namespace qdiff::sld {

/// Quadratic form of the symmetric logarithmic derivative, in the
/// dimensionless diffusion-rate parameterization:
///   sigma L2 sigma + Omega L2 Omega = d sigma / d lambda_tilde.
/// (Differentiating with respect to Lambda itself divides L2 by Lambda_SQL.)
template <Real R>
struct SldQuadraticForm {
  gauss::CovMatrix2<R> l2{};
  R constant_offset{};  // -1/2 Tr(L2 sigma)
};

template <Real R>
struct SldDecomposition {
  R d1{};                    // eigenvalues of L2, d1 >= d2
  R d2{};
  R rotation_angle{};        // psi diagonalizing L2
  R required_squeezing{};    // z, e-folds; e^{2z} = sqrt(d1/d2) >= 1
  R symplectic_eigenvalue{}; // sqrt(d1 d2)
};

/// Closed-form L2 for the evolved covariance, prefactor 1/(det^2 - 1):
///   l_xx = tau + tau sxp^2 - tau^2 sxp spp + tau^3/3 spp^2
///   l_xp = -tau sxx sxp + tau^2/2 (sxx spp + sxp^2 - 1) - tau^3/3 sxp spp
///   l_pp = tau sxx^2 - tau^2 sxx sxp + tau^3/3 (1 + sxp^2)
template <Real R>
SldQuadraticForm<R> l2_matrix(const gauss::CovMatrix2<R>& st, R tau) {
  const R d = st.det();
  const R scale = st.xx * st.pp + st.xp * st.xp + R(1);
  if (d - R(1) <= R(1024) * num::eps_v<R>() * scale)
    throw degenerate_error(degeneracy::pure_state_singular,
                           "l2_matrix: pure state, defining equation singular");
  const R pref = R(1) / ((d - R(1)) * (d + R(1)));
  const R t2 = tau * tau, t3 = t2 * tau;
  gauss::CovMatrix2<R> l;
  l.xx = (tau + tau * st.xp * st.xp - t2 * st.xp * st.pp + t3 / R(3) * st.pp * st.pp) * pref;
  l.xp = (-tau * st.xx * st.xp + t2 / R(2) * (st.xx * st.pp + st.xp * st.xp - R(1)) -
          t3 / R(3) * st.xp * st.pp) *
         pref;
  l.pp = (tau * st.xx * st.xx - t2 * st.xx * st.xp + t3 / R(3) * (R(1) + st.xp * st.xp)) * pref;

  SldQuadraticForm<R> form;
  form.l2 = l;
  form.constant_offset =
      -(l.xx * st.xx + R(2) * l.xp * st.xp + l.pp * st.pp) / R(2);
  return form;
}

/// Spectral/Williamson data of L2. Eigenvalues come from the stable
/// quadratic (d2 via det/d1); det L2 uses the sum-of-squares identity
///   det = [tau^2 (sxx - tau sxp + tau^2/3 spp)^2 + tau^4/12 (det sigma - 1)^2] pref^2,
/// which cannot go negative by rounding.
template <Real R>
SldDecomposition<R> sld_spectrum(const SldQuadraticForm<R>& form,
                                 const gauss::CovMatrix2<R>& st, R tau) {
  const auto& l = form.l2;
  const R d = st.det();
  const R pref = R(1) / ((d - R(1)) * (d + R(1)));
  const R u = tau * (st.xx - tau * st.xp + tau * tau / R(3) * st.pp);
  const R v = tau * tau / R(2) * (d - R(1)) / num::sqrt(R(3));
  const R detl = (u * u + v * v) * pref * pref;

  const R mean = (l.xx + l.pp) / R(2);
  const R half_diff = (l.xx - l.pp) / R(2);
  const R root = num::sqrt(half_diff * half_diff + l.xp * l.xp);

  SldDecomposition<R> out;
  out.d1 = mean + root;
  out.d2 = detl / out.d1;
  if (!(out.d1 > R(0)) || !(out.d2 > R(0)))
    throw degenerate_error(degeneracy::pure_state_singular,
                           "sld_spectrum: indefinite quadratic form");
  out.symplectic_eigenvalue = num::sqrt(detl);
  if (root <= num::eps_v<R>() * mean) {
    // degenerate pair: any rotation works, pick the identity
    out.rotation_angle = R(0);
    out.required_squeezing = R(0);
  } else {
    out.rotation_angle = num::atan2(R(2) * l.xp, l.xx - l.pp) / R(2);
    out.required_squeezing = num::log(out.d1 / out.d2) / R(4);
  }
  return out;
}

/// e^{2z} expressed in dB, 10 log10(e^{2z}).
template <Real R>
double required_squeezing_db(const SldDecomposition<R>& decomp) {
  return static_cast<double>(R(10) * (R(2) * decomp.required_squeezing) /
                             num::log(R(10)));
}

}  // namespace qdiff::sld
