#pragma once

#include <sstream>
#include <stdexcept>

#include "qdiff/errors.hpp"
#include "qdiff/real.hpp"

namespace qdiff::gauss {

/// Symmetric 2x2 covariance matrix of the dimensionless (x, p) quadratures.
/// Only the three independent entries are stored, so symmetry cannot drift.
/// Convention: the ground state is the identity, so det >= 1 for any
/// physical state.
template <Real R>
struct CovMatrix2 {
  R xx{};
  R xp{};
  R pp{};

  R det() const { return xx * pp - xp * xp; }
  R trace() const { return xx + pp; }
};

template <Real R>
struct Displacement2 {
  R x{};
  R p{};
};

template <Real R>
struct GaussianState {
  Displacement2<R> d{};
  CovMatrix2<R> sigma{};
};

/// The fixed commutator matrix Omega = [[0,1],[-1,0]]; Omega^2 = -1.
inline constexpr double symplectic_form[2][2] = {{0.0, 1.0}, {-1.0, 0.0}};

/// Initial squeezed thermal state: thermal variance T >= 1, squeezing
/// magnitude r (e-folds, either sign; negative r anti-squeezes), squeezing
/// angle phi reduced to [0, pi).
template <Real R = double>
struct SqueezedThermalSpec {
  R thermal_variance{1};
  R r{0};
  R phi{0};

  SqueezedThermalSpec() = default;
  SqueezedThermalSpec(R T, R r_, R phi_) : thermal_variance(T), r(r_), phi(canonical_phi(phi_)) {
    if (!(T >= R(1)))
      throw std::invalid_argument("SqueezedThermalSpec: thermal variance must be >= 1");
  }

  static R canonical_phi(R phi) {
    const R pi = num::pi_v<R>();
    R m = phi;
    while (m < R(0)) m += pi;
    while (m >= pi) m -= pi;
    return m;
  }
};

using SqueezedThermalSpecd = SqueezedThermalSpec<double>;

/// Covariance of the squeezed thermal state:
///   T * [[cosh2r + sinh2r cos2phi, sinh2r sin2phi],
///        [sinh2r sin2phi,          cosh2r - sinh2r cos2phi]]
/// det = T^2 for every (r, phi): squeezing is symplectic.
template <Real R>
CovMatrix2<R> initial_covariance(const SqueezedThermalSpec<R>& spec) {
  if (!(spec.thermal_variance >= R(1)))
    throw std::invalid_argument("initial_covariance: thermal variance must be >= 1");
  const R T = spec.thermal_variance;
  const R ch = num::cosh(R(2) * spec.r);
  const R sh = num::sinh(R(2) * spec.r);
  const R c2 = num::cos(R(2) * spec.phi);
  const R s2 = num::sin(R(2) * spec.phi);
  return {T * (ch + sh * c2), T * sh * s2, T * (ch - sh * c2)};
}

/// Diffusion contribution per unit dimensionless diffusion rate:
/// d sigma(tau) / d lambda_tilde = [[tau^3/3, tau^2/2],[tau^2/2, tau]].
/// Independent of the initial state.
template <Real R>
CovMatrix2<R> dcov_dlambda(R tau) {
  if (!(tau >= R(0))) throw std::invalid_argument("dcov_dlambda: tau must be >= 0");
  return {tau * tau * tau / R(3), tau * tau / R(2), tau};
}

/// Free evolution plus momentum diffusion of the covariance matrix:
///   sigma(tau) = S sigma S^T + lambda_tilde * D(tau),  S = [[1,tau],[0,1]].
template <Real R>
CovMatrix2<R> evolve_covariance(const CovMatrix2<R>& s0, R tau, R lambda_tilde) {
  if (!(tau >= R(0))) throw std::invalid_argument("evolve_covariance: tau must be >= 0");
  if (!(lambda_tilde >= R(0)))
    throw std::invalid_argument("evolve_covariance: lambda_tilde must be >= 0");
  const CovMatrix2<R> D = dcov_dlambda(tau);
  CovMatrix2<R> s;
  s.xx = s0.xx + tau * (R(2) * s0.xp + tau * s0.pp) + lambda_tilde * D.xx;
  s.xp = s0.xp + tau * s0.pp + lambda_tilde * D.xp;
  s.pp = s0.pp + lambda_tilde * D.pp;
  return s;
}

/// det sigma(tau) without forming the (cancellation-prone) product of the
/// evolved entries:
///   det = det sigma0 + lambda_tilde*(xx*tau + xp*tau^2 + pp*tau^3/3)
///         + lambda_tilde^2 tau^4/12.
/// The shear leaves the determinant invariant, so all three terms are O(1)
/// in the shear scale; the direct product loses ~tau^2 ulps instead.
template <Real R>
R evolved_det(const CovMatrix2<R>& s0, R tau, R lambda_tilde) {
  const R q = tau * (s0.xx + tau * s0.xp + tau * tau / R(3) * s0.pp);
  const R t4 = tau * tau * tau * tau;
  return s0.det() + lambda_tilde * q + lambda_tilde * lambda_tilde * t4 / R(12);
}

/// Displacements shear with the free evolution and never acquire any
/// diffusion-rate dependence.
template <Real R>
Displacement2<R> evolve_displacement(const Displacement2<R>& d0, R tau) {
  if (!(tau >= R(0))) throw std::invalid_argument("evolve_displacement: tau must be >= 0");
  return {d0.x + tau * d0.p, d0.p};
}

using CovMatrix2d = CovMatrix2<double>;
using Displacement2d = Displacement2<double>;

}  // namespace qdiff::gauss
