#pragma once

#include <cmath>
#include <optional>
#include <variant>

#include "qdiff/errors.hpp"
#include "qdiff/gaussian.hpp"
#include "qdiff/linsolve4.hpp"
#include "qdiff/real.hpp"

namespace qdiff::fisher {

// ---------------------------------------------------------------------------
// measurement schemes and bound reporting
// ---------------------------------------------------------------------------

struct Homodyne {
  double theta = 0;  // canonical in (-pi/2, pi/2]

  static double canonical(double theta) {
    double t = std::remainder(theta, num::pi_v<double>());
    if (t <= -num::pi_v<double>() / 2) t += num::pi_v<double>();
    return t;
  }
};

struct Heterodyne {};
struct SldOptimal {};

using MeasurementScheme = std::variant<Homodyne, Heterodyne, SldOptimal>;

/// Single-shot variance lower bound on Lambda, with the per-shot Fisher
/// information it came from. dimensionless_bound = variance_bound/Lambda_SQL^2.
struct PrecisionBound {
  double variance_bound = 0;      // (m^-2 s^-1)^2
  double fisher_info = 0;         // (m^-2 s^-1)^-2 per shot
  MeasurementScheme scheme{};
  double dimensionless_bound = 0;
};

// ---------------------------------------------------------------------------
// stable algebraic helpers
// ---------------------------------------------------------------------------

/// sqrt(9 + 3 tau^2 + tau^4)
template <Real R>
R root_q(R tau) {
  const R t2 = tau * tau;
  return num::sqrt(R(9) + R(3) * t2 + t2 * t2);
}

/// 3 + tau^2 - sqrt(9+3tau^2+tau^4), rationalized so the cancellation at
/// large tau (difference -> 3/2) costs no precision.
template <Real R>
R delta_q(R tau) {
  const R t2 = tau * tau;
  return R(3) * t2 / (R(3) + t2 + root_q(tau));
}

/// Homodyne direction as a unit vector; avoids the absolute-error floor of
/// cos(theta) for angles within ~1/tau of -pi/2.
template <Real R>
struct Quadrature {
  R c{1};  // cos(theta)
  R s{0};  // sin(theta)

  static Quadrature from_angle(R theta) {
    // the canonical momentum angle is exact; cos(pi/2) as a rounded double
    // would leak a ~1e-16 position component that tau amplifies
    const R half_pi = num::pi_v<R>() / R(2);
    if (theta == half_pi) return {R(0), R(1)};
    if (theta == -half_pi) return {R(0), R(-1)};
    return {num::cos(theta), num::sin(theta)};
  }

  /// Direction of theta = -arctan(g), g >= 0, computed without forming theta.
  static Quadrature from_neg_tan(R g) {
    if (g > R(1)) {
      const R gi = R(1) / g;
      const R h = num::sqrt(R(1) + gi * gi);
      return {gi / h, R(-1) / h};
    }
    const R h = num::sqrt(R(1) + g * g);
    return {R(1) / h, -g / h};
  }
};

/// tau^2 cos^2 + tau sin2theta + 1, as a sum of squares: (tau c + s)^2 + c^2.
template <Real R>
R marginal_shear_factor(const Quadrature<R>& q, R tau) {
  const R u = tau * q.c + q.s;
  return u * u + q.c * q.c;
}

/// Diffusion slope of the marginal variance,
///   beta = tau^3/3 cos^2 + tau^2/2 sin2theta + tau sin^2,
/// also positive-definite: tau * [(tau c/sqrt3 + sqrt3 s/2)^2 + s^2/4].
template <Real R>
R homodyne_variance_slope(const Quadrature<R>& q, R tau) {
  const R v = tau * q.c / num::sqrt(R(3)) + num::sqrt(R(3)) / R(2) * q.s;
  return tau * (v * v + q.s * q.s / R(4));
}

/// Coefficient of the thermal variance in the marginal of the evolved state:
///   A1 cosh2r + [(2c^2 - A1) cos2phi + 2c(tau c + s) sin2phi] sinh2r.
template <Real R>
R marginal_thermal_bracket(const Quadrature<R>& q, R tau, R r, R phi) {
  const R a1 = marginal_shear_factor(q, tau);
  const R ch = num::cosh(R(2) * r);
  const R sh = num::sinh(R(2) * r);
  const R c2 = num::cos(R(2) * phi);
  const R s2 = num::sin(R(2) * phi);
  return a1 * ch + ((R(2) * q.c * q.c - a1) * c2 + R(2) * q.c * (tau * q.c + q.s) * s2) * sh;
}

// ---------------------------------------------------------------------------
// quantum Fisher information
// ---------------------------------------------------------------------------

/// Z = (1+tau^2/3) cosh2r + [(1-tau^2/3) cos2phi + tau sin2phi] sinh2r.
/// Strictly positive for every (tau, r, phi).
template <Real R>
R z_factor(R tau, R r, R phi) {
  const R t23 = tau * tau / R(3);
  return (R(1) + t23) * num::cosh(R(2) * r) +
         ((R(1) - t23) * num::cos(R(2) * phi) + tau * num::sin(R(2) * phi)) *
             num::sinh(R(2) * r);
}

/// QFI per unit (dimensionless diffusion rate)^2 for the evolved squeezed
/// thermal state, from the closed form. Throws on the T=1, lambda_tilde=0
/// corner where the expression is 0/0.
template <Real R>
R qfi_closed_dimless(R T, R r, R phi, R tau, R lambda_tilde) {
  if (T == R(1) && lambda_tilde == R(0))
    throw degenerate_error(degeneracy::degenerate_pure_state,
                           "QFI divergent: pure input state with zero diffusion");
  const R Z = z_factor(tau, r, phi);
  const R t2 = tau * tau;
  const R t4 = t2 * t2;
  const R tm1 = (T - R(1)) * (T + R(1));  // T^2 - 1 without cancellation at T ~ 1
  const R s = tau * T * lambda_tilde * Z + t4 / R(12) * lambda_tilde * lambda_tilde;
  const R num = (tm1 + s) * (T * T + R(1) + s);
  const R den = t4 / R(12) * (s - tm1) + t2 / R(2) * T * T * Z * Z;
  return den / num;
}

/// Generic Gaussian QFI per unit parameter^2 from (sigma, dsigma), evaluated
/// as the explicit 4x4 linear solve of (sigma (x) sigma - Omega (x) Omega).
/// The system is first balanced by the exact symplectic congruence
/// P = sqrt(mu) sigma^{-1/2} (so sigma -> mu*I), which leaves the value
/// unchanged and keeps the solve well conditioned whenever the state is
/// meaningfully mixed. Reported condition number is that of the solved
/// system; > 1e12 raises ill_conditioned_error, det sigma = 1 within
/// representational tolerance raises pure_state_singular.
template <Real R>
R qfi_numeric(const gauss::CovMatrix2<R>& sigma, const gauss::CovMatrix2<R>& dsigma,
              R* cond_out = nullptr) {
  if (!(sigma.xx > R(0)) || !(sigma.pp > R(0)))
    throw std::invalid_argument("qfi_numeric: sigma must be positive definite");
  const R d = sigma.det();
  const R scale = sigma.xx * sigma.pp + sigma.xp * sigma.xp + R(1);
  if (!(d > R(0))) throw std::invalid_argument("qfi_numeric: sigma must be positive definite");
  if (d - R(1) <= R(1024) * num::eps_v<R>() * scale)
    throw degenerate_error(degeneracy::pure_state_singular,
                           "qfi_numeric: det sigma = 1 within tolerance, solve singular");

  const R mu = num::sqrt(d);
  const R s2 = sigma.trace() + R(2) * mu;  // det(sigma + mu I) / mu
  // B = adj(sigma + mu I); P ds P^T = B ds B / (s2 * mu)
  const R bxx = sigma.pp + mu, bpp = sigma.xx + mu, bxp = -sigma.xp;
  // rows of B ds
  const R r00 = bxx * dsigma.xx + bxp * dsigma.xp;
  const R r01 = bxx * dsigma.xp + bxp * dsigma.pp;
  const R r10 = bxp * dsigma.xx + bpp * dsigma.xp;
  const R r11 = bxp * dsigma.xp + bpp * dsigma.pp;
  const R inv = R(1) / (s2 * mu);
  gauss::CovMatrix2<R> dsp{(r00 * bxx + r01 * bxp) * inv, (r00 * bxp + r01 * bpp) * inv,
                           (r10 * bxp + r11 * bpp) * inv};

  // M' = mu^2 I - Omega(x)Omega in column-major vec ordering (a11,a21,a12,a22):
  // (Omega(x)Omega) vec([[a,b],[c,d]]) = vec([[d,-c],[-b,a]])
  const R m2 = mu * mu;
  std::array<std::array<R, 4>, 4> M{{{m2, R(0), R(0), R(-1)},
                                     {R(0), m2, R(1), R(0)},
                                     {R(0), R(1), m2, R(0)},
                                     {R(-1), R(0), R(0), m2}}};
  detail::Lu4<R> lu(M);
  if (lu.singular)
    throw degenerate_error(degeneracy::pure_state_singular, "qfi_numeric: singular system");
  const R cond = detail::cond1(M, lu);
  if (cond_out) *cond_out = cond;
  if (cond > R(1e12))
    throw ill_conditioned_error(static_cast<double>(cond),
                                "qfi_numeric: solve unreliable (cond > 1e12)");

  const std::array<R, 4> rhs{dsp.xx, dsp.xp, dsp.xp, dsp.pp};
  const auto x = lu.solve(rhs);
  return (rhs[0] * x[0] + rhs[1] * x[1] + rhs[2] * x[2] + rhs[3] * x[3]) / R(2);
}

// ---------------------------------------------------------------------------
// optimal squeezing for the fundamental bound
// ---------------------------------------------------------------------------

/// Squeeze angle minimizing the fundamental bound,
///   arctan[(tau^2 - 3 - sqrt(9+3tau^2+tau^4)) / (3 tau)],
/// with both subtractions rationalized (limits: -pi/2 at tau->0, 0 at
/// tau->infinity, -pi/4 at tau = sqrt(3)).
template <Real R>
R optimal_qcrb_squeeze_angle(R tau) {
  if (!(tau > R(0))) throw std::invalid_argument("optimal_qcrb_squeeze_angle: tau must be > 0");
  const R t2 = tau * tau;
  const R den = t2 + (R(3) * t2 + t2 * t2) / (root_q(tau) + R(3));  // tau^2 - 3 + root
  return num::atan(R(-3) * tau / den);
}

/// The orthogonal stationary angle (phi_+ above, this is phi_-); the pair
/// differs by pi/2 mod pi.
template <Real R>
R companion_qcrb_squeeze_angle(R tau) {
  if (!(tau > R(0))) throw std::invalid_argument("companion_qcrb_squeeze_angle: tau must be > 0");
  return num::atan((tau * tau - R(3) + root_q(tau)) / (R(3) * tau));
}

struct BranchChoice {
  double phi = 0;  // squeeze angle to use with |r|
  int r_sign = 1;  // +1: the phi_+ branch; -1: phi_- (equivalently r -> -r at phi_+)
};

/// Chooses between the two stationary squeeze angles by the expanded
/// discriminant (equivalent to c < d (a^2+b^2-1)/(2ab)); the returned angle
/// never loses to the rejected one.
template <Real R>
BranchChoice qcrb_branch_select(const gauss::SqueezedThermalSpec<R>& spec, R tau,
                                R lambda_tilde) {
  const R T = spec.thermal_variance;
  const R r = num::fabs(spec.r);
  const R lt = lambda_tilde;
  const R t2 = tau * tau, t3 = t2 * tau, t4 = t2 * t2;
  const R l2t4 = lt * lt * t4;

  const R term1 =
      lt * tau *
      (-T * T * T * T * (R(1) + R(3) * t2 / R(4) + t4 / R(9)) +
       t2 / R(12) * (R(1) + l2t4 / R(12)) * (R(1) + l2t4 / R(12)) +
       T * T * t2 / R(6) * (R(1) - l2t4 / R(12)));
  const R term2 = T * (R(1) + t2 / R(3)) *
                  (R(1) - T * T * T * T + l2t4 / R(6) * (R(1) - R(2) * T * T) +
                   (l2t4 / R(12)) * (l2t4 / R(12))) *
                  num::cosh(R(2) * r);
  const R term3 = -t3 / R(6) * T * T * T * T * lt * num::cosh(R(4) * r);
  const bool plus_better = term1 + term2 + term3 <= R(0);

  BranchChoice out;
  out.r_sign = plus_better ? 1 : -1;
  out.phi = static_cast<double>(plus_better ? companion_qcrb_squeeze_angle(tau)
                                            : optimal_qcrb_squeeze_angle(tau));
  return out;
}

// ---------------------------------------------------------------------------
// homodyne statistics and bounds
// ---------------------------------------------------------------------------

/// Variance of the homodyne marginal q_theta = x cos(theta) + p sin(theta)
/// after evolution; equals u^T sigma(tau) u for u = (cos, sin).
template <Real R>
R homodyne_variance(const Quadrature<R>& q, const gauss::SqueezedThermalSpec<R>& spec, R tau,
                    R lambda_tilde) {
  return spec.thermal_variance * marginal_thermal_bracket(q, tau, spec.r, spec.phi) +
         lambda_tilde * homodyne_variance_slope(q, tau);
}

template <Real R>
R homodyne_variance(R theta, const gauss::SqueezedThermalSpec<R>& spec, R tau, R lambda_tilde) {
  return homodyne_variance(Quadrature<R>::from_angle(theta), spec, tau, lambda_tilde);
}

/// Classical Fisher information of a Gaussian with parameter-independent
/// mean, scalar case: (dSigma)^2 / (2 Sigma^2).
template <Real R>
R gaussian_cfi(R Sigma, R dSigma) {
  if (!(Sigma > R(0))) throw std::invalid_argument("gaussian_cfi: Sigma must be positive");
  const R r = dSigma / Sigma;
  return r * r / R(2);
}

/// 2x2 case: 1/2 Tr[(Sigma^-1 dSigma)^2] = ((Tr X)^2 - 2 det X)/2.
/// An accurate determinant may be supplied when the caller can compute one
/// more stably than the entry product.
template <Real R>
R gaussian_cfi(const gauss::CovMatrix2<R>& Sigma, const gauss::CovMatrix2<R>& dSigma,
               std::optional<R> det_sigma = std::nullopt) {
  const R det = det_sigma.value_or(Sigma.det());
  if (!(det > R(0)) || !(Sigma.xx > R(0)))
    throw degenerate_error(degeneracy::pure_state_singular, "gaussian_cfi: singular Sigma");
  const R tr_adj_d =
      Sigma.pp * dSigma.xx - R(2) * Sigma.xp * dSigma.xp + Sigma.xx * dSigma.pp;
  const R trx = tr_adj_d / det;
  const R detx = dSigma.det() / det;
  return (trx * trx - R(2) * detx) / R(2);
}

/// Dimensionless homodyne CRB, 2 [lambda_tilde + T * bracket/beta]^2.
template <Real R>
R homodyne_crb_dimless(const Quadrature<R>& q, const gauss::SqueezedThermalSpec<R>& spec, R tau,
                       R lambda_tilde) {
  const R beta = homodyne_variance_slope(q, tau);
  if (!(beta > R(0)))
    throw degenerate_error(degeneracy::uninformative_quadrature,
                           "homodyne CRB: quadrature carries no diffusion dependence");
  const R b = lambda_tilde +
              spec.thermal_variance * marginal_thermal_bracket(q, tau, spec.r, spec.phi) / beta;
  return R(2) * b * b;
}

// ---------------------------------------------------------------------------
// optimal angles for homodyne detection
// ---------------------------------------------------------------------------

/// Squeeze angle minimizing the sinh2r coefficient of the homodyne CRB:
/// -arctan[1/(tau + tan theta)]; defined as 0 at theta = pi/2.
template <Real R>
R optimal_homodyne_squeeze_angle(R theta, R tau) {
  if (theta == num::pi_v<R>() / R(2)) return R(0);
  return -num::atan(R(1) / (tau + num::tan(theta)));
}

/// chi(tau, theta) = (tau^2 cos^2 + tau sin2theta + 1) / beta(tau, theta).
template <Real R>
R chi(R tau, const Quadrature<R>& q) {
  const R beta = homodyne_variance_slope(q, tau);
  if (!(beta > R(0)))
    throw degenerate_error(degeneracy::uninformative_quadrature,
                           "chi: quadrature carries no diffusion dependence");
  return marginal_shear_factor(q, tau) / beta;
}

template <Real R>
R chi(R tau, R theta) {
  return chi(tau, Quadrature<R>::from_angle(theta));
}

/// Homodyne angle minimizing the optimally squeezed CRB:
/// -arctan[(3 + 2tau^2 + sqrt(9+3tau^2+tau^4)) / (3 tau)].
template <Real R>
R optimal_homodyne_angle(R tau) {
  if (!(tau > R(0))) throw std::invalid_argument("optimal_homodyne_angle: tau must be > 0");
  return -num::atan((R(3) + R(2) * tau * tau + root_q(tau)) / (R(3) * tau));
}

/// Same angle as a unit vector (exact relative precision arbitrarily close
/// to -pi/2, where the angle representation itself cannot deliver it).
template <Real R>
Quadrature<R> optimal_homodyne_quadrature(R tau) {
  if (!(tau > R(0))) throw std::invalid_argument("optimal_homodyne_quadrature: tau must be > 0");
  return Quadrature<R>::from_neg_tan((R(3) + R(2) * tau * tau + root_q(tau)) / (R(3) * tau));
}

/// chi at the optimal homodyne angle: 2 (3 + tau^2 - sqrt(9+3tau^2+tau^4)) / tau^3.
template <Real R>
R chi_at_optimal_angle(R tau) {
  return R(2) * delta_q(tau) / (tau * tau * tau);
}

/// The squeeze angle paired with the optimal homodyne angle,
///   arctan[3 tau / (3 - tau^2 + sqrt(9+3tau^2+tau^4))]
///     = arctan[(tau^2 - 3 + sqrt(9+3tau^2+tau^4)) / (3 tau)],
/// evaluated in the rationalized form. Equals
/// optimal_homodyne_squeeze_angle(optimal_homodyne_angle(tau), tau), whose
/// tan-based route collapses to rounding noise once tau + tan(theta*)
/// cancels below the resolution of theta* as a double.
template <Real R>
R optimal_homodyne_pair_squeeze_angle(R tau) {
  if (!(tau > R(0)))
    throw std::invalid_argument("optimal_homodyne_pair_squeeze_angle: tau must be > 0");
  const R t2 = tau * tau;
  return num::atan((t2 - R(3) + root_q(tau)) / (R(3) * tau));
}

/// Bound for the optimal homodyne angle with its optimal squeeze angle:
///   2 [lambda_tilde + T e^{-2r} chi*(tau)]^2   (dimensionless).
template <Real R>
R optimal_homodyne_crb_dimless(const gauss::SqueezedThermalSpec<R>& spec, R tau,
                               R lambda_tilde) {
  if (!(tau > R(0)))
    throw degenerate_error(degeneracy::uninformative_quadrature,
                           "optimal homodyne CRB: tau = 0 carries no information");
  const R b = lambda_tilde +
              spec.thermal_variance * num::exp(R(-2) * spec.r) * chi_at_optimal_angle(tau);
  return R(2) * b * b;
}

struct PosMomOptimum {
  double theta = 0;        // optimal homodyne angle at fixed phi = 0 squeezing
  double coefficient = 0;  // thermal-variance coefficient of the resulting bound
};

/// Optimal homodyne angle and bound coefficient when the squeezing is fixed
/// along position/momentum (phi = 0, sign of r selects which):
///   theta = -arctan[(3e^{4r} + 2tau^2 + sqrt(9e^{8r}+3e^{4r}tau^2+tau^4))/(3tau)]
///   coeff = 2(3e^{2r} + e^{-2r}tau^2 - sqrt(9e^{4r}+3tau^2+e^{-4r}tau^4))/tau^3
///         = 6 / (tau (P + Q)),  P = 3e^{2r}+e^{-2r}tau^2, Q = sqrt(P^2 - 3tau^2).
template <Real R>
PosMomOptimum posmom_squeezing_homodyne_optimum(R r, R tau) {
  if (!(tau > R(0)))
    throw std::invalid_argument("posmom_squeezing_homodyne_optimum: tau must be > 0");
  const R e2r = num::exp(R(2) * r), e4r = e2r * e2r;
  const R t2 = tau * tau, t4 = t2 * t2;
  const R theta =
      -num::atan((R(3) * e4r + R(2) * t2 + num::sqrt(R(9) * e4r * e4r + R(3) * e4r * t2 + t4)) /
                 (R(3) * tau));
  const R P = R(3) * e2r + t2 / e2r;
  const R Q = num::sqrt(R(9) * e4r + R(3) * t2 + t4 / e4r);
  return {static_cast<double>(theta), static_cast<double>(R(6) / (tau * (P + Q)))};
}

// ---------------------------------------------------------------------------
// heterodyne detection
// ---------------------------------------------------------------------------

/// Covariance of heterodyne outcomes: sigma(tau) + identity.
template <Real R>
gauss::CovMatrix2<R> heterodyne_covariance(const gauss::CovMatrix2<R>& sigma_tau) {
  return {sigma_tau.xx + R(1), sigma_tau.xp, sigma_tau.pp + R(1)};
}

/// Heterodyne CFI per unit dimensionless diffusion rate squared, through the
/// Gaussian CFI with the determinant carried in its shear-stable form.
template <Real R>
R heterodyne_cfi_dimless(const gauss::SqueezedThermalSpec<R>& spec, R tau, R lambda_tilde) {
  const auto s0 = gauss::initial_covariance(spec);
  const auto st = gauss::evolve_covariance(s0, tau, lambda_tilde);
  const auto het = heterodyne_covariance(st);
  const R det = gauss::evolved_det(s0, tau, lambda_tilde) + st.trace() + R(1);
  return gaussian_cfi(het, gauss::dcov_dlambda(tau), std::optional<R>(det));
}

/// Heterodyne CRB (dimensionless), closed form in the initial covariance:
///   12 |S|^2 / { tau^4 |S| + 6 tau^2 (1 + Sxx + tau Sxp + tau^2/3 Spp)^2
///     + 2 tau^4 [1 + Sxx - Spp - Sxx Spp + Sxp^2 + tau^2/3 (1 - Spp)] },
/// |S| the determinant of the heterodyne covariance.
template <Real R>
R heterodyne_crb_dimless(const gauss::SqueezedThermalSpec<R>& spec, R tau, R lambda_tilde) {
  if (!(tau > R(0)))
    throw degenerate_error(degeneracy::uninformative_quadrature,
                           "heterodyne CRB: tau = 0 carries no information");
  const auto s0 = gauss::initial_covariance(spec);
  const auto st = gauss::evolve_covariance(s0, tau, lambda_tilde);
  const R detS = gauss::evolved_det(s0, tau, lambda_tilde) + st.trace() + R(1);
  const R t2 = tau * tau, t4 = t2 * t2;
  const R den =
      t4 * detS +
      R(6) * t2 * (R(1) + s0.xx + tau * s0.xp + t2 / R(3) * s0.pp) *
          (R(1) + s0.xx + tau * s0.xp + t2 / R(3) * s0.pp) +
      R(2) * t4 *
          (R(1) + s0.xx - s0.pp - s0.xx * s0.pp + s0.xp * s0.xp + t2 / R(3) * (R(1) - s0.pp));
  return R(12) * detS * detS / den;
}

// ---------------------------------------------------------------------------
// information ratios (valid for T = 1, r = 0 by contract)
// ---------------------------------------------------------------------------

namespace detail_ratio {
template <Real R>
void require_regular(R lambda_tilde) {
  if (!(lambda_tilde > R(0)))
    throw degenerate_error(degeneracy::degenerate_pure_state,
                           "information ratio undefined at lambda_tilde = 0 with T = 1");
}
}  // namespace detail_ratio

/// F(optimal homodyne)/H.
template <Real R>
R ratio_hom_qfi(R tau, R lambda_tilde) {
  detail_ratio::require_regular(lambda_tilde);
  const R t2 = tau * tau, t3 = t2 * tau, t4 = t2 * t2;
  const R z0 = R(1) + t2 / R(3);
  const R w = t3 * lambda_tilde / R(12);
  const R s = lambda_tilde * tau * (z0 + w);
  const R br1 = (delta_q(tau) + t3 * lambda_tilde / R(2)) / R(3);
  const R den_core = z0 * z0 / R(2) + z0 * w + w * w;
  return t4 * s * (R(2) + s) / (R(72) * br1 * br1 * den_core);
}

/// F(heterodyne)/H.
template <Real R>
R ratio_het_qfi(R tau, R lambda_tilde) {
  detail_ratio::require_regular(lambda_tilde);
  const R t2 = tau * tau, t3 = t2 * tau;
  const R z0 = R(1) + t2 / R(3);
  const R w = t3 * lambda_tilde / R(12);
  const R A = z0 + w;
  const R s = lambda_tilde * tau * A;
  const R e = R(1) + t2 / R(6);
  const R g = R(1) + tau * lambda_tilde / R(2);
  const R h = R(1) + t2 / R(4) + t3 * lambda_tilde / R(24);
  const R den_core = z0 * z0 / R(2) + z0 * w + w * w;
  return s * (R(2) + s) * (A * A + e * e) / (R(16) * g * g * h * h * den_core);
}

/// F(heterodyne)/F(optimal homodyne).
template <Real R>
R ratio_het_hom(R tau, R lambda_tilde) {
  detail_ratio::require_regular(lambda_tilde);
  const R t2 = tau * tau, t3 = t2 * tau, t4 = t2 * t2;
  const R z0 = R(1) + t2 / R(3);
  const R w = t3 * lambda_tilde / R(12);
  const R A = z0 + w;
  const R e = R(1) + t2 / R(6);
  const R g = R(1) + tau * lambda_tilde / R(2);
  const R h = R(1) + t2 / R(4) + t3 * lambda_tilde / R(24);
  const R br1 = (delta_q(tau) + t3 * lambda_tilde / R(2)) / R(3);
  return R(9) * (A * A + e * e) * br1 * br1 / (R(2) * t4 * g * g * h * h);
}

// ---------------------------------------------------------------------------
// PrecisionBound assembly (double-facing API)
// ---------------------------------------------------------------------------

inline PrecisionBound make_bound(double dimless, MeasurementScheme scheme, double lambda_sql) {
  PrecisionBound b;
  b.dimensionless_bound = dimless;
  b.variance_bound = dimless * lambda_sql * lambda_sql;
  b.fisher_info = 1.0 / b.variance_bound;
  b.scheme = scheme;
  return b;
}

inline PrecisionBound qcrb_closed_form(const gauss::SqueezedThermalSpecd& spec, double tau,
                                       double lambda_tilde, double lambda_sql) {
  const double qfi =
      qfi_closed_dimless(spec.thermal_variance, spec.r, spec.phi, tau, lambda_tilde);
  return make_bound(1.0 / qfi, SldOptimal{}, lambda_sql);
}

inline PrecisionBound homodyne_crb(double theta, const gauss::SqueezedThermalSpecd& spec,
                                   double tau, double lambda_tilde, double lambda_sql) {
  const double dimless =
      homodyne_crb_dimless(Quadrature<double>::from_angle(theta), spec, tau, lambda_tilde);
  return make_bound(dimless, Homodyne{Homodyne::canonical(theta)}, lambda_sql);
}

inline PrecisionBound position_crb(const gauss::SqueezedThermalSpecd& spec, double tau,
                                   double lambda_tilde, double lambda_sql) {
  return homodyne_crb(0.0, spec, tau, lambda_tilde, lambda_sql);
}

inline PrecisionBound momentum_crb(const gauss::SqueezedThermalSpecd& spec, double tau,
                                   double lambda_tilde, double lambda_sql) {
  return homodyne_crb(num::pi_v<double>() / 2, spec, tau, lambda_tilde, lambda_sql);
}

inline PrecisionBound optimal_homodyne_crb(const gauss::SqueezedThermalSpecd& spec, double tau,
                                           double lambda_tilde, double lambda_sql) {
  const double dimless = optimal_homodyne_crb_dimless(spec, tau, lambda_tilde);
  return make_bound(dimless, Homodyne{Homodyne::canonical(optimal_homodyne_angle(tau))},
                    lambda_sql);
}

inline PrecisionBound heterodyne_crb(const gauss::SqueezedThermalSpecd& spec, double tau,
                                     double lambda_tilde, double lambda_sql) {
  return make_bound(heterodyne_crb_dimless(spec, tau, lambda_tilde), Heterodyne{}, lambda_sql);
}

/// Single-shot standard deviation of the quadrature scheme's CRB in the
/// lambda -> 0 limit: sqrt(2) Lambda_SQL T bracket/beta. Feeds the minimum
/// detectable collapse rate.
inline double quadrature_crb_lambda0_std(const Quadrature<double>& q,
                                         const gauss::SqueezedThermalSpecd& spec, double tau,
                                         double lambda_sql) {
  const double beta = homodyne_variance_slope(q, tau);
  if (!(beta > 0))
    throw degenerate_error(degeneracy::undefined_limit,
                           "lambda->0 limit undefined: uninformative quadrature");
  return std::sqrt(2.0) * lambda_sql * spec.thermal_variance *
         marginal_thermal_bracket(q, tau, spec.r, spec.phi) / beta;
}

}  // namespace qdiff::fisher
