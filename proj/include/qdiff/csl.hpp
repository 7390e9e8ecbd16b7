#pragma once

#include <cstdint>

namespace qdiff::csl {

/// Point in collapse-model parameter space.
struct CslPoint {
  double lambda_csl = 0;  // collapse rate, s^-1
  double r_c = 0;         // correlation length, m
};

struct SphereSpec {
  double mass_kg = 0;
  double radius_m = 0;          // r_S
  double reference_mass_kg = 0; // m0, nucleon mass (1 amu by default at the CLI)
};

/// Geometric shape factor
///   f(x) = 6/x^4 [1 - 2/x^2 + (1 + 2/x^2) e^{-x^2}],
/// monotone decreasing from 1 to 0. The bracket is O(x^4) against O(1)
/// terms, so x < 0.5 switches to the Taylor expansion of the bracket
/// (through x^18); both branches agree to ~2e-13 at the crossover.
double shape_factor_f(double x);

/// Observed diffusion rate from collapse parameters:
///   Lambda = lambda/(4 r_C^2) (m/m0)^2 f(r_S/r_C)   [m^-2 s^-1]
double lambda_from_csl(const CslPoint& point, const SphereSpec& sphere);

/// Collapse-rate uncertainty from a diffusion-rate uncertainty at fixed r_C:
///   dlambda = 4 r_C^2 [(m/m0)^2 f(r_S/r_C)]^-1 dLambda   [s^-1]
double delta_lambda_csl(double delta_lambda, double r_c, const SphereSpec& sphere);

/// Minimum detectable collapse rate, lambda_min = (2/sqrt(nu)) * dlambda_0,
/// where delta_lambda0_std is the lambda->0 limit of the scheme's
/// single-shot CRB standard deviation on Lambda.
double min_detectable_rate(double delta_lambda0_std, std::uint64_t repetitions, double r_c,
                           const SphereSpec& sphere);

}  // namespace qdiff::csl
