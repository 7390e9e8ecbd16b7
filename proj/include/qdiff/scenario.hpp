#pragma once

#include <cstdint>

#include "qdiff/real.hpp"

namespace qdiff::gauss {

/// Physical parameters of a free-expansion run plus the derived
/// dimensionless quantities. All unit conversions (amu, dB, years) happen
/// at the CLI boundary; this struct is already in SI.
struct Scenario {
  double mass_kg = 0;        // m
  double omega = 0;          // trap frequency before release, rad/s
  double time_s = 0;         // free-fall time t
  double lambda = 0;         // diffusion rate Lambda, m^-2 s^-1
  double sphere_radius_m = 0;
  std::uint64_t repetitions = 1;  // nu

  // derived
  double tau = 0;           // omega * t
  double lambda_sql = 0;    // m omega^2 / (4 hbar), m^-2 s^-1
  double lambda_tilde = 0;  // lambda / lambda_sql

  /// Relative consistency of the derived fields with their definitions.
  double derived_residual() const;
};

/// Fills tau = omega*t, lambda_sql = m omega^2/(4 hbar),
/// lambda_tilde = lambda/lambda_sql. Rejects nonpositive mass/omega/time
/// and negative lambda.
Scenario scenario_derive(double mass_kg, double omega, double time_s, double lambda,
                         double sphere_radius_m = 0, std::uint64_t repetitions = 1);

}  // namespace qdiff::gauss
