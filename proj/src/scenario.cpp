#include "qdiff/scenario.hpp"

#include <cmath>
#include <stdexcept>

namespace qdiff::gauss {

double Scenario::derived_residual() const {
  auto rel = [](double a, double b) {
    double scale = std::fmax(std::fabs(a), std::fabs(b));
    return scale > 0 ? std::fabs(a - b) / scale : 0.0;
  };
  double r = rel(tau, omega * time_s);
  r = std::fmax(r, rel(lambda_sql, mass_kg * omega * omega / (4.0 * constants::hbar)));
  if (lambda_sql > 0) r = std::fmax(r, rel(lambda_tilde, lambda / lambda_sql));
  return r;
}

Scenario scenario_derive(double mass_kg, double omega, double time_s, double lambda,
                         double sphere_radius_m, std::uint64_t repetitions) {
  if (!(mass_kg > 0)) throw std::invalid_argument("scenario: mass must be positive");
  if (!(omega > 0)) throw std::invalid_argument("scenario: omega must be positive");
  if (!(time_s > 0)) throw std::invalid_argument("scenario: time must be positive");
  if (!(lambda >= 0)) throw std::invalid_argument("scenario: lambda must be >= 0");

  Scenario s;
  s.mass_kg = mass_kg;
  s.omega = omega;
  s.time_s = time_s;
  s.lambda = lambda;
  s.sphere_radius_m = sphere_radius_m;
  s.repetitions = repetitions;
  s.tau = omega * time_s;
  s.lambda_sql = mass_kg * omega * omega / (4.0 * constants::hbar);
  s.lambda_tilde = lambda / s.lambda_sql;
  return s;
}

}  // namespace qdiff::gauss
