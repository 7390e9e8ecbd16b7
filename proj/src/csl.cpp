#include "qdiff/csl.hpp"

#include <cmath>
#include <stdexcept>

namespace qdiff::csl {

namespace {

// bracket(x)/x^4 expanded: f = 6 sum_{k>=2} (-1)^k (k-1)/(k+1)! x^{2k-4};
// coefficients of x^0..x^18 below, i.e. k = 2..11.
constexpr double kSeries[] = {
    1.0,              // k=2
    -0.5,             // k=3
    0.15,             // k=4: 3/20
    -1.0 / 30.0,      // k=5
    1.0 / 168.0,      // k=6
    -1.0 / 1120.0,    // k=7
    1.0 / 8640.0,     // k=8:  6*7/9!
    -1.0 / 75600.0,   // k=9:  6*8/10!
    1.0 / 739200.0,   // k=10: 6*9/11!
    -1.0 / 7983360.0, // k=11: 6*10/12!
};

constexpr double kCrossover = 0.5;

}  // namespace

double shape_factor_f(double x) {
  if (!(x > 0)) throw std::invalid_argument("shape_factor_f: x must be > 0");
  if (x < kCrossover) {
    const double x2 = x * x;
    double p = kSeries[9];
    for (int i = 8; i >= 0; --i) p = p * x2 + kSeries[i];
    return p;
  }
  const double x2 = x * x;
  return 6.0 / (x2 * x2) * (1.0 - 2.0 / x2 + (1.0 + 2.0 / x2) * std::exp(-x2));
}

double lambda_from_csl(const CslPoint& point, const SphereSpec& sphere) {
  if (!(point.lambda_csl > 0) || !(point.r_c > 0))
    throw std::invalid_argument("lambda_from_csl: collapse parameters must be positive");
  if (!(sphere.mass_kg > 0) || !(sphere.radius_m > 0) || !(sphere.reference_mass_kg > 0))
    throw std::invalid_argument("lambda_from_csl: sphere parameters must be positive");
  const double mr = sphere.mass_kg / sphere.reference_mass_kg;
  return point.lambda_csl / (4.0 * point.r_c * point.r_c) * mr * mr *
         shape_factor_f(sphere.radius_m / point.r_c);
}

double delta_lambda_csl(double delta_lambda, double r_c, const SphereSpec& sphere) {
  if (!(delta_lambda >= 0))
    throw std::invalid_argument("delta_lambda_csl: uncertainty must be >= 0");
  if (!(r_c > 0)) throw std::invalid_argument("delta_lambda_csl: r_c must be > 0");
  if (!(sphere.mass_kg > 0) || !(sphere.radius_m > 0) || !(sphere.reference_mass_kg > 0))
    throw std::invalid_argument("delta_lambda_csl: sphere parameters must be positive");
  const double mr = sphere.mass_kg / sphere.reference_mass_kg;
  return 4.0 * r_c * r_c / (mr * mr * shape_factor_f(sphere.radius_m / r_c)) * delta_lambda;
}

double min_detectable_rate(double delta_lambda0_std, std::uint64_t repetitions, double r_c,
                           const SphereSpec& sphere) {
  if (repetitions < 1) throw std::invalid_argument("min_detectable_rate: nu must be >= 1");
  return 2.0 / std::sqrt(static_cast<double>(repetitions)) *
         delta_lambda_csl(delta_lambda0_std, r_c, sphere);
}

}  // namespace qdiff::csl
