#include <doctest.h>

#include <cmath>
#include <cstring>

#include "oracles.hpp"
#include "qdiff/kernels/kernels.hpp"
#include "qdiff/mc.hpp"

using namespace qdiff;
using gauss::SqueezedThermalSpecd;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("homodyne sampling: mean, variance, determinism across threads") {
  const SqueezedThermalSpecd s(1.6, 0.0, 0.0);
  const double tau = 1e4, lt = 1.6e-3;
  const std::uint64_t n = 200000;
  const auto xs = mc::sample_homodyne(kPi / 2, s, tau, lt, n, 7, 0, 1 << 14, 1);

  const double sigma = fisher::homodyne_variance(kPi / 2, s, tau, lt);
  double mean = 0;
  for (double v : xs) mean += v;
  mean /= double(n);
  CHECK(std::fabs(mean) < 5.0 * std::sqrt(sigma / double(n)));
  const double m2 = kernels::sum_squares(xs.data(), n) / double(n);
  CHECK(std::fabs(m2 - sigma) < 5.0 * sigma * std::sqrt(2.0 / double(n)));

  const auto xs4 = mc::sample_homodyne(kPi / 2, s, tau, lt, n, 7, 0, 1 << 14, 4);
  CHECK(std::memcmp(xs.data(), xs4.data(), n * sizeof(double)) == 0);
}

TEST_CASE("heterodyne sampling: empirical covariance within Wishart bounds") {
  const SqueezedThermalSpecd s(1.3, 0.6, 0.8);
  const double tau = 3.0, lt = 0.5;
  const std::uint64_t n = 100000;
  const auto xy = mc::sample_heterodyne(s, tau, lt, n, 11, 0, 1 << 14, 2);
  REQUIRE(xy.size() == 2 * n);

  const auto st = gauss::evolve_covariance(gauss::initial_covariance(s), tau, lt);
  const auto het = fisher::heterodyne_covariance(st);
  const auto m = kernels::pair_moments(xy.data(), n);
  const double exx = m.sxx / double(n), exy = m.sxy / double(n), eyy = m.syy / double(n);
  CHECK(std::fabs(exx - het.xx) < 5.0 * het.xx * std::sqrt(2.0 / double(n)));
  CHECK(std::fabs(eyy - het.pp) < 5.0 * het.pp * std::sqrt(2.0 / double(n)));
  const double sd_xy = std::sqrt((het.xx * het.pp + het.xp * het.xp) / double(n));
  CHECK(std::fabs(exy - het.xp) < 5.0 * sd_xy);
  // off-diagonal sign carries through for a clearly correlated state
  CHECK(het.xp > 0.1);
  CHECK(exy > 0.0);
}

TEST_CASE("homodyne MLE: algebraic inversion and clamping") {
  const SqueezedThermalSpecd s(1.6, 0.0, 0.0);
  const double tau = 100.0;
  const auto q = fisher::Quadrature<double>::from_angle(kPi / 2);
  const double A = s.thermal_variance * fisher::marginal_thermal_bracket(q, tau, s.r, s.phi);
  const double B = fisher::homodyne_variance_slope(q, tau);

  // m2 = A + lt* B exactly -> estimate = lt* exactly
  const double lt_true = 3e-3;
  const double target = A + lt_true * B;
  std::vector<double> xs = {std::sqrt(target), -std::sqrt(target)};
  const double est = mc::mle_lambda(xs, fisher::Homodyne{kPi / 2}, s, tau);
  CHECK(est == doctest::Approx(lt_true).epsilon(1e-12));

  // sample mean squared below A clamps to zero
  std::vector<double> small = {0.01, -0.01};
  CHECK(mc::mle_lambda(small, fisher::Homodyne{kPi / 2}, s, tau) == 0.0);
}

TEST_CASE("estimates drawn at zero diffusion concentrate at zero") {
  const SqueezedThermalSpecd s(1.6, 0.0, 0.0);
  const double tau = 1e3;
  const auto xs = mc::sample_homodyne(kPi / 2, s, tau, 0.0, 100000, 3, 0, 1 << 14, 2);
  const double est = mc::mle_lambda(xs, fisher::Homodyne{kPi / 2}, s, tau);
  // clamped at zero about half the time; always within a few standard errors
  const double se = std::sqrt(2.0 / 100000.0) * s.thermal_variance / tau;
  CHECK(est < 5.0 * se);
}

TEST_CASE("heterodyne MLE recovers the truth on large samples") {
  const SqueezedThermalSpecd s(1.4, 0.3, 0.5);
  const double tau = 5.0, lt_true = 0.2;
  const auto xy = mc::sample_heterodyne(s, tau, lt_true, 200000, 17, 0, 1 << 14, 2);
  const double est = mc::mle_lambda(xy, fisher::Heterodyne{}, s, tau);
  const double crb = 1.0 / (200000.0 * fisher::heterodyne_cfi_dimless(s, tau, lt_true));
  CHECK(std::fabs(est - lt_true) < 6.0 * std::sqrt(crb));
}

TEST_CASE("saturation study: homodyne hits the bound at the spec point") {
  // theta = pi/2, T = 1.6, tau = 1e4, lt = 10 T/tau, nu = 1e5, 200 replicates
  mc::ExperimentRun run;
  run.scheme = fisher::Homodyne{kPi / 2};
  run.state = SqueezedThermalSpecd(1.6, 0.0, 0.0);
  run.tau = 1e4;
  run.true_lambda_tilde = 10.0 * 1.6 / 1e4;
  run.samples = 100000;
  run.seed = 7;
  const auto rep = mc::saturation_study(run, 200, 0);
  CHECK(rep.saturation_ratio > 0.95);
  CHECK(rep.saturation_ratio < 1.05);
  CHECK(rep.estimate_mean ==
        doctest::Approx(run.true_lambda_tilde).epsilon(4.0 * std::sqrt(rep.crb_at_truth) /
                                                       run.true_lambda_tilde / std::sqrt(200.0)));
  CHECK(rep.ratio_halfwidth > 0.0);
}

TEST_CASE("doubling nu halves the empirical variance within confidence bands") {
  mc::ExperimentRun run;
  run.scheme = fisher::Homodyne{kPi / 2};
  run.state = SqueezedThermalSpecd(1.6, 0.0, 0.0);
  run.tau = 1e4;
  run.true_lambda_tilde = 10.0 * 1.6 / 1e4;
  run.samples = 20000;
  run.seed = 5;
  const auto rep1 = mc::saturation_study(run, 150, 0);
  run.samples = 40000;
  const auto rep2 = mc::saturation_study(run, 150, 0);
  const double ratio = rep1.empirical_variance / rep2.empirical_variance;
  CHECK(ratio > 2.0 * (1.0 - 0.35));
  CHECK(ratio < 2.0 * (1.0 + 0.35));
}

TEST_CASE("position vs momentum empirical variance approaches the factor of 9") {
  // lt << T/tau regime; expected CRB ratio at this point is 8.44
  const double tau = 1e6, T = 1.6;
  const double lt = T / (20.0 * tau);
  mc::ExperimentRun run;
  run.state = SqueezedThermalSpecd(T, 0.0, 0.0);
  run.tau = tau;
  run.true_lambda_tilde = lt;
  run.samples = 200000;
  run.seed = 9;

  run.scheme = fisher::Homodyne{0.0};
  const auto pos = mc::saturation_study(run, 150, 0);
  run.scheme = fisher::Homodyne{kPi / 2};
  const auto mom = mc::saturation_study(run, 150, 0);

  const double crb_ratio =
      fisher::position_crb(run.state, tau, lt, 1.0).dimensionless_bound /
      fisher::momentum_crb(run.state, tau, lt, 1.0).dimensionless_bound;
  CHECK(crb_ratio > 8.0);
  CHECK(crb_ratio < 9.0);
  const double emp_ratio = pos.empirical_variance / mom.empirical_variance;
  CHECK(emp_ratio == doctest::Approx(crb_ratio).epsilon(0.35));
}

TEST_CASE("run validation") {
  mc::ExperimentRun run;
  run.scheme = fisher::Homodyne{0.0};
  run.state = SqueezedThermalSpecd(1.6, 0.0, 0.0);
  run.tau = 10.0;
  run.true_lambda_tilde = 0.1;
  run.samples = 1;
  CHECK_THROWS_AS(run.validate(), std::invalid_argument);
  run.samples = 100;
  run.chunk_size = 0;
  CHECK_THROWS_AS(run.validate(), std::invalid_argument);
}
