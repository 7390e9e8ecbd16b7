#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "qdiff/fisher.hpp"
#include "qdiff/sld.hpp"

using namespace qdiff;
using gauss::CovMatrix2d;
using gauss::SqueezedThermalSpecd;

namespace {

// residual of the defining equation sigma L sigma + Omega L Omega = D(tau)
double defining_residual(const CovMatrix2d& s, const CovMatrix2d& l, const CovMatrix2d& d) {
  // sigma L sigma for symmetric matrices
  const double a00 = s.xx * l.xx + s.xp * l.xp, a01 = s.xx * l.xp + s.xp * l.pp;
  const double a10 = s.xp * l.xx + s.pp * l.xp, a11 = s.xp * l.xp + s.pp * l.pp;
  const double sls00 = a00 * s.xx + a01 * s.xp;
  const double sls01 = a00 * s.xp + a01 * s.pp;
  const double sls11 = a10 * s.xp + a11 * s.pp;
  // Omega L Omega^T = [[l.pp, -l.xp], [-l.xp, l.xx]]... with Omega L Omega:
  // Omega [[lxx,lxp],[lxp,lpp]] Omega = [[-lpp, lxp],[lxp, -lxx]]
  const double r00 = sls00 - l.pp - d.xx;
  const double r01 = sls01 + l.xp - d.xp;
  const double r11 = sls11 - l.xx - d.pp;
  const double dmax = std::fmax(std::fabs(d.xx), std::fmax(std::fabs(d.xp), std::fabs(d.pp)));
  return std::fmax(std::fabs(r00), std::fmax(std::fabs(r01), std::fabs(r11))) / dmax;
}

}  // namespace

TEST_CASE("L2 satisfies its defining equation on random mixed states") {
  // the residual evaluation itself cancels like (s_max/s_min)^2, so the
  // double-precision check lives at moderate shears; the acceptance suite
  // repeats it across the full grid in extended precision
  oracles::Rng rng(41);
  for (int i = 0; i < 200; ++i) {
    const SqueezedThermalSpecd s(rng.uniform(1.05, 3.0), rng.uniform(-0.5, 0.5),
                                 rng.uniform(0, 3));
    const double tau = rng.log_uniform(1e-2, 5.0);
    const double lt = rng.log_uniform(1e-4, 1.0);
    const auto st = gauss::evolve_covariance(gauss::initial_covariance(s), tau, lt);
    const auto form = sld::l2_matrix(st, tau);
    CHECK(defining_residual(st, form.l2, gauss::dcov_dlambda(tau)) < 1e-10);
    // constant offset
    const double tr = form.l2.xx * st.xx + 2 * form.l2.xp * st.xp + form.l2.pp * st.pp;
    CHECK(form.constant_offset == doctest::Approx(-0.5 * tr).epsilon(1e-12));
  }
}

TEST_CASE("QFI identity: H = Tr(dsigma L2)/2") {
  oracles::Rng rng(42);
  for (int i = 0; i < 200; ++i) {
    const SqueezedThermalSpecd s(rng.uniform(1.05, 8.0), rng.uniform(-1.0, 1.0),
                                 rng.uniform(0, 3));
    const double tau = rng.log_uniform(1e-2, 1e2);
    const double lt = rng.log_uniform(1e-6, 1e1);
    const auto st = gauss::evolve_covariance(gauss::initial_covariance(s), tau, lt);
    const auto d = gauss::dcov_dlambda(tau);
    const auto form = sld::l2_matrix(st, tau);
    const double via_l2 = 0.5 * (d.xx * form.l2.xx + 2 * d.xp * form.l2.xp + d.pp * form.l2.pp);
    const double via_solve = fisher::qfi_numeric<double>(st, d);
    CHECK(via_l2 == doctest::Approx(via_solve).epsilon(1e-9));
  }
}

TEST_CASE("L2 is well behaved at zero diffusion for mixed thermal input") {
  const SqueezedThermalSpecd s(1.6, 0.0, 0.0);
  const auto st = gauss::evolve_covariance(gauss::initial_covariance(s), 12.0, 0.0);
  const auto form = sld::l2_matrix(st, 12.0);
  CHECK(std::isfinite(form.l2.xx));
  CHECK(std::isfinite(form.l2.xp));
  CHECK(std::isfinite(form.l2.pp));
}

TEST_CASE("l2_matrix rejects pure states") {
  const SqueezedThermalSpecd pure(1.0, 0.0, 0.0);
  const auto st = gauss::evolve_covariance(gauss::initial_covariance(pure), 3.0, 0.0);
  CHECK_THROWS_AS((void)sld::l2_matrix(st, 3.0), degenerate_error);
}

TEST_CASE("spectrum: eigenvalues match a generic symmetric eigensolver") {
  oracles::Rng rng(43);
  for (int i = 0; i < 200; ++i) {
    const SqueezedThermalSpecd s(rng.uniform(1.05, 6.0), rng.uniform(-1.0, 1.0),
                                 rng.uniform(0, 3));
    // modest ranges: the plain-eigensolver oracle forms det from the entry
    // product, which sheds accuracy at extreme shears
    const double tau = rng.log_uniform(1e-2, 1e2);
    const double lt = rng.log_uniform(1e-6, 1e-1);
    const auto st = gauss::evolve_covariance(gauss::initial_covariance(s), tau, lt);
    const auto form = sld::l2_matrix(st, tau);
    const auto dec = sld::sld_spectrum(form, st, tau);

    // plain symmetric 2x2 eigendecomposition
    const double mean = 0.5 * (form.l2.xx + form.l2.pp);
    const double root = std::hypot(0.5 * (form.l2.xx - form.l2.pp), form.l2.xp);
    CHECK(dec.d1 == doctest::Approx(mean + root).epsilon(1e-10));
    CHECK(dec.d2 == doctest::Approx(mean - root).epsilon(1e-8));
    CHECK(dec.d1 * dec.d2 ==
          doctest::Approx(form.l2.xx * form.l2.pp - form.l2.xp * form.l2.xp).epsilon(1e-9));
    CHECK(dec.symplectic_eigenvalue == doctest::Approx(std::sqrt(dec.d1 * dec.d2)).epsilon(1e-10));

    // rotation by psi diagonalizes; rotation + squeeze yields ~identity shape
    const double c = std::cos(dec.rotation_angle), sn = std::sin(dec.rotation_angle);
    const double off = (form.l2.pp - form.l2.xx) * c * sn + form.l2.xp * (c * c - sn * sn);
    CHECK(std::fabs(off) <= 1e-10 * std::fmax(std::fabs(dec.d1), std::fabs(dec.d2)));
    // Williamson consistency: diag(e^z, e^-z) applied to the rotated form
    // rescales both eigenvalues to the symplectic eigenvalue
    const double ez = std::exp(dec.required_squeezing);
    const double v1 = dec.d1 / (ez * ez);
    const double v2 = dec.d2 * (ez * ez);
    CHECK(v1 == doctest::Approx(v2).epsilon(1e-9));
  }
}

TEST_CASE("required squeezing: asymptotic regimes") {
  // small tau with T = 1: e^{2z} ~ 1 + tau
  {
    const SqueezedThermalSpecd s(1.0, 0.0, 0.0);
    const double tau = 1e-3, lt = 1.0;
    const auto st = gauss::evolve_covariance(gauss::initial_covariance(s), tau, lt);
    const auto dec = sld::sld_spectrum(sld::l2_matrix(st, tau), st, tau);
    const double e2z = std::exp(2.0 * dec.required_squeezing);
    CHECK(std::fabs(e2z - (1.0 + tau)) < 1e-4);
  }
  // large tau with large diffusion budget: e^{2z} -> 2 tau / sqrt(3)
  {
    const SqueezedThermalSpecd s(1.0, 0.0, 0.0);
    const double tau = 1e6, lt = 1e-3;  // lt * tau = 1e3 deep in the asymptotic regime
    const auto st = gauss::evolve_covariance(gauss::initial_covariance(s), tau, lt);
    const auto dec = sld::sld_spectrum(sld::l2_matrix(st, tau), st, tau);
    const double e2z = std::exp(2.0 * dec.required_squeezing);
    CHECK(e2z == doctest::Approx(2.0 * tau / std::sqrt(3.0)).epsilon(5e-3));
  }
}

TEST_CASE("required squeezing in dB") {
  sld::SldDecomposition<double> d;
  d.required_squeezing = 0.0;
  CHECK(sld::required_squeezing_db(d) == doctest::Approx(0.0));
  d.required_squeezing = std::log(10.0) / 2.0;  // e^{2z} = 10
  CHECK(sld::required_squeezing_db(d) == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("published reference point: 79 dB at Lambda = 1e20 under table literals") {
  // tau = 6.3e7, lambda_sql = 1.6e26, T = 1.6 reproduce the quoted 79 dB
  // (soft check; the formula-derived parameter set gives a different value,
  // which the artifact reports side by side)
  const SqueezedThermalSpecd s(1.6, 0.0, 0.0);
  const double tau = 6.3e7;
  const double lt = 1e20 / 1.6e26;
  const auto st = gauss::evolve_covariance(gauss::initial_covariance(s), tau, lt);
  const auto dec = sld::sld_spectrum(sld::l2_matrix(st, tau), st, tau);
  CHECK(sld::required_squeezing_db(dec) == doctest::Approx(79.0).epsilon(0.01));

  const double lt2 = 1e10 / 1.6e26;
  const auto st2 = gauss::evolve_covariance(gauss::initial_covariance(s), tau, lt2);
  const auto dec2 = sld::sld_spectrum(sld::l2_matrix(st2, tau), st2, tau);
  CHECK(sld::required_squeezing_db(dec2) == doctest::Approx(158.0).epsilon(0.01));
}
