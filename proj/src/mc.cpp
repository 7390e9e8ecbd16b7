#include "qdiff/mc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include "qdiff/kernels/kernels.hpp"
#include "qdiff/kernels/reduce_detail.hpp"

namespace qdiff::mc {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("QDIFF_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

namespace {

constexpr double kZ975 = 1.959963984540054;

/// runs fn(chunk_index) over [0, n_chunks) on a small pool; results must be
/// written to disjoint slots.
template <class Fn>
void parallel_chunks(std::uint64_t n_chunks, int threads, Fn&& fn) {
  const std::uint64_t nt =
      std::min<std::uint64_t>(static_cast<std::uint64_t>(resolve_threads(threads)), n_chunks);
  if (nt <= 1) {
    for (std::uint64_t c = 0; c < n_chunks; ++c) fn(c);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(nt);
  for (std::uint64_t t = 0; t < nt; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::uint64_t c = next.fetch_add(1, std::memory_order_relaxed);
        if (c >= n_chunks) return;
        fn(c);
      }
    });
  }
  for (auto& th : pool) th.join();
}

struct HomodyneModel {
  double a = 0;      // variance intercept, T * bracket(theta)
  double b = 0;      // variance slope in lambda_tilde, beta(theta, tau)
  double sd = 0;     // sqrt(a + lambda_tilde b) at the sampling truth
};

HomodyneModel homodyne_model(double theta, const gauss::SqueezedThermalSpecd& spec, double tau,
                             double lambda_tilde) {
  const auto q = fisher::Quadrature<double>::from_angle(theta);
  HomodyneModel m;
  m.a = spec.thermal_variance * fisher::marginal_thermal_bracket(q, tau, spec.r, spec.phi);
  m.b = fisher::homodyne_variance_slope(q, tau);
  m.sd = std::sqrt(m.a + lambda_tilde * m.b);
  return m;
}

}  // namespace

void ExperimentRun::validate() const {
  if (samples < 2) throw std::invalid_argument("ExperimentRun: need at least 2 samples");
  if (chunk_size < 1) throw std::invalid_argument("ExperimentRun: chunk_size must be >= 1");
  if (!(true_lambda_tilde >= 0))
    throw std::invalid_argument("ExperimentRun: true_lambda_tilde must be >= 0");
  if (!(tau > 0)) throw std::invalid_argument("ExperimentRun: tau must be > 0");
}

std::vector<double> sample_homodyne(double theta, const gauss::SqueezedThermalSpecd& spec,
                                    double tau, double lambda_tilde, std::uint64_t n,
                                    std::uint64_t seed, std::uint64_t stream,
                                    std::uint64_t chunk_size, int threads) {
  const HomodyneModel m = homodyne_model(theta, spec, tau, lambda_tilde);
  std::vector<double> out(n);
  const std::uint64_t n_chunks = chunk_size ? (n + chunk_size - 1) / chunk_size : 1;
  parallel_chunks(n_chunks, threads, [&](std::uint64_t c) {
    const std::uint64_t lo = c * chunk_size;
    const std::uint64_t len = std::min<std::uint64_t>(chunk_size, n - lo);
    kernels::normal_fill(out.data() + lo, len, seed, stream, lo);
    for (std::uint64_t i = lo; i < lo + len; ++i) out[i] *= m.sd;
  });
  return out;
}

std::vector<double> sample_heterodyne(const gauss::SqueezedThermalSpecd& spec, double tau,
                                      double lambda_tilde, std::uint64_t n, std::uint64_t seed,
                                      std::uint64_t stream, std::uint64_t chunk_size,
                                      int threads) {
  const auto s0 = gauss::initial_covariance(spec);
  const auto st = gauss::evolve_covariance(s0, tau, lambda_tilde);
  const auto het = fisher::heterodyne_covariance(st);
  // Cholesky factor of the 2x2 outcome covariance
  const double l11 = std::sqrt(het.xx);
  const double l21 = het.xp / l11;
  const double l22 = std::sqrt(het.pp - l21 * l21);

  std::vector<double> out(2 * n);
  const std::uint64_t n_chunks = chunk_size ? (n + chunk_size - 1) / chunk_size : 1;
  parallel_chunks(n_chunks, threads, [&](std::uint64_t c) {
    const std::uint64_t lo = c * chunk_size;
    const std::uint64_t len = std::min<std::uint64_t>(chunk_size, n - lo);
    kernels::normal_fill(out.data() + 2 * lo, 2 * len, seed, stream, 2 * lo);
    for (std::uint64_t i = lo; i < lo + len; ++i) {
      const double z0 = out[2 * i], z1 = out[2 * i + 1];
      out[2 * i] = l11 * z0;
      out[2 * i + 1] = l21 * z0 + l22 * z1;
    }
  });
  return out;
}

namespace {

double mle_homodyne(std::span<const double> outcomes, const HomodyneModel& m) {
  if (!(m.b > 0))
    throw degenerate_error(degeneracy::non_identifiable,
                           "mle_lambda: variance slope is zero, lambda not identifiable");
  const double m2 = kernels::sum_squares(outcomes.data(), outcomes.size()) /
                    static_cast<double>(outcomes.size());
  const double est = (m2 - m.a) / m.b;
  return est > 0 ? est : 0.0;
}

double mle_heterodyne(std::span<const double> outcomes, const gauss::SqueezedThermalSpecd& spec,
                      double tau) {
  const std::size_t n = outcomes.size() / 2;
  const auto mom = kernels::pair_moments(outcomes.data(), n);
  const double nI = 1.0 / static_cast<double>(n);
  const gauss::CovMatrix2d sbar{mom.sxx * nI, mom.sxy * nI, mom.syy * nI};

  const auto s0 = gauss::initial_covariance(spec);
  const auto d = gauss::dcov_dlambda(tau);

  // dl/dlambda ~ Tr(S^-1 D S^-1 Sbar) - Tr(S^-1 D); monotonicity in practice
  // makes bisection on this score robust.
  auto score = [&](double lt) {
    const auto st = gauss::evolve_covariance(s0, tau, lt);
    const auto het = fisher::heterodyne_covariance(st);
    const double det = het.det();
    const gauss::CovMatrix2d inv{het.pp / det, -het.xp / det, het.xx / det};
    // X = inv * D (general 2x2), Y = inv * Sbar
    const double x00 = inv.xx * d.xx + inv.xp * d.xp;
    const double x01 = inv.xx * d.xp + inv.xp * d.pp;
    const double x10 = inv.xp * d.xx + inv.pp * d.xp;
    const double x11 = inv.xp * d.xp + inv.pp * d.pp;
    const double y00 = inv.xx * sbar.xx + inv.xp * sbar.xp;
    const double y01 = inv.xx * sbar.xp + inv.xp * sbar.pp;
    const double y10 = inv.xp * sbar.xx + inv.pp * sbar.xp;
    const double y11 = inv.xp * sbar.xp + inv.pp * sbar.pp;
    const double tr_xy = x00 * y00 + x01 * y10 + x10 * y01 + x11 * y11;
    return tr_xy - (x00 + x11);
  };

  if (score(0.0) <= 0.0) return 0.0;
  double lo = 0.0;
  double hi = std::fmax(1.0, tau > 1 ? 16.0 * sbar.xx / (tau * tau * tau) : sbar.xx);
  while (score(hi) > 0.0) {
    hi *= 2.0;
    if (hi > 1e30) return hi;  // pathological sample; effectively unbounded
  }
  for (int it = 0; it < 200 && (hi - lo) > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (score(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double mle_lambda(std::span<const double> outcomes, const fisher::MeasurementScheme& scheme,
                  const gauss::SqueezedThermalSpecd& spec, double tau) {
  if (outcomes.size() < 2) throw std::invalid_argument("mle_lambda: need at least 2 outcomes");
  if (const auto* hom = std::get_if<fisher::Homodyne>(&scheme)) {
    return mle_homodyne(outcomes, homodyne_model(hom->theta, spec, tau, 0.0));
  }
  if (std::holds_alternative<fisher::Heterodyne>(scheme)) {
    if (outcomes.size() % 2 != 0)
      throw std::invalid_argument("mle_lambda: heterodyne outcomes come in pairs");
    return mle_heterodyne(outcomes, spec, tau);
  }
  throw std::invalid_argument("mle_lambda: no sampling model for this scheme");
}

EstimationReport saturation_study(const ExperimentRun& run, std::size_t n_replicates,
                                  int threads) {
  run.validate();
  if (n_replicates < 2)
    throw std::invalid_argument("saturation_study: need at least 2 replicates");

  std::vector<double> estimates(n_replicates);
  // parallelism across replicates; streams indexed by replicate
  parallel_chunks(n_replicates, threads, [&](std::uint64_t rep) {
    if (const auto* hom = std::get_if<fisher::Homodyne>(&run.scheme)) {
      const auto xs = sample_homodyne(hom->theta, run.state, run.tau, run.true_lambda_tilde,
                                      run.samples, run.seed, rep, run.chunk_size, 1);
      estimates[rep] = mle_lambda(xs, run.scheme, run.state, run.tau);
    } else {
      const auto xs = sample_heterodyne(run.state, run.tau, run.true_lambda_tilde, run.samples,
                                        run.seed, rep, run.chunk_size, 1);
      estimates[rep] = mle_lambda(xs, run.scheme, run.state, run.tau);
    }
  });

  double mean = 0;
  for (double e : estimates) mean += e;
  mean /= static_cast<double>(n_replicates);
  double var = 0;
  for (double e : estimates) var += (e - mean) * (e - mean);
  var /= static_cast<double>(n_replicates - 1);

  double fisher_per_shot = 0;
  if (const auto* hom = std::get_if<fisher::Homodyne>(&run.scheme)) {
    const auto q = fisher::Quadrature<double>::from_angle(hom->theta);
    const double sig = fisher::homodyne_variance(q, run.state, run.tau, run.true_lambda_tilde);
    fisher_per_shot = fisher::gaussian_cfi(sig, fisher::homodyne_variance_slope(q, run.tau));
  } else if (std::holds_alternative<fisher::Heterodyne>(run.scheme)) {
    fisher_per_shot =
        fisher::heterodyne_cfi_dimless(run.state, run.tau, run.true_lambda_tilde);
  } else {
    throw std::invalid_argument("saturation_study: no sampling model for this scheme");
  }

  EstimationReport rep;
  rep.estimate_mean = mean;
  rep.empirical_variance = var;
  rep.crb_at_truth = 1.0 / (static_cast<double>(run.samples) * fisher_per_shot);
  rep.saturation_ratio = var / rep.crb_at_truth;
  rep.ratio_halfwidth =
      kZ975 * std::sqrt(2.0 / static_cast<double>(n_replicates - 1)) * rep.saturation_ratio;
  rep.replicates = n_replicates;
  return rep;
}

}  // namespace qdiff::mc
