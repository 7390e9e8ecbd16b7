#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qdiff/fisher.hpp"
#include "qdiff/gaussian.hpp"

namespace qdiff::mc {

struct ExperimentRun {
  fisher::MeasurementScheme scheme{};
  gauss::SqueezedThermalSpecd state{};
  double tau = 0;
  double true_lambda_tilde = 0;
  std::uint64_t samples = 0;          // nu
  std::uint64_t seed = 0;
  std::uint64_t chunk_size = 1 << 16;

  void validate() const;
};

struct EstimationReport {
  double estimate_mean = 0;       // mean of replicate estimates (lambda_tilde units)
  double empirical_variance = 0;  // across replicates
  double crb_at_truth = 0;        // 1/(nu F) at the true parameter
  double saturation_ratio = 0;    // empirical_variance / crb_at_truth
  double ratio_halfwidth = 0;     // 95% half-width from the chi-square variance law
  std::size_t replicates = 0;
};

/// i.i.d. zero-mean Gaussian homodyne outcomes with the marginal variance of
/// the evolved state; byte-identical for a given (seed, stream) regardless
/// of chunking or thread count.
std::vector<double> sample_homodyne(double theta, const gauss::SqueezedThermalSpecd& spec,
                                    double tau, double lambda_tilde, std::uint64_t n,
                                    std::uint64_t seed, std::uint64_t stream = 0,
                                    std::uint64_t chunk_size = 1 << 16, int threads = 0);

/// Heterodyne outcome pairs, interleaved (x0, y0, x1, y1, ...), drawn from
/// the bivariate Gaussian with covariance sigma(tau) + identity.
std::vector<double> sample_heterodyne(const gauss::SqueezedThermalSpecd& spec, double tau,
                                      double lambda_tilde, std::uint64_t n, std::uint64_t seed,
                                      std::uint64_t stream = 0,
                                      std::uint64_t chunk_size = 1 << 16, int threads = 0);

/// Maximum-likelihood estimate of lambda_tilde, clamped at 0.
/// Homodyne: closed form (m2 - A)/B. Heterodyne outcomes are interleaved
/// pairs; the exact Gaussian likelihood is maximized over lambda_tilde >= 0.
double mle_lambda(std::span<const double> outcomes, const fisher::MeasurementScheme& scheme,
                  const gauss::SqueezedThermalSpecd& spec, double tau);

/// Replicates the experiment and compares the empirical estimator variance
/// with the CRB at the truth.
EstimationReport saturation_study(const ExperimentRun& run, std::size_t n_replicates,
                                  int threads = 0);

/// Thread count resolution: explicit > QDIFF_THREADS > hardware.
int resolve_threads(int requested);

}  // namespace qdiff::mc
