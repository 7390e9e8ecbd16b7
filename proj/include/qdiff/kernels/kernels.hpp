#pragma once

#include <cstddef>
#include <cstdint>

namespace qdiff::kernels {

enum class Backend { scalar, avx2 };

bool avx2_available();
Backend active_backend();
void set_backend(Backend b);  // avx2 falls back to scalar when unsupported

/// out[i] = Phi^-1(uniform(seed, stream, index0 + i)) for i in [0, n):
/// standard normal deviates addressed by global sample index. Identical
/// output bytes for both backends and any chunking of the index range.
void normal_fill(double* out, std::size_t n, std::uint64_t seed, std::uint64_t stream,
                 std::uint64_t index0);

/// sum of squares with a fixed 4-lane/blocked-pairwise reduction tree
/// (deterministic, backend-identical).
double sum_squares(const double* x, std::size_t n);

struct PairMoments {
  double sxx = 0;
  double sxy = 0;
  double syy = 0;
};

/// second moments of interleaved pairs (x0,y0,x1,y1,...), same fixed
/// reduction-tree guarantees as sum_squares.
PairMoments pair_moments(const double* xy, std::size_t n_pairs);

// per-backend entry points (exposed for equivalence tests)
void normal_fill_scalar(double* out, std::size_t n, std::uint64_t seed, std::uint64_t stream,
                        std::uint64_t index0);
double sum_squares_scalar(const double* x, std::size_t n);
PairMoments pair_moments_scalar(const double* xy, std::size_t n_pairs);
#ifdef __x86_64__
void normal_fill_avx2(double* out, std::size_t n, std::uint64_t seed, std::uint64_t stream,
                      std::uint64_t index0);
double sum_squares_avx2(const double* x, std::size_t n);
PairMoments pair_moments_avx2(const double* xy, std::size_t n_pairs);
#endif

}  // namespace qdiff::kernels
