#include <atomic>

#include "qdiff/kernels/kernels.hpp"

namespace qdiff::kernels {

namespace {

Backend detect() {
#ifdef __x86_64__
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return Backend::avx2;
#endif
  return Backend::scalar;
}

std::atomic<Backend> g_backend{detect()};

}  // namespace

bool avx2_available() {
#ifdef __x86_64__
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend active_backend() { return g_backend.load(std::memory_order_relaxed); }

void set_backend(Backend b) {
  if (b == Backend::avx2 && !avx2_available()) b = Backend::scalar;
  g_backend.store(b, std::memory_order_relaxed);
}

void normal_fill(double* out, std::size_t n, std::uint64_t seed, std::uint64_t stream,
                 std::uint64_t index0) {
#ifdef __x86_64__
  if (active_backend() == Backend::avx2)
    return normal_fill_avx2(out, n, seed, stream, index0);
#endif
  normal_fill_scalar(out, n, seed, stream, index0);
}

double sum_squares(const double* x, std::size_t n) {
#ifdef __x86_64__
  if (active_backend() == Backend::avx2) return sum_squares_avx2(x, n);
#endif
  return sum_squares_scalar(x, n);
}

PairMoments pair_moments(const double* xy, std::size_t n_pairs) {
#ifdef __x86_64__
  if (active_backend() == Backend::avx2) return pair_moments_avx2(xy, n_pairs);
#endif
  return pair_moments_scalar(xy, n_pairs);
}

}  // namespace qdiff::kernels
