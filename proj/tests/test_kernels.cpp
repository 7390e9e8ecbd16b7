#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "oracles.hpp"
#include "qdiff/kernels/kernels.hpp"
#include "qdiff/kernels/normal_detail.hpp"
#include "qdiff/kernels/philox.hpp"

using namespace qdiff;

TEST_CASE("philox: counter determinism and avalanche") {
  const auto a = kernels::philox4x32(0, 0, 42);
  const auto b = kernels::philox4x32(0, 0, 42);
  CHECK(a.x0 == b.x0);
  CHECK(a.x1 == b.x1);
  CHECK(a.x2 == b.x2);
  CHECK(a.x3 == b.x3);
  const auto c = kernels::philox4x32(1, 0, 42);
  CHECK(a.x0 != c.x0);
  const auto d = kernels::philox4x32(0, 1, 42);
  CHECK(a.x0 != d.x0);
  const auto e = kernels::philox4x32(0, 0, 43);
  CHECK(a.x0 != e.x0);
}

TEST_CASE("uniforms are strictly interior") {
  for (std::uint64_t w : {0ull, ~0ull, 1ull << 63, 0x123456789abcdefull}) {
    const double u = kernels::uniform_from_bits(w);
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("inverse normal CDF: round trip against erfc") {
  // Phi(z) computed with std::erfc is an independent oracle
  oracles::Rng rng(61);
  double worst = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double u = kernels::uniform_from_bits(rng.next());
    const double z = kernels::detail::inverse_normal_cdf(u);
    const double phi = 0.5 * std::erfc(-z / std::sqrt(2.0));
    const double denom = std::fmin(u, 1.0 - u);
    worst = std::fmax(worst, std::fabs(phi - u) / denom);
  }
  CHECK(worst < 5e-13);
  CHECK(kernels::detail::inverse_normal_cdf(0.5) == 0.0);
  CHECK(kernels::detail::inverse_normal_cdf(0.975) ==
        doctest::Approx(1.959963984540054).epsilon(1e-13));
}

TEST_CASE("kern_log matches std::log") {
  oracles::Rng rng(62);
  for (int i = 0; i < 20000; ++i) {
    const double x = rng.log_uniform(1e-17, 0.5);
    CHECK(kernels::detail::kern_log(x) == doctest::Approx(std::log(x)).epsilon(2e-15));
  }
}

#ifdef __x86_64__
TEST_CASE("scalar and AVX2 sampling kernels are byte-identical") {
  if (!kernels::avx2_available()) return;
  oracles::Rng rng(63);
  for (int rep = 0; rep < 8; ++rep) {
    const std::size_t n = 1 + rng.next() % 4096;
    const std::uint64_t seed = rng.next(), stream = rng.next() % 7, i0 = rng.next() % 1000;
    std::vector<double> a(n), b(n);
    kernels::normal_fill_scalar(a.data(), n, seed, stream, i0);
    kernels::normal_fill_avx2(b.data(), n, seed, stream, i0);
    CHECK(std::memcmp(a.data(), b.data(), n * sizeof(double)) == 0);
  }
}

TEST_CASE("scalar and AVX2 moment kernels are byte-identical") {
  if (!kernels::avx2_available()) return;
  oracles::Rng rng(64);
  for (int rep = 0; rep < 6; ++rep) {
    const std::size_t n = 1 + rng.next() % 100000;
    std::vector<double> x(n);
    kernels::normal_fill_scalar(x.data(), n, 7, 0, 0);
    const double s = kernels::sum_squares_scalar(x.data(), n);
    const double v = kernels::sum_squares_avx2(x.data(), n);
    CHECK(std::memcmp(&s, &v, sizeof(double)) == 0);

    const std::size_t np = n / 2;
    const auto ms = kernels::pair_moments_scalar(x.data(), np);
    const auto mv = kernels::pair_moments_avx2(x.data(), np);
    CHECK(std::memcmp(&ms.sxx, &mv.sxx, sizeof(double)) == 0);
    CHECK(std::memcmp(&ms.sxy, &mv.sxy, sizeof(double)) == 0);
    CHECK(std::memcmp(&ms.syy, &mv.syy, sizeof(double)) == 0);
  }
}
#endif

TEST_CASE("chunked generation is independent of the chunk boundaries") {
  const std::size_t n = 10000;
  std::vector<double> whole(n), pieces(n);
  kernels::normal_fill(whole.data(), n, 99, 3, 0);
  std::size_t off = 0;
  oracles::Rng rng(65);
  while (off < n) {
    const std::size_t len = std::min<std::size_t>(1 + rng.next() % 777, n - off);
    kernels::normal_fill(pieces.data() + off, len, 99, 3, off);
    off += len;
  }
  CHECK(std::memcmp(whole.data(), pieces.data(), n * sizeof(double)) == 0);
}

TEST_CASE("moment kernels agree with a long-double reference") {
  oracles::Rng rng(66);
  const std::size_t n = 200000;
  std::vector<double> x(n);
  kernels::normal_fill(x.data(), n, 5, 0, 0);
  long double ref = 0;
  for (double v : x) ref += static_cast<long double>(v) * v;
  CHECK(kernels::sum_squares(x.data(), n) ==
        doctest::Approx(static_cast<double>(ref)).epsilon(1e-13));

  long double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t p = 0; p < n / 2; ++p) {
    sxx += static_cast<long double>(x[2 * p]) * x[2 * p];
    sxy += static_cast<long double>(x[2 * p]) * x[2 * p + 1];
    syy += static_cast<long double>(x[2 * p + 1]) * x[2 * p + 1];
  }
  const auto m = kernels::pair_moments(x.data(), n / 2);
  CHECK(m.sxx == doctest::Approx(static_cast<double>(sxx)).epsilon(1e-12));
  CHECK(m.sxy == doctest::Approx(static_cast<double>(sxy)).scale(std::fabs(double(sxx))).epsilon(1e-12));
  CHECK(m.syy == doctest::Approx(static_cast<double>(syy)).epsilon(1e-12));
}

TEST_CASE("sampled deviates look standard normal") {
  const std::size_t n = 1000000;
  std::vector<double> x(n);
  kernels::normal_fill(x.data(), n, 2024, 0, 0);
  double mean = 0;
  for (double v : x) mean += v;
  mean /= n;
  const double m2 = kernels::sum_squares(x.data(), n) / n;
  CHECK(std::fabs(mean) < 5.0 / std::sqrt(double(n)));
  CHECK(std::fabs(m2 - 1.0) < 5.0 * std::sqrt(2.0 / double(n)));
}
