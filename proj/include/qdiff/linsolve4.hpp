#pragma once

#include <array>
#include <stdexcept>

#include "qdiff/real.hpp"

namespace qdiff::detail {

/// Dense 4x4 LU factorization with partial pivoting plus a 1-norm condition
/// estimate obtained from the explicit inverse (cheap at this size).
template <Real R>
struct Lu4 {
  std::array<std::array<R, 4>, 4> lu{};
  std::array<int, 4> piv{};
  bool singular = false;

  explicit Lu4(const std::array<std::array<R, 4>, 4>& a) : lu(a) {
    for (int k = 0; k < 4; ++k) {
      int p = k;
      R best = num::fabs(lu[k][k]);
      for (int i = k + 1; i < 4; ++i) {
        R v = num::fabs(lu[i][k]);
        if (v > best) {
          best = v;
          p = i;
        }
      }
      piv[k] = p;
      if (p != k) std::swap(lu[p], lu[k]);
      if (lu[k][k] == R(0)) {
        singular = true;
        return;
      }
      for (int i = k + 1; i < 4; ++i) {
        lu[i][k] /= lu[k][k];
        for (int j = k + 1; j < 4; ++j) lu[i][j] -= lu[i][k] * lu[k][j];
      }
    }
  }

  std::array<R, 4> solve(std::array<R, 4> b) const {
    for (int k = 0; k < 4; ++k)
      if (piv[k] != k) std::swap(b[piv[k]], b[k]);
    for (int i = 1; i < 4; ++i)
      for (int j = 0; j < i; ++j) b[i] -= lu[i][j] * b[j];
    for (int i = 3; i >= 0; --i) {
      for (int j = i + 1; j < 4; ++j) b[i] -= lu[i][j] * b[j];
      b[i] /= lu[i][i];
    }
    return b;
  }
};

template <Real R>
R norm1(const std::array<std::array<R, 4>, 4>& a) {
  R best = 0;
  for (int j = 0; j < 4; ++j) {
    R s = 0;
    for (int i = 0; i < 4; ++i) s += num::fabs(a[i][j]);
    if (s > best) best = s;
  }
  return best;
}

/// ||A||_1 * ||A^-1||_1 via four unit-vector solves.
template <Real R>
R cond1(const std::array<std::array<R, 4>, 4>& a, const Lu4<R>& f) {
  std::array<std::array<R, 4>, 4> inv{};
  for (int j = 0; j < 4; ++j) {
    std::array<R, 4> e{};
    e[j] = R(1);
    auto x = f.solve(e);
    for (int i = 0; i < 4; ++i) inv[i][j] = x[i];
  }
  return norm1(a) * norm1(inv);
}

}  // namespace qdiff::detail
