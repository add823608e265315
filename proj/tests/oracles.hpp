#pragma once

// Independent numerical oracles used only by the test suites. These
// deliberately avoid the library's decomposition paths: eigenvalues come
// from the characteristic polynomial (Faddeev-LeVerrier coefficients +
// Durand-Kerner root finding), inverses from Gauss-Jordan elimination.

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "eglab/linear_operator.hpp"
#include "eglab/rng.hpp"
#include "eglab/types.hpp"

namespace oracles {

using eglab::Complex;
using eglab::Matrix;
using eglab::Vector;

/// Monic characteristic polynomial coefficients c[0..n-1] with
/// p(x) = x^n + c[0] x^{n-1} + ... + c[n-1], by Faddeev-LeVerrier.
inline std::vector<double> characteristic_polynomial(const Matrix& a) {
  const int n = static_cast<int>(a.rows());
  std::vector<double> c(n);
  Matrix m = a;
  c[0] = -m.trace();
  for (int k = 2; k <= n; ++k) {
    m = a * (m + c[k - 2] * Matrix::Identity(n, n));
    c[k - 1] = -m.trace() / k;
  }
  return c;
}

/// All complex roots of the monic polynomial above, by Durand-Kerner.
inline std::vector<Complex> polynomial_roots(const std::vector<double>& c) {
  const int n = static_cast<int>(c.size());
  const auto eval = [&](Complex z) {
    Complex p(1.0, 0.0);
    for (int i = 0; i < n; ++i) p = p * z + Complex(c[i]);
    return p;
  };
  std::vector<Complex> z(n);
  const Complex seed(0.4, 0.9);
  Complex w(1.0, 0.0);
  for (int i = 0; i < n; ++i) {
    w *= seed;
    z[i] = w;
  }
  for (int iter = 0; iter < 2000; ++iter) {
    double max_step = 0.0;
    for (int i = 0; i < n; ++i) {
      Complex denom(1.0, 0.0);
      for (int j = 0; j < n; ++j)
        if (j != i) denom *= z[i] - z[j];
      const Complex step = eval(z[i]) / denom;
      z[i] -= step;
      max_step = std::max(max_step, std::abs(step));
    }
    if (max_step < 1e-14) break;
  }
  return z;
}

inline std::vector<Complex> eigenvalues_via_charpoly(const Matrix& a) {
  return polynomial_roots(characteristic_polynomial(a));
}

/// Dense inverse by Gauss-Jordan elimination with partial pivoting.
inline Matrix invert_gauss_jordan(Matrix a) {
  const int n = static_cast<int>(a.rows());
  Matrix inv = Matrix::Identity(n, n);
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    if (a(pivot, col) == 0.0)
      throw std::invalid_argument("matrix is singular");
    a.row(col).swap(a.row(pivot));
    inv.row(col).swap(inv.row(pivot));
    const double d = a(col, col);
    a.row(col) /= d;
    inv.row(col) /= d;
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a(r, col);
      if (f == 0.0) continue;
      a.row(r) -= f * a.row(col);
      inv.row(r) -= f * inv.row(col);
    }
  }
  return inv;
}

/// Plain bisection; requires opposite signs at the bracket ends.
inline double bisect(const std::function<double(double)>& f, double lo,
                     double hi, double tol) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (!(flo * fhi < 0.0))
    throw std::invalid_argument("bisect: bracket does not change sign");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Conjugate-closed random spectrum with |Re| <= 2, |Im| <= 2.
inline eglab::Spectrum random_spectrum(int n, std::mt19937_64& gen) {
  eglab::Spectrum s;
  int remaining = n;
  while (remaining > 0) {
    if (remaining == 1 || eglab::uniform01(gen) < 0.5) {
      s.eigenvalues.emplace_back(eglab::uniform_in(gen, -2.0, 2.0), 0.0);
      remaining -= 1;
    } else {
      const double re = eglab::uniform_in(gen, -2.0, 2.0);
      const double im = eglab::uniform_in(gen, 0.05, 2.0);
      s.eigenvalues.emplace_back(re, im);
      s.eigenvalues.emplace_back(re, -im);
      remaining -= 2;
    }
  }
  return s;
}

/// Random dense matrix with entries uniform in [-scale, scale].
inline Matrix random_matrix(int n, double scale, std::mt19937_64& gen) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      m(i, j) = eglab::uniform_in(gen, -scale, scale);
  return m;
}

/// Upper bound on the positive roots of the cubic P(g)/g given P's
/// ascending coefficients (Cauchy bound on the leading nonzero term).
inline double cauchy_root_bound(const std::array<double, 4>& ascending) {
  int lead = -1;
  for (int i = 3; i >= 0; --i) {
    if (std::abs(ascending[i]) > 1e-14) {
      lead = i;
      break;
    }
  }
  if (lead <= 0) return 1.0;  // constant or identically zero: any bound works
  double max_ratio = 0.0;
  for (int i = 0; i < lead; ++i)
    max_ratio = std::max(max_ratio,
                         std::abs(ascending[i] / ascending[lead]));
  return 1.0 + max_ratio;
}

}  // namespace oracles
