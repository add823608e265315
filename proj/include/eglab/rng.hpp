#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "eglab/types.hpp"

namespace eglab {

// All randomness in the library flows through mt19937_64 streams seeded
// from configuration, with explicit bit-to-double conversion so a fixed
// seed reproduces the same samples on every run.

inline double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

inline double uniform_in(std::mt19937_64& gen, double lo, double hi) {
  return lo + (hi - lo) * uniform01(gen);
}

inline double gaussian(std::mt19937_64& gen) {
  double u = 0.0;
  do {
    u = uniform01(gen);
  } while (u == 0.0);
  const double v = uniform01(gen);
  return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
}

inline Vector gaussian_vector(int n, std::mt19937_64& gen) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = gaussian(gen);
  return v;
}

/// Random orthogonal matrix: QR of a Gaussian matrix with the signs of
/// diag(R) folded into Q, making the factor unique and the draw
/// deterministic per seed.
inline Matrix random_orthogonal(int n, std::mt19937_64& gen) {
  Matrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = gaussian(gen);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

/// Uniform sample from the closed ball of the given radius around the origin.
inline Vector uniform_in_ball(int n, double radius, std::mt19937_64& gen) {
  Vector dir(n);
  double norm = 0.0;
  do {
    dir = gaussian_vector(n, gen);
    norm = dir.norm();
  } while (norm < 1e-300);
  const double u = uniform01(gen);
  return dir * (radius * std::pow(u, 1.0 / n) / norm);
}

}  // namespace eglab
