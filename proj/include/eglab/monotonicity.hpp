#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>

#include "eglab/linear_operator.hpp"
#include "eglab/rng.hpp"

namespace eglab {

// Certification of the monotonicity class and its constants: exact for
// linear operators (via the symmetric part and singular values), sampled
// for black-box operators.

inline constexpr double kMonotoneTol = 1e-12;    // verdict on min sym eigenvalue
inline constexpr double kInvertibleTol = 1e-12;  // min singular value floor
inline constexpr double kCertifyTol = 1e-9;

struct ClassReport {
  bool monotone = false;
  double hypo_modulus = 0.0;  // mu >= 0
  double lipschitz = 0.0;     // L >= 0
  std::optional<double> cohypo_modulus;  // present iff the operator is invertible
  double min_sym_eigenvalue = 0.0;
};

/// Hypomonotonicity modulus of the inverse operator,
/// max(0, -lambda_min(sym(A^{-1}))). Requires A invertible.
inline double cohypo_modulus(const LinearOperator& op) {
  if (op.min_singular_value() <= kInvertibleTol) {
    std::ostringstream msg;
    msg << "operator is numerically singular (min singular value "
        << op.min_singular_value()
        << "); cohypomonotonicity modulus undefined";
    throw std::invalid_argument(msg.str());
  }
  const int n = op.dimension();
  const Matrix inverse =
      op.entries().partialPivLu().solve(Matrix::Identity(n, n));
  Eigen::SelfAdjointEigenSolver<Matrix> sym(
      0.5 * (inverse + inverse.transpose()));
  if (sym.info() != Eigen::Success)
    throw numeric_error("inverse symmetric-part decomposition did not converge");
  return std::max(0.0, -sym.eigenvalues()(0));
}

inline ClassReport classify_linear(const LinearOperator& op) {
  ClassReport report;
  report.min_sym_eigenvalue = op.min_symmetric_eigenvalue();
  report.monotone = report.min_sym_eigenvalue >= -kMonotoneTol;
  report.hypo_modulus = std::max(0.0, -report.min_sym_eigenvalue);
  report.lipschitz = op.operator_norm();
  if (op.min_singular_value() > kInvertibleTol)
    report.cohypo_modulus = cohypo_modulus(op);

  if (op.is_normal()) {
    // Spectral cross-check: for a normal operator the smallest symmetric-part
    // eigenvalue equals the smallest real part of the spectrum.
    const double min_re = op.min_real_eigenvalue_part();
    if (std::abs(min_re - report.min_sym_eigenvalue) > 1e-9) {
      std::ostringstream msg;
      msg << "spectral cross-check failed on a normal operator: min Re(lambda) = "
          << min_re << " vs min sym eigenvalue = " << report.min_sym_eigenvalue;
      throw numeric_error(msg.str());
    }
  }
  return report;
}

struct EmpiricalCertificate {
  long long samples = 0;
  double min_quotient = std::numeric_limits<double>::infinity();
  bool violation_found = false;
};

/// Samples pairs (x, y) uniformly in the ball of the given radius and
/// reports the smallest hypomonotonicity quotient
/// <F(x) - F(y), x - y> / ||x - y||^2 together with whether it undercuts
/// -claimed_mu beyond tolerance. Deterministic per seed. Pairs closer than
/// 1e-12 are resampled.
inline EmpiricalCertificate certify_empirical(const VectorField& field,
                                              int dimension, double claimed_mu,
                                              long long n_pairs, double radius,
                                              std::uint64_t seed) {
  if (dimension < 1) throw std::invalid_argument("dimension must be positive");
  if (!(claimed_mu >= 0.0))
    throw std::invalid_argument("claimed modulus must be non-negative");
  if (n_pairs < 1) throw std::invalid_argument("need at least one sample pair");
  if (!(radius > 0.0)) throw std::invalid_argument("radius must be positive");

  std::mt19937_64 gen(seed);
  EmpiricalCertificate cert;
  cert.samples = n_pairs;
  for (long long i = 0; i < n_pairs; ++i) {
    Vector x, y, d;
    double dist = 0.0;
    do {
      x = uniform_in_ball(dimension, radius, gen);
      y = uniform_in_ball(dimension, radius, gen);
      d = x - y;
      dist = d.norm();
    } while (dist < 1e-12);
    const double quotient = (field(x) - field(y)).dot(d) / (dist * dist);
    cert.min_quotient = std::min(cert.min_quotient, quotient);
  }
  cert.violation_found = cert.min_quotient < -claimed_mu - kCertifyTol;
  return cert;
}

}  // namespace eglab
