#pragma once

#include <complex>
#include <functional>
#include <stdexcept>

#include <Eigen/Dense>

namespace eglab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Complex = std::complex<double>;

/// Black-box operator F : R^n -> R^n. Implementations must be pure
/// (same input, same output) so trajectories are reproducible.
using VectorField = std::function<Vector(const Vector&)>;

/// A dense decomposition failed to converge or an iteration produced
/// non-finite values. Raised explicitly, never reported as a silent NaN.
class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An experiment configuration is malformed or inconsistent.
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace eglab
