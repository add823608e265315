#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <utility>
#include <vector>

#include "eglab/rng.hpp"
#include "eglab/types.hpp"

namespace eglab {

/// Prescribed eigenvalue multiset for operator construction. A real matrix
/// realizing it exists iff the set is closed under complex conjugation.
struct Spectrum {
  std::vector<Complex> eigenvalues;

  [[nodiscard]] int size() const { return static_cast<int>(eigenvalues.size()); }
};

/// Greedy nearest-match multiset comparison of two eigenvalue lists.
/// Ordering of either list is irrelevant (decompositions do not promise one).
inline bool spectra_match(const std::vector<Complex>& a,
                          const std::vector<Complex>& b, double tol) {
  if (a.size() != b.size()) return false;
  std::vector<bool> used(b.size(), false);
  for (const Complex& x : a) {
    int best = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(x - b[j]);
      if (d < best_dist) {
        best_dist = d;
        best = static_cast<int>(j);
      }
    }
    if (best < 0 || best_dist > tol) return false;
    used[static_cast<std::size_t>(best)] = true;
  }
  return true;
}

/// Dense real square operator F(x) = A x with cached spectral data.
/// Immutable after construction and safe to share across threads.
/// All decompositions are dense; the dimension is capped at desk scale.
class LinearOperator {
 public:
  static constexpr int kMaxDimension = 64;

  explicit LinearOperator(Matrix entries,
                          std::optional<std::uint64_t> seed = std::nullopt)
      : entries_(std::move(entries)), seed_(seed) {
    if (entries_.rows() != entries_.cols())
      throw std::invalid_argument("operator matrix must be square");
    if (entries_.rows() < 1 || entries_.rows() > kMaxDimension) {
      std::ostringstream msg;
      msg << "operator dimension " << entries_.rows() << " outside [1, "
          << kMaxDimension << "]";
      throw std::invalid_argument(msg.str());
    }
    decompose();
  }

  [[nodiscard]] int dimension() const { return n_; }
  [[nodiscard]] const Matrix& entries() const { return entries_; }
  [[nodiscard]] std::optional<std::uint64_t> seed() const { return seed_; }

  /// Exact matrix-vector product A x.
  [[nodiscard]] Vector apply(const Vector& x) const {
    if (x.size() != n_) {
      std::ostringstream msg;
      msg << "dimension mismatch: operator is " << n_ << "x" << n_
          << " but vector has length " << x.size();
      throw std::invalid_argument(msg.str());
    }
    return entries_ * x;
  }

  [[nodiscard]] Matrix symmetric_part() const {
    return 0.5 * (entries_ + entries_.transpose());
  }

  [[nodiscard]] const std::vector<Complex>& eigenvalues() const {
    return eigenvalues_;
  }

  /// Eigenvalues of (A + A^T)/2, ascending.
  [[nodiscard]] const std::vector<double>& symmetric_part_eigenvalues() const {
    return sym_eigenvalues_;
  }

  [[nodiscard]] double min_symmetric_eigenvalue() const {
    return sym_eigenvalues_.front();
  }

  [[nodiscard]] double min_real_eigenvalue_part() const {
    double m = std::numeric_limits<double>::infinity();
    for (const Complex& lam : eigenvalues_) m = std::min(m, lam.real());
    return m;
  }

  /// Largest singular value; the Lipschitz constant of x -> A x.
  [[nodiscard]] double operator_norm() const { return sigma_max_; }
  [[nodiscard]] double min_singular_value() const { return sigma_min_; }

  /// Max-abs entry of A A^T - A^T A; zero exactly for normal matrices.
  [[nodiscard]] double normality_residual() const { return normality_residual_; }
  [[nodiscard]] bool is_normal(double tol = 1e-10) const {
    return normality_residual_ <= tol;
  }

 private:
  void decompose() {
    n_ = static_cast<int>(entries_.rows());

    Eigen::EigenSolver<Matrix> es(entries_, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success)
      throw numeric_error("eigenvalue decomposition did not converge");
    eigenvalues_.reserve(n_);
    for (int i = 0; i < n_; ++i) eigenvalues_.push_back(es.eigenvalues()(i));

    Eigen::SelfAdjointEigenSolver<Matrix> sym(symmetric_part());
    if (sym.info() != Eigen::Success)
      throw numeric_error("symmetric-part eigendecomposition did not converge");
    sym_eigenvalues_.assign(sym.eigenvalues().data(),
                            sym.eigenvalues().data() + n_);

    Eigen::JacobiSVD<Matrix> svd(entries_);
    sigma_max_ = svd.singularValues()(0);
    sigma_min_ = svd.singularValues()(n_ - 1);

    normality_residual_ = (entries_ * entries_.transpose() -
                           entries_.transpose() * entries_)
                              .cwiseAbs()
                              .maxCoeff();
  }

  Matrix entries_;
  int n_ = 0;
  std::vector<Complex> eigenvalues_;
  std::vector<double> sym_eigenvalues_;
  double sigma_max_ = 0.0;
  double sigma_min_ = 0.0;
  double normality_residual_ = 0.0;
  std::optional<std::uint64_t> seed_;
};

/// Builds a real normal matrix with the prescribed spectrum: a block-diagonal
/// core (1x1 blocks for real eigenvalues, 2x2 rotation-scaling blocks
/// [[a, b], [-b, a]] for conjugate pairs a +/- bi) conjugated by a seeded
/// random orthogonal matrix. Deterministic for a fixed seed.
inline LinearOperator make_normal_from_spectrum(const Spectrum& spec,
                                                std::uint64_t seed) {
  const int n = spec.size();
  if (n == 0) throw std::invalid_argument("spectrum must be non-empty");
  if (n > LinearOperator::kMaxDimension) {
    std::ostringstream msg;
    msg << "spectrum size " << n << " exceeds the dimension cap "
        << LinearOperator::kMaxDimension;
    throw std::invalid_argument(msg.str());
  }

  constexpr double kRealTol = 1e-12;  // |Im| below this is a real eigenvalue
  constexpr double kPairTol = 1e-9;   // conjugate-partner matching tolerance

  std::vector<bool> used(n, false);
  Matrix core = Matrix::Zero(n, n);
  int pos = 0;
  for (int i = 0; i < n; ++i) {
    if (used[i]) continue;
    const Complex lam = spec.eigenvalues[static_cast<std::size_t>(i)];
    if (std::abs(lam.imag()) <= kRealTol) {
      used[i] = true;
      core(pos, pos) = lam.real();
      pos += 1;
      continue;
    }
    int partner = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int j = i + 1; j < n; ++j) {
      if (used[j]) continue;
      const double d =
          std::abs(std::conj(lam) - spec.eigenvalues[static_cast<std::size_t>(j)]);
      if (d < best) {
        best = d;
        partner = j;
      }
    }
    if (partner < 0 || best > kPairTol) {
      std::ostringstream msg;
      msg << "spectrum is not closed under complex conjugation: eigenvalue ("
          << lam.real() << (lam.imag() < 0 ? " - " : " + ")
          << std::abs(lam.imag()) << "i) has no conjugate partner";
      throw std::invalid_argument(msg.str());
    }
    used[i] = used[partner] = true;
    const Complex mate = spec.eigenvalues[static_cast<std::size_t>(partner)];
    const double a = 0.5 * (lam.real() + mate.real());
    const double b = 0.5 * (lam.imag() - mate.imag());
    core(pos, pos) = a;
    core(pos, pos + 1) = b;
    core(pos + 1, pos) = -b;
    core(pos + 1, pos + 1) = a;
    pos += 2;
  }

  std::mt19937_64 gen(seed);
  const Matrix q = random_orthogonal(n, gen);
  LinearOperator op(q * core * q.transpose(), seed);

  if (op.normality_residual() > 1e-10)
    throw numeric_error("constructed operator failed the normality check");
  if (!spectra_match(op.eigenvalues(), spec.eigenvalues, 1e-9))
    throw numeric_error(
        "constructed operator's spectrum drifted from the prescription");
  return op;
}

}  // namespace eglab
