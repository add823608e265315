#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <string_view>
#include <utility>
#include <vector>

#include "eglab/rng.hpp"
#include "eglab/step_polynomial.hpp"
#include "eglab/types.hpp"

namespace eglab {

struct SolverConfig {
  double gamma = 0.5;
  long long max_iters = 100;
  double residual_stop = 1e-8;      // stop when ||F(x_k)|| falls below
  double divergence_stop = 1e12;    // stop when ||x_k|| or ||e_k|| exceeds
  long long keep_iterates = 100;    // full vectors kept for the first m steps
};

inline void validate(const SolverConfig& cfg) {
  if (!(cfg.gamma > 0.0))
    throw std::invalid_argument("step size gamma must be positive");
  if (cfg.max_iters < 1)
    throw std::invalid_argument("max_iters must be at least 1");
  if (!(cfg.residual_stop >= 0.0))
    throw std::invalid_argument("residual_stop must be non-negative");
  if (!(cfg.divergence_stop > cfg.residual_stop))
    throw std::invalid_argument("divergence_stop must exceed residual_stop");
  if (cfg.keep_iterates < 0)
    throw std::invalid_argument("keep_iterates must be non-negative");
}

enum class Termination { residual_met, diverged, budget_exhausted };

inline std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::residual_met:
      return "residual_met";
    case Termination::diverged:
      return "diverged";
    case Termination::budget_exhausted:
      return "budget_exhausted";
  }
  return "unknown";
}

/// Recorded extragradient run. Norms are recorded at every iterate; full
/// vectors only for the first keep_iterates steps (divergent runs would
/// otherwise blow up storage, and norms suffice for analysis).
struct Trajectory {
  std::vector<Vector> iterates_x;        // x_0 .. x_min(K, m)
  std::vector<Vector> extrapolations_y;  // y_{k+1} for the recorded steps
  std::vector<double> error_norms;       // ||x_k - x*||; empty without x*
  std::vector<double> residual_norms;    // ||F(x_k)||
  Termination termination = Termination::budget_exhausted;
  bool gamma_outside_theorem_interval = false;  // gamma outside (0, 1)
  bool has_solution_ref = false;

  /// Per-step error ratios ||e_k|| / ||e_{k-1}||; NaN where undefined.
  [[nodiscard]] std::vector<double> step_ratios() const {
    std::vector<double> ratios;
    for (std::size_t k = 1; k < error_norms.size(); ++k)
      ratios.push_back(error_norms[k - 1] > 0.0
                           ? error_norms[k] / error_norms[k - 1]
                           : std::numeric_limits<double>::quiet_NaN());
    return ratios;
  }
};

/// One extragradient step: y = x - gamma F(x), x_next = x - gamma F(y).
/// Returns (y, x_next). Non-finite operator output raises a numeric error
/// carrying the iterate index.
inline std::pair<Vector, Vector> eg_step(const VectorField& field,
                                         const Vector& x, double gamma,
                                         long long iterate_index = 0) {
  if (!(gamma > 0.0))
    throw std::invalid_argument("step size gamma must be positive");
  Vector fx = field(x);
  if (!fx.allFinite()) {
    std::ostringstream msg;
    msg << "numeric overflow: non-finite operator value at iterate "
        << iterate_index;
    throw numeric_error(msg.str());
  }
  Vector y = x - gamma * fx;
  Vector fy = field(y);
  if (!fy.allFinite()) {
    std::ostringstream msg;
    msg << "numeric overflow: non-finite operator value at the extrapolation "
           "point of iterate "
        << iterate_index;
    throw numeric_error(msg.str());
  }
  Vector x_next = x - gamma * fy;
  return {std::move(y), std::move(x_next)};
}

/// Runs the extragradient iteration from x0 until the residual stop, the
/// divergence cutoff, or the iteration budget is hit. If x_star is given it
/// must satisfy ||F(x_star)|| <= 1e-9; error norms are recorded against it.
inline Trajectory run_extragradient(const VectorField& field, const Vector& x0,
                                    const std::optional<Vector>& x_star,
                                    const SolverConfig& cfg) {
  validate(cfg);
  if (x_star) {
    if (x_star->size() != x0.size())
      throw std::invalid_argument("x_star dimension does not match x0");
    const double resid = field(*x_star).norm();
    if (!(resid <= 1e-9)) {
      std::ostringstream msg;
      msg << "x_star is not a solution: ||F(x_star)|| = " << resid
          << " exceeds 1e-9";
      throw std::invalid_argument(msg.str());
    }
  }

  Trajectory traj;
  traj.has_solution_ref = x_star.has_value();
  traj.gamma_outside_theorem_interval = !(cfg.gamma > 0.0 && cfg.gamma < 1.0);

  Vector x = x0;
  long long k = 0;
  for (;;) {
    const Vector fx = field(x);
    if (!fx.allFinite()) {
      traj.termination = Termination::diverged;  // truncated at the last finite iterate
      break;
    }
    const double resid = fx.norm();
    traj.residual_norms.push_back(resid);
    double err = x.norm();
    if (x_star) {
      err = (x - *x_star).norm();
      traj.error_norms.push_back(err);
    }
    if (static_cast<long long>(traj.iterates_x.size()) <= cfg.keep_iterates)
      traj.iterates_x.push_back(x);

    if (resid <= cfg.residual_stop) {
      traj.termination = Termination::residual_met;
      break;
    }
    if (err > cfg.divergence_stop || x.norm() > cfg.divergence_stop) {
      traj.termination = Termination::diverged;
      break;
    }
    if (k == cfg.max_iters) {
      traj.termination = Termination::budget_exhausted;
      break;
    }

    try {
      auto [y, x_next] = eg_step(field, x, cfg.gamma, k);
      if (static_cast<long long>(traj.extrapolations_y.size()) <
          cfg.keep_iterates)
        traj.extrapolations_y.push_back(std::move(y));
      x = std::move(x_next);
    } catch (const numeric_error&) {
      traj.termination = Termination::diverged;
      break;
    }
    ++k;
  }
  return traj;
}

/// Geometric mean of the per-step error ratios, when defined.
inline std::optional<double> geometric_mean_ratio(const Trajectory& traj) {
  double log_sum = 0.0;
  long long count = 0;
  for (std::size_t k = 1; k < traj.error_norms.size(); ++k) {
    if (!(traj.error_norms[k - 1] > 0.0) || !(traj.error_norms[k] > 0.0))
      continue;
    log_sum += std::log(traj.error_norms[k] / traj.error_norms[k - 1]);
    ++count;
  }
  if (count == 0) return std::nullopt;
  return std::exp(log_sum / static_cast<double>(count));
}

struct OneStepBoundReport {
  double fraction_satisfied = 0.0;
  double worst_ratio = 0.0;  // max of ||e_next||^2 / (q ||e||^2)
  long long samples = 0;
};

inline constexpr double kBoundSatisfactionSlack = 1e-12;

/// Samples iterates in a ball around x_star, performs one extragradient
/// step each, and tests the one-step bound ||e_next||^2 <= q(gamma) ||e||^2
/// with q from the step polynomial at (mu, L).
inline OneStepBoundReport one_step_bound_check(const VectorField& field,
                                               const Vector& x_star,
                                               double gamma, double mu,
                                               double lipschitz,
                                               long long n_samples,
                                               double radius,
                                               std::uint64_t seed) {
  if (n_samples < 1) throw std::invalid_argument("need at least one sample");
  if (!(radius > 0.0)) throw std::invalid_argument("radius must be positive");
  const double resid = field(x_star).norm();
  if (!(resid <= 1e-9)) {
    std::ostringstream msg;
    msg << "x_star is not a solution: ||F(x_star)|| = " << resid
        << " exceeds 1e-9";
    throw std::invalid_argument(msg.str());
  }
  const double q = q_of_gamma(mu, lipschitz, gamma);

  std::mt19937_64 gen(seed);
  const int n = static_cast<int>(x_star.size());
  long long satisfied = 0;
  double worst = 0.0;
  for (long long i = 0; i < n_samples; ++i) {
    Vector e;
    do {
      e = uniform_in_ball(n, radius, gen);
    } while (e.norm() < 1e-12);
    const Vector x = x_star + e;
    const auto [y, x_next] = eg_step(field, x, gamma, i);
    const double ratio =
        (x_next - x_star).squaredNorm() / (q * e.squaredNorm());
    if (ratio <= 1.0 + kBoundSatisfactionSlack) ++satisfied;
    worst = std::max(worst, ratio);
  }
  return {static_cast<double>(satisfied) / static_cast<double>(n_samples),
          worst, n_samples};
}

}  // namespace eglab
