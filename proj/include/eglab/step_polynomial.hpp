#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eglab/linear_operator.hpp"
#include "eglab/types.hpp"

namespace eglab {

// Step-size analysis for the one-step error bound of the extragradient
// iteration on a mu-hypomonotone, L-Lipschitz operator. The bound
// multiplier is the quartic
//
//   q(g) = 1 + 2 g mu + (4 mu^2 - L^2) g^2 + 2 mu L^2 g^3 + L^4 g^4
//
// and P(g) = q(g) - 1 is the shifted form whose positive roots separate
// the step sizes where the bound certifies contraction (q < 1) from those
// where it cannot.

inline constexpr double kCoefficientZeroTol = 1e-14;
inline constexpr int kRootScanPoints = 10000;
inline constexpr double kRootBisectTol = 1e-10;
inline constexpr double kTangentialTol = 1e-8;

namespace detail {
inline void require_constants(double mu, double lipschitz) {
  if (!(mu >= 0.0)) throw std::invalid_argument("mu must be non-negative");
  if (!(lipschitz >= 0.0))
    throw std::invalid_argument("Lipschitz constant must be non-negative");
}
inline int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }
}  // namespace detail

/// Coefficients of P(g) = q(g) - 1 in ascending degree (degrees 1..4).
inline std::array<double, 4> p_coefficients(double mu, double lipschitz) {
  detail::require_constants(mu, lipschitz);
  const double l2 = lipschitz * lipschitz;
  return {2.0 * mu, 4.0 * mu * mu - l2, 2.0 * mu * l2, l2 * l2};
}

struct StepPolynomial {
  double mu = 0.0;
  double lipschitz = 0.0;
  std::array<double, 5> q_coeffs{};  // ascending degree, q_coeffs[0] == 1
  std::array<double, 4> p_coeffs{};  // ascending degrees 1..4
};

inline StepPolynomial step_polynomial(double mu, double lipschitz) {
  StepPolynomial p;
  p.mu = mu;
  p.lipschitz = lipschitz;
  p.p_coeffs = p_coefficients(mu, lipschitz);
  p.q_coeffs = {1.0, p.p_coeffs[0], p.p_coeffs[1], p.p_coeffs[2], p.p_coeffs[3]};
  return p;
}

inline double p_of_gamma(double mu, double lipschitz, double gamma) {
  if (!(gamma >= 0.0))
    throw std::invalid_argument("gamma must be non-negative");
  const auto a = p_coefficients(mu, lipschitz);
  return gamma * (a[0] + gamma * (a[1] + gamma * (a[2] + gamma * a[3])));
}

/// Horner evaluation of the bound multiplier q.
inline double q_of_gamma(double mu, double lipschitz, double gamma) {
  return 1.0 + p_of_gamma(mu, lipschitz, gamma);
}

/// Number of strict sign alternations between consecutive nonzero
/// coefficients (given in descending degree). Coefficients within
/// kCoefficientZeroTol of zero are skipped: 4 mu^2 - L^2 can be an exact
/// analytic zero contaminated by rounding.
inline int descartes_sign_changes(std::span<const double> coeffs) {
  int changes = 0;
  int prev = 0;
  for (double c : coeffs) {
    if (std::abs(c) <= kCoefficientZeroTol) continue;
    const int s = c > 0.0 ? 1 : -1;
    if (prev != 0 && s != prev) ++changes;
    prev = s;
  }
  return changes;
}

/// Largest circle radius on which the triangle-inequality majorant of
/// |g| = |P - 2 mu gamma| stays below min |f| = 2 mu r, found by bisecting
///   (4 mu^2 + L^2) r + 2 mu L^2 r^2 + L^4 r^3 = 2 mu
/// to 1e-10. Returns the inner end of the final bracket so the sampled
/// comparison below stays strict even when the majorant is tight (L = 0).
inline double rouche_radius(double mu, double lipschitz) {
  if (!(mu > 0.0))
    throw std::invalid_argument(
        "f identically zero; Rouché comparison undefined");
  detail::require_constants(mu, lipschitz);
  const double l2 = lipschitz * lipschitz;
  const auto majorant_over_r = [&](double r) {
    return (4.0 * mu * mu + l2) * r + 2.0 * mu * l2 * r * r +
           l2 * l2 * r * r * r;
  };

  double hi = 1.0;
  while (majorant_over_r(hi) < 2.0 * mu) hi *= 2.0;
  double lo = 0.0;
  while (hi - lo > kRootBisectTol) {
    const double mid = 0.5 * (lo + hi);
    (majorant_over_r(mid) < 2.0 * mu ? lo : hi) = mid;
  }
  const double r = lo;

  // Sampled verification on the circle |z| = r.
  const auto a = p_coefficients(mu, lipschitz);
  double max_g = 0.0;
  for (int k = 0; k < 360; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / 360.0;
    const Complex z = std::polar(r, theta);
    const Complex g =
        ((Complex(a[3]) * z + Complex(a[2])) * z + Complex(a[1])) * z * z;
    max_g = std::max(max_g, std::abs(g));
  }
  if (!(max_g < 2.0 * mu * r))
    throw numeric_error(
        "Rouché verification failed: |g| not strictly below |f| on the circle");
  return r;
}

/// A strict sign-change root of P with the final bisection bracket; P has
/// opposite signs at the bracket ends.
struct PositiveRoot {
  double value = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
};

/// Near-zero local minimum of |P| that does not cross zero (tangency
/// candidate); reported separately from strict roots.
struct TangentialCandidate {
  double gamma = 0.0;
  double p_value = 0.0;
};

struct RootScan {
  std::vector<PositiveRoot> roots;
  std::vector<TangentialCandidate> tangential;
};

namespace detail {

inline PositiveRoot bisect_root(double mu, double lipschitz, double lo,
                                double hi, double flo, double fhi) {
  // precondition: sign(flo) != sign(fhi), both nonzero
  double blo = lo, bhi = hi;
  const int slo = sign_of(flo);
  (void)fhi;
  while (bhi - blo > kRootBisectTol) {
    const double mid = 0.5 * (blo + bhi);
    const double fm = p_of_gamma(mu, lipschitz, mid);
    if (fm == 0.0) return {mid, blo, bhi};  // exact hit; bracket still strict
    if (sign_of(fm) == slo)
      blo = mid;
    else
      bhi = mid;
  }
  return {0.5 * (blo + bhi), blo, bhi};
}

inline double p_derivative(double mu, double lipschitz, double gamma) {
  const auto a = p_coefficients(mu, lipschitz);
  return a[0] + gamma * (2.0 * a[1] + gamma * (3.0 * a[2] + gamma * 4.0 * a[3]));
}

}  // namespace detail

/// Scans (0, gamma_max] on a 10^4-point grid and isolates every strict
/// sign-change root of P by bisection. Grid-exact zeros are classified by
/// their neighbours' signs; non-crossing near-zero minima of |P| are
/// returned as tangential candidates.
inline RootScan scan_positive_roots(double mu, double lipschitz,
                                    double gamma_max) {
  if (!(gamma_max > 0.0))
    throw std::invalid_argument("gamma_max must be positive");
  RootScan out;
  const auto a = p_coefficients(mu, lipschitz);

  int sign_near_zero = 0;  // sign of P just right of 0
  for (double c : a) {
    if (std::abs(c) > kCoefficientZeroTol) {
      sign_near_zero = detail::sign_of(c);
      break;
    }
  }
  if (sign_near_zero == 0) return out;  // P vanishes identically

  const int n = kRootScanPoints;
  std::vector<double> gs(n), ps(n);
  for (int i = 1; i <= n; ++i) {
    gs[i - 1] = gamma_max * (static_cast<double>(i) / n);
    ps[i - 1] = p_of_gamma(mu, lipschitz, gs[i - 1]);
  }

  // A root may sit between 0 and the first grid point; walk down by halving
  // until P recovers its sign at 0+.
  if (const int s0 = detail::sign_of(ps[0]);
      s0 != 0 && s0 != sign_near_zero) {
    double cand = gs[0];
    for (int halvings = 0; halvings < 2000; ++halvings) {
      cand *= 0.5;
      if (cand < 1e-300) break;
      const double f = p_of_gamma(mu, lipschitz, cand);
      if (detail::sign_of(f) == sign_near_zero) {
        out.roots.push_back(
            detail::bisect_root(mu, lipschitz, cand, gs[0], f, ps[0]));
        break;
      }
    }
  }

  int i = 0;
  while (i < n) {
    if (ps[i] == 0.0) {
      int left = i - 1;
      while (left >= 0 && ps[left] == 0.0) --left;
      double lo_end;
      int sl;
      if (left >= 0) {
        lo_end = gs[left];
        sl = detail::sign_of(ps[left]);
      } else {
        lo_end = 0.5 * gs[i];
        sl = detail::sign_of(p_of_gamma(mu, lipschitz, lo_end));
      }
      int right = i + 1;
      while (right < n && ps[right] == 0.0) ++right;
      double hi_end;
      int sr;
      if (right < n) {
        hi_end = gs[right];
        sr = detail::sign_of(ps[right]);
      } else {
        hi_end = gamma_max * (1.0 + 1e-6);  // evaluate just beyond the range
        sr = detail::sign_of(p_of_gamma(mu, lipschitz, hi_end));
      }
      if (sl != 0 && sr != 0 && sl != sr)
        out.roots.push_back({gs[i], lo_end, hi_end});
      else
        out.tangential.push_back({gs[i], 0.0});
      i = right;
      continue;
    }
    if (i + 1 < n && ps[i + 1] != 0.0 &&
        detail::sign_of(ps[i]) != detail::sign_of(ps[i + 1])) {
      out.roots.push_back(
          detail::bisect_root(mu, lipschitz, gs[i], gs[i + 1], ps[i], ps[i + 1]));
    }
    ++i;
  }

  // Non-crossing tangency candidates: near-zero local minima of |P|.
  for (int j = 1; j + 1 < n; ++j) {
    if (ps[j] == 0.0 || std::abs(ps[j]) >= kTangentialTol) continue;
    if (!(std::abs(ps[j]) <= std::abs(ps[j - 1]) &&
          std::abs(ps[j]) <= std::abs(ps[j + 1])))
      continue;
    if (detail::sign_of(ps[j - 1]) != detail::sign_of(ps[j]) ||
        detail::sign_of(ps[j + 1]) != detail::sign_of(ps[j]))
      continue;  // crossing; handled by the bisection above
    double gamma_star = gs[j];
    const double dl = detail::p_derivative(mu, lipschitz, gs[j - 1]);
    const double dr = detail::p_derivative(mu, lipschitz, gs[j + 1]);
    if (detail::sign_of(dl) != 0 && detail::sign_of(dr) != 0 &&
        detail::sign_of(dl) != detail::sign_of(dr)) {
      double blo = gs[j - 1], bhi = gs[j + 1];
      const int sd = detail::sign_of(dl);
      while (bhi - blo > kRootBisectTol) {
        const double mid = 0.5 * (blo + bhi);
        const double dm = detail::p_derivative(mu, lipschitz, mid);
        if (dm == 0.0) {
          blo = bhi = mid;
          break;
        }
        (detail::sign_of(dm) == sd ? blo : bhi) = mid;
      }
      gamma_star = 0.5 * (blo + bhi);
    }
    const double pv = p_of_gamma(mu, lipschitz, gamma_star);
    if (std::abs(pv) < kTangentialTol)
      out.tangential.push_back({gamma_star, pv});
  }

  return out;
}

/// Strict sign-change roots of P in (0, gamma_max], ascending.
inline std::vector<double> positive_roots(double mu, double lipschitz,
                                          double gamma_max) {
  std::vector<double> values;
  for (const auto& r : scan_positive_roots(mu, lipschitz, gamma_max).roots)
    values.push_back(r.value);
  return values;
}

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct StepAnalysis {
  double mu = 0.0;
  double lipschitz = 0.0;
  double gamma_max = 0.0;
  int sign_changes = 0;  // on [a4, a3, a2, a1], descending degree
  std::vector<PositiveRoot> roots;
  std::vector<TangentialCandidate> tangential;
  std::optional<double> rouche;  // absent when mu == 0
  std::string rouche_note;       // reason when absent
  std::vector<Interval> contractive;  // q < 1 strictly inside each interval
};

inline StepAnalysis analyze_step_sizes(double mu, double lipschitz,
                                       double gamma_max) {
  StepAnalysis analysis;
  analysis.mu = mu;
  analysis.lipschitz = lipschitz;
  analysis.gamma_max = gamma_max;

  const auto a = p_coefficients(mu, lipschitz);
  const std::array<double, 4> descending{a[3], a[2], a[1], a[0]};
  analysis.sign_changes = descartes_sign_changes(descending);

  RootScan scan = scan_positive_roots(mu, lipschitz, gamma_max);
  analysis.roots = std::move(scan.roots);
  analysis.tangential = std::move(scan.tangential);

  if (mu > 0.0)
    analysis.rouche = rouche_radius(mu, lipschitz);
  else
    analysis.rouche_note = "f identically zero; Rouché comparison undefined";

  std::vector<double> breakpoints{0.0};
  for (const auto& r : analysis.roots)
    if (r.value < gamma_max) breakpoints.push_back(r.value);
  breakpoints.push_back(gamma_max);
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (breakpoints[i + 1] - breakpoints[i] <= 1e-12) continue;
    const double mid = 0.5 * (breakpoints[i] + breakpoints[i + 1]);
    if (q_of_gamma(mu, lipschitz, mid) < 1.0)
      analysis.contractive.push_back({breakpoints[i], breakpoints[i + 1]});
  }
  return analysis;
}

/// Exact one-step factor of the extragradient map x -> (I - gA + g^2 A^2) x
/// on the eigenspace of eigenvalue lambda: |1 - g lambda + g^2 lambda^2|.
inline double eg_amplification(Complex lambda, double gamma) {
  if (!(gamma >= 0.0))
    throw std::invalid_argument("gamma must be non-negative");
  const Complex gl = gamma * lambda;
  return std::abs(1.0 - gl + gl * gl);
}

/// Max amplification over the operator's spectrum; for normal operators this
/// is the exact worst-case per-step error growth factor.
inline double eg_spectral_radius(const LinearOperator& op, double gamma) {
  double worst = 0.0;
  for (const Complex& lam : op.eigenvalues())
    worst = std::max(worst, eg_amplification(lam, gamma));
  return worst;
}

struct SweepRow {
  double gamma = 0.0;
  double q = 0.0;
  double p = 0.0;
  bool contractive = false;
  double amp_witness = 0.0;  // amplification at lambda = -mu
};

inline std::vector<SweepRow> gamma_sweep(double mu, double lipschitz,
                                         std::span<const double> grid) {
  std::vector<SweepRow> rows;
  rows.reserve(grid.size());
  for (double g : grid) {
    if (!(g > 0.0))
      throw std::invalid_argument("gamma grid values must be positive");
    SweepRow row;
    row.gamma = g;
    row.p = p_of_gamma(mu, lipschitz, g);
    row.q = 1.0 + row.p;
    row.contractive = row.q < 1.0;
    row.amp_witness = eg_amplification(Complex(-mu, 0.0), g);
    rows.push_back(row);
  }
  return rows;
}

/// Grid of `points` step sizes: gamma_max * i / points, i = 1..points.
inline std::vector<double> uniform_grid(double gamma_max, int points) {
  if (!(gamma_max > 0.0) || points < 1)
    throw std::invalid_argument("grid requires gamma_max > 0 and points >= 1");
  std::vector<double> grid(points);
  for (int i = 1; i <= points; ++i)
    grid[i - 1] = gamma_max * (static_cast<double>(i) / points);
  return grid;
}

}  // namespace eglab
