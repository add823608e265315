#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "eglab/extragradient.hpp"
#include "eglab/step_polynomial.hpp"

namespace eglab::csv {

// CSV bodies are deterministic: '.' decimal separator, no locale, full
// 17-significant-digit floats, so re-running a command reproduces them
// byte for byte.

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Columns: iter, err_norm, resid_norm, ratio (err[k]/err[k-1], empty for
/// k = 0 or when undefined).
inline void write_trajectory(std::ostream& os, const Trajectory& traj) {
  os << "iter,err_norm,resid_norm,ratio\n";
  const auto ratios = traj.step_ratios();
  for (std::size_t k = 0; k < traj.residual_norms.size(); ++k) {
    os << k << ',';
    if (k < traj.error_norms.size()) os << format_double(traj.error_norms[k]);
    os << ',' << format_double(traj.residual_norms[k]) << ',';
    if (k >= 1 && k - 1 < ratios.size() && std::isfinite(ratios[k - 1]))
      os << format_double(ratios[k - 1]);
    os << '\n';
  }
}

inline void write_sweep(std::ostream& os, std::span<const SweepRow> rows) {
  os << "gamma,q,P,contractive,amp_witness\n";
  for (const SweepRow& r : rows) {
    os << format_double(r.gamma) << ',' << format_double(r.q) << ','
       << format_double(r.p) << ',' << (r.contractive ? 1 : 0) << ','
       << format_double(r.amp_witness) << '\n';
  }
}

struct TrajectoryRow {
  long long iter = 0;
  std::optional<double> err_norm;
  std::optional<double> resid_norm;
  std::optional<double> ratio;
};

namespace detail {
inline std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}
inline std::optional<double> parse_field(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return std::strtod(s.c_str(), nullptr);
}
}  // namespace detail

inline std::vector<TrajectoryRow> parse_trajectory(std::istream& is) {
  std::vector<TrajectoryRow> rows;
  std::string line;
  bool header = true;
  while (std::getline(is, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    const auto fields = detail::split_line(line);
    if (fields.size() != 4)
      throw std::invalid_argument("trajectory CSV row must have 4 fields");
    TrajectoryRow row;
    row.iter = std::atoll(fields[0].c_str());
    row.err_norm = detail::parse_field(fields[1]);
    row.resid_norm = detail::parse_field(fields[2]);
    row.ratio = detail::parse_field(fields[3]);
    rows.push_back(row);
  }
  return rows;
}

struct SweepCsvRow {
  double gamma = 0.0;
  double q = 0.0;
  double p = 0.0;
  bool contractive = false;
  double amp_witness = 0.0;
};

inline std::vector<SweepCsvRow> parse_sweep(std::istream& is) {
  std::vector<SweepCsvRow> rows;
  std::string line;
  bool header = true;
  while (std::getline(is, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    const auto fields = detail::split_line(line);
    if (fields.size() != 5)
      throw std::invalid_argument("sweep CSV row must have 5 fields");
    SweepCsvRow row;
    row.gamma = std::strtod(fields[0].c_str(), nullptr);
    row.q = std::strtod(fields[1].c_str(), nullptr);
    row.p = std::strtod(fields[2].c_str(), nullptr);
    row.contractive = fields[3] == "1";
    row.amp_witness = std::strtod(fields[4].c_str(), nullptr);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace eglab::csv
