/**
 * @file metrics.hpp
 * @brief Normalized objective error e(k) and its time evolution E(t).
 *
 * e(k) = (F(x^k) - F_min) / (F(x^0) - F_min), with F_min the smallest final
 * objective over all methods of a trial, and E(t) = min{ e(k) : T(k) <= t }.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nexpga/solver.hpp"

namespace nexpga {

struct ErrorPoint {
  std::size_t k = 0;
  double time = 0.0;
  double e = 0.0;
};

/// e(k) per record, clamped to [0, 1]. Returns nullopt when F0 <= F_min
/// (degenerate trial).
inline std::optional<std::vector<ErrorPoint>> relative_error_series(
    const std::vector<IterTrace>& trace, double F_min, double F0) {
  if (!(F0 > F_min)) return std::nullopt;
  const double denom = F0 - F_min;
  std::vector<ErrorPoint> out;
  out.reserve(trace.size());
  for (const auto& rec : trace) {
    const double e = std::clamp((rec.F - F_min) / denom, 0.0, 1.0);
    out.push_back({rec.k, rec.wall_time, e});
  }
  return out;
}

/// Running minimum of e over records with time <= t, for each grid point t.
/// Grid points earlier than the first record take the first record's value.
inline std::vector<double> evolution_curve(const std::vector<ErrorPoint>& series,
                                           const std::vector<double>& grid) {
  if (series.empty()) throw std::invalid_argument("evolution_curve: empty series");
  for (std::size_t i = 1; i < series.size(); ++i) {
    if (series[i].time < series[i - 1].time) {
      throw std::invalid_argument("evolution_curve: series not sorted by time");
    }
  }
  std::vector<double> out;
  out.reserve(grid.size());
  std::size_t next = 0;
  double running = series.front().e;
  for (double t : grid) {
    while (next < series.size() && series[next].time <= t) {
      running = std::min(running, series[next].e);
      ++next;
    }
    out.push_back(running);
  }
  return out;
}

inline double f_min_of_trial(const std::vector<double>& finals) {
  if (finals.empty()) throw std::invalid_argument("f_min_of_trial: no finished methods");
  return *std::min_element(finals.begin(), finals.end());
}

/// Uniform grid of `points` values on [0, t_max].
inline std::vector<double> uniform_grid(double t_max, std::size_t points) {
  if (points < 2) throw std::invalid_argument("uniform_grid: need at least 2 points");
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = t_max * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  return grid;
}

struct CurveStats {
  std::vector<double> mean;
  std::vector<double> stderr_;
  std::size_t count = 0;
};

/// Pointwise mean and standard error (sample sd / sqrt(count); 0 for one curve).
inline CurveStats average_curves(const std::vector<std::vector<double>>& curves) {
  CurveStats out;
  if (curves.empty()) return out;
  const std::size_t len = curves.front().size();
  out.count = curves.size();
  out.mean.assign(len, 0.0);
  out.stderr_.assign(len, 0.0);
  for (const auto& c : curves) {
    if (c.size() != len) throw std::invalid_argument("average_curves: length mismatch");
    for (std::size_t i = 0; i < len; ++i) out.mean[i] += c[i];
  }
  const auto cnt = static_cast<double>(out.count);
  for (auto& v : out.mean) v /= cnt;
  if (out.count > 1) {
    for (std::size_t i = 0; i < len; ++i) {
      double ss = 0.0;
      for (const auto& c : curves) ss += (c[i] - out.mean[i]) * (c[i] - out.mean[i]);
      out.stderr_[i] = std::sqrt(ss / (cnt - 1.0)) / std::sqrt(cnt);
    }
  }
  return out;
}

}  // namespace nexpga
