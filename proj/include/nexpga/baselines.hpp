/**
 * @file baselines.hpp
 * @brief Method roster for the l1-2 comparison: nexPGA, nexPGA-DC, NPG,
 *        PGels (window-max reference) and pDCAe (fixed step, no line search).
 */
#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "nexpga/problem.hpp"
#include "nexpga/prox_ops.hpp"
#include "nexpga/solver.hpp"

namespace nexpga {

enum class Decomposition { kI, kII };

struct LineSearchBinding {
  SolverParams params;
  ReferencePolicy policy;
  /// Set params.beta_cutoff_gamma from lipschitz_bound(A) before solving.
  bool lipschitz_cutoff = false;
};

/// pDCAe: prox step with gamma = L, FISTA momentum reset every restart_period iterations.
struct PdcaeBinding {
  std::optional<double> lipschitz;  ///< computed from A when unset
  std::size_t restart_period = 200;
};

struct MethodConfig {
  std::string label;
  Decomposition decomposition = Decomposition::kI;
  std::variant<LineSearchBinding, PdcaeBinding> binding;
};

inline const std::vector<std::string>& method_labels() {
  static const std::vector<std::string> labels{"nexPGA", "nexPGA-DC", "NPG", "PGels", "pDCAe"};
  return labels;
}

/// delta = 0.1 -> "nexPGA", delta = 0 -> "NPG", otherwise "nexPGA(delta=...)".
inline MethodConfig make_nexpga(double delta) {
  if (!(delta >= 0.0 && delta < 1.0)) throw std::invalid_argument("make_nexpga: delta must lie in [0,1)");
  std::string label;
  if (delta == 0.0) {
    label = "NPG";
  } else if (delta == 0.1) {
    label = "nexPGA";
  } else {
    label = "nexPGA(delta=" + std::to_string(delta) + ")";
  }
  return {label, Decomposition::kI, LineSearchBinding{paper_params(delta), ReferencePolicy::average()}};
}

inline MethodConfig make_nexpga_dc() {
  return {"nexPGA-DC", Decomposition::kII,
          LineSearchBinding{paper_params(0.1), ReferencePolicy::average()}};
}

inline MethodConfig make_pgels(std::size_t window = 4) {
  return {"PGels", Decomposition::kI,
          LineSearchBinding{paper_params(0.1), ReferencePolicy::window_max(window), true}};
}

inline MethodConfig make_pdcae(std::size_t restart_period = 200) {
  if (restart_period < 1) throw std::invalid_argument("make_pdcae: restart_period must be >= 1");
  return {"pDCAe", Decomposition::kII, PdcaeBinding{std::nullopt, restart_period}};
}

inline MethodConfig make_method(const std::string& label) {
  if (label == "nexPGA") return make_nexpga(0.1);
  if (label == "NPG") return make_nexpga(0.0);
  if (label == "nexPGA-DC") return make_nexpga_dc();
  if (label == "PGels") return make_pgels();
  if (label == "pDCAe") return make_pdcae();
  throw std::invalid_argument("unknown method label: " + label);
}

/**
 * Power iteration on A^T A. Iterates until the Rayleigh quotient changes by
 * less than 1e-10 relative (at most 5000 steps) and returns it inflated by 1.01.
 */
inline double lipschitz_bound(const Matrix& A) {
  if (A.size() == 0) throw std::invalid_argument("lipschitz_bound: empty matrix");
  const Eigen::Index n = A.cols();
  // Deterministic start with no special alignment to coordinate axes.
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = 1.0 + 0.5 * std::sin(1.0 + 3.0 * static_cast<double>(i));
  v.normalize();
  double lam = (A * v).squaredNorm();
  for (int it = 0; it < 5000; ++it) {
    Vector w = A.transpose() * (A * v);
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    v = w / nw;
    const double next = (A * v).squaredNorm();
    const bool done = std::abs(next - lam) < 1e-10 * next;
    lam = next;
    if (done) return 1.01 * lam;
  }
  throw SolverError("lipschitz_bound: power iteration did not converge");
}

/// x+ = prox_{P1/L}(y - (grad f(y) - xi)/L).
inline Vector pdcae_step(const CompositeProblem& problem, const Vector& y, const Vector& xi, double L) {
  if (!(L > 0.0)) throw std::invalid_argument("pdcae_step: L must be positive");
  return prox_gradient_step(problem, y, xi, L);
}

/**
 * Proximal DC algorithm with extrapolation. Trace records carry R = H = F,
 * gamma_bar = L and beta_bar = the momentum weight used.
 */
inline SolveResult solve_pdcae(const CompositeProblem& problem, const Vector& x0, double L,
                               std::size_t restart_period, const StoppingRule& stop,
                               const SolveHooks& hooks = {}, bool track_residual = true) {
  if (!(L > 0.0) || !std::isfinite(L)) throw std::invalid_argument("solve_pdcae: L must be positive");
  if (restart_period < 1) throw std::invalid_argument("solve_pdcae: restart_period must be >= 1");
  require_length(x0, problem.dimension, "solve_pdcae: x0");

  detail::Stopwatch clock;
  SolveResult result;
  auto emit = [&](const IterTrace& rec, const Vector& x) {
    result.traces.push_back(rec);
    if (hooks.on_trace) hooks.on_trace(rec);
    if (hooks.on_iterate) hooks.on_iterate(rec.k, x);
  };

  Vector x = x0;
  Vector x_prev = x0;
  double t_prev = 1.0;
  double t_cur = 1.0;
  const double F0 = eval_objective(problem, x0);
  if (!std::isfinite(F0)) throw std::invalid_argument("solve_pdcae: F(x0) must be finite");
  {
    IterTrace rec;
    rec.F = rec.R = rec.H = F0;
    rec.gamma_bar = L;
    clock.pause();
    emit(rec, x);
    clock.resume();
  }

  for (std::size_t k = 0;; ++k) {
    if (k >= stop.max_iters) {
      result.status = StopStatus::kMaxIters;
      break;
    }
    if (clock.elapsed() >= stop.max_time_s) {
      result.status = StopStatus::kMaxTime;
      break;
    }
    if (k % restart_period == 0) t_prev = t_cur = 1.0;
    const double beta = (t_prev - 1.0) / t_cur;
    t_prev = t_cur;
    t_cur = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_cur * t_cur));

    const Vector xi = problem.p2.subgradient(x);
    const Vector y = extrapolate(x, x_prev, beta);
    const Vector grad_y = smooth_value_grad(problem.smooth, y).second;
    Vector x_next = prox_gradient_step(problem, y, grad_y, xi, L);
    const double F = eval_objective(problem, x_next);
    if (!std::isfinite(F)) throw SolverError("pDCAe produced a non-finite objective");

    IterTrace rec;
    rec.k = k + 1;
    rec.wall_time = clock.elapsed();
    rec.F = rec.R = rec.H = F;
    rec.gamma_bar = rec.gamma_init = L;
    rec.beta_bar = rec.beta_init = beta;
    rec.step_norm = (x_next - x).norm();

    clock.pause();
    if (track_residual) {
      const Vector grad_next = smooth_value_grad(problem.smooth, x_next).second;
      rec.residual = stationarity_residual(grad_next, grad_y, x_next, y, L);
    }
    emit(rec, x_next);
    clock.resume();

    x_prev = std::move(x);
    x = std::move(x_next);
    if (stop.step_tol && rec.step_norm <= *stop.step_tol) {
      result.status = StopStatus::kStepTol;
      break;
    }
  }
  result.x = x;
  result.F = result.traces.back().F;
  return result;
}

}  // namespace nexpga
