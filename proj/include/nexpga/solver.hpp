/**
 * @file solver.hpp
 * @brief Nonmonotone extrapolated proximal gradient-subgradient method.
 *
 * Each outer iteration k picks xi in dP2(x^k), an initial extrapolation
 * weight beta_{k,0} in [0, delta*beta_max] and an initial curvature estimate
 * gamma_{k,0} in [gamma_min, gamma_max]. The inner loop forms
 *
 *   y   = x^k + beta (x^k - x^{k-1})
 *   x+  = prox_{P1/gamma}(y - (grad f(y) - xi) / gamma)
 *
 * and accepts x+ once the potential
 *
 *   H_delta(x+, x^k, gamma) = F(x+) + (delta*gamma/8) ||x+ - x^k||^2
 *
 * is at least ((1-delta)*gamma/8) ||x+ - x^k||^2 below the reference value R_k.
 * On rejection beta shrinks by eta and gamma grows by tau. The reference value
 * is a running convex combination of past potentials (average type) or, for
 * the max-type baseline, the largest potential over a sliding window.
 */
#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <deque>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nexpga/problem.hpp"

namespace nexpga {

/// Hard solver failure: line search cap exceeded, broken invariant, non-finite state.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class GammaInit { kConstant, kSpectral };
enum class BetaInit { kZero, kFista };

struct StoppingRule {
  double max_time_s = kInfinity;
  std::size_t max_iters = std::numeric_limits<std::size_t>::max();
  /// Stop once ||x^{k+1} - x^k|| <= step_tol. Disabled when unset.
  std::optional<double> step_tol;
};

struct SolverParams {
  double gamma_min = 1e-6;
  double gamma_max = 1e6;
  double beta_max = 10.0;
  double p_min = 0.01;
  double delta = 0.1;
  double tau = 1.56;
  double eta = 0.8;

  /// Weight p_{k+1} used when forming R_{k+1}. Empty means constant `p`.
  std::function<double(std::size_t)> p_schedule;
  double p = 0.01;

  GammaInit gamma_init = GammaInit::kSpectral;
  /// gamma_{0,0}; also gamma_{k,0} for every k under the constant rule.
  double gamma_first = 1.0;
  BetaInit beta_init = BetaInit::kFista;

  int inner_cap = 200;
  double gamma_safety_cap = 1e12;
  /// Extrapolation is switched off for the rest of a line search once gamma
  /// exceeds this value. Unset for nexPGA; PGels sets it to a Lipschitz bound.
  std::optional<double> beta_cutoff_gamma;
  StoppingRule stopping;

  bool check_invariants = true;
  bool track_residual = true;

  /// Throws std::invalid_argument unless the parameter block is admissible.
  void validate() const {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("SolverParams: " + msg); };
    if (!(gamma_min > 0.0) || !(gamma_min <= gamma_max) || !std::isfinite(gamma_max)) {
      fail("need 0 < gamma_min <= gamma_max < inf");
    }
    if (!(beta_max >= 0.0) || !std::isfinite(beta_max)) fail("need beta_max >= 0");
    if (!(p_min > 0.0 && p_min <= 1.0)) fail("need 0 < p_min <= 1");
    if (!(delta >= 0.0 && delta < 1.0)) fail("need 0 <= delta < 1");
    if (!(tau > 1.0) || !std::isfinite(tau)) fail("need tau > 1");
    if (!(eta > 0.0 && tau * eta * eta < 1.0)) fail("need 0 < eta < 1/sqrt(tau)");
    if (!p_schedule && !(p >= p_min && p <= 1.0)) fail("need p in [p_min, 1]");
    if (!(gamma_first > 0.0)) fail("need gamma_first > 0");
    if (inner_cap < 1) fail("need inner_cap >= 1");
    if (beta_cutoff_gamma && !(*beta_cutoff_gamma > 0.0)) fail("need beta_cutoff_gamma > 0");
    if (!(stopping.max_time_s > 0.0)) fail("need max_time_s > 0");
  }

  double weight(std::size_t k) const {
    const double value = p_schedule ? p_schedule(k) : p;
    if (!(value >= p_min && value <= 1.0)) {
      throw std::invalid_argument("SolverParams: p schedule left [p_min, 1]");
    }
    return value;
  }

  double clip_gamma(double g) const { return std::min(std::max(g, gamma_min), gamma_max); }
};

/// Line search parameter block used in the l1-2 experiments.
inline SolverParams paper_params(double delta) {
  SolverParams params;
  params.delta = delta;
  params.beta_init = delta > 0.0 ? BetaInit::kFista : BetaInit::kZero;
  params.validate();
  return params;
}

/// How the reference value R_k is formed.
struct ReferencePolicy {
  enum class Kind { kAverage, kWindowMax };
  Kind kind = Kind::kAverage;
  std::size_t window = 4;  ///< N, used by kWindowMax: max over the last N+1 potentials.

  static ReferencePolicy average() { return {}; }
  static ReferencePolicy window_max(std::size_t n) { return {Kind::kWindowMax, n}; }
};

/// One record per iterate x^k (k = 0 is the starting point).
struct IterTrace {
  std::size_t k = 0;
  double wall_time = 0.0;
  double F = 0.0;
  double R = 0.0;
  double H = 0.0;
  double gamma_bar = 0.0;
  double beta_bar = 0.0;
  int inner_iters = 0;
  double step_norm = 0.0;
  double residual = std::numeric_limits<double>::quiet_NaN();
  double gamma_init = 0.0;  ///< gamma_{k-1,0}
  double beta_init = 0.0;   ///< beta_{k-1,0}
};

struct SolverState {
  std::size_t k = 0;
  Vector x_cur;
  Vector x_prev;
  double R = 0.0;
  double gamma_bar_prev = 0.0;
  double t_prev = 1.0;
  double t_cur = 1.0;
  Vector xi_cur;

  // Accepted extrapolated point of the previous iteration and its gradient.
  Vector y_bar_prev;
  Vector grad_y_bar_prev;
  // Gradient already evaluated at y^{k,0} while choosing gamma_{k,0}.
  std::optional<Vector> grad_y0;
};

enum class StopStatus { kMaxTime, kMaxIters, kStepTol };

inline const char* to_string(StopStatus s) {
  switch (s) {
    case StopStatus::kMaxTime: return "max_time";
    case StopStatus::kMaxIters: return "max_iters";
    case StopStatus::kStepTol: return "step_tol";
  }
  return "unknown";
}

struct SolveResult {
  Vector x;
  double F = 0.0;
  std::vector<IterTrace> traces;
  StopStatus status = StopStatus::kMaxIters;
};

/// Optional observers. Both are invoked outside the timed region.
struct SolveHooks {
  std::function<void(const IterTrace&)> on_trace;
  std::function<void(std::size_t, const Vector&)> on_iterate;
};

// ---------------------------------------------------------------------------
// Building blocks
// ---------------------------------------------------------------------------

/// H_delta(u, v, gamma) = F(u) + (delta*gamma/8) ||u - v||^2; +inf propagates.
inline double potential(const CompositeProblem& problem, const Vector& u, const Vector& v,
                        double gamma, double delta) {
  if (!(gamma > 0.0)) throw std::invalid_argument("potential: gamma must be positive");
  if (!(delta >= 0.0 && delta < 1.0)) throw std::invalid_argument("potential: delta out of [0,1)");
  const double F = eval_objective(problem, u);
  if (F == kInfinity) return kInfinity;
  return F + (delta * gamma / 8.0) * (u - v).squaredNorm();
}

inline Vector extrapolate(const Vector& x_cur, const Vector& x_prev, double beta) {
  if (beta == 0.0) return x_cur;
  return x_cur + beta * (x_cur - x_prev);
}

/// Minimizer of <g - xi, x - y> + (gamma/2)||x - y||^2 + P1(x), with g = grad f(y).
inline Vector prox_gradient_step(const CompositeProblem& problem, const Vector& y,
                                 const Vector& grad_y, const Vector& xi, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("prox_gradient_step: gamma must be positive");
  Vector x = problem.p1.prox(y - (grad_y - xi) / gamma, 1.0 / gamma);
  if (x.size() != y.size()) throw OracleError("prox returned a vector of the wrong length");
  if (!all_finite(x)) throw SolverError("prox_gradient_step: non-finite prox output");
  return x;
}

inline Vector prox_gradient_step(const CompositeProblem& problem, const Vector& y,
                                 const Vector& xi, double gamma) {
  const auto [fy, grad] = smooth_value_grad(problem.smooth, y);
  (void)fy;
  return prox_gradient_step(problem, y, grad, xi, gamma);
}

/// Sufficient-decrease test H - R <= -((1-delta)gamma/8) step_sq, with a
/// rounding slack of 1e-14 * (1 + |R|).
inline bool accept_test(double H_cand, double R, double gamma, double delta, double step_sq) {
  const double slack = 1e-14 * (1.0 + std::abs(R));
  return H_cand - R <= -((1.0 - delta) * gamma / 8.0) * step_sq + slack;
}

/// R_{k+1} = (1 - p) R_k + p H.
inline double reference_update(double R, double p, double H) {
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("reference_update: p must lie in (0,1]");
  if (p == 1.0) return H;
  return (1.0 - p) * R + p * H;
}

/// Spectral (Barzilai-Borwein) initial curvature:
/// clip(max(<dy, dg>/||dy||^2, 0.9 gamma_bar_prev)); the quotient is skipped when dy = 0.
inline double spectral_gamma_init(const Vector& dy, const Vector& dg, double gamma_bar_prev,
                                  const SolverParams& params) {
  double g = 0.9 * gamma_bar_prev;
  const double dy2 = dy.squaredNorm();
  if (dy2 > 0.0) {
    const double quotient = dy.dot(dg) / dy2;
    if (std::isfinite(quotient)) g = std::max(quotient, g);
  }
  return params.clip_gamma(g);
}

struct FistaStep {
  double t_next;
  double beta0;
};

/// t_{k+1} = (1 + sqrt(1 + 4 t_k^2)) / 2 and beta_{k,0} = (t_{k-1} - 1)/t_k,
/// clamped into [0, delta * beta_max].
inline FistaStep fista_beta_next(double t_prev, double t_cur, double delta, double beta_max) {
  const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_cur * t_cur));
  const double beta = std::clamp((t_prev - 1.0) / t_cur, 0.0, delta * beta_max);
  return {t_next, beta};
}

/// ||grad f(x+) - grad f(y) + gamma (y - x+)||, which bounds
/// dist(0, grad f(x+) + dP1(x+) - xi).
inline double stationarity_residual(const Vector& grad_xnext, const Vector& grad_y,
                                    const Vector& x_next, const Vector& y, double gamma_bar) {
  return (grad_xnext - grad_y + gamma_bar * (y - x_next)).norm();
}

struct InnerResult {
  Vector x_next;
  Vector y_bar;
  Vector grad_y_bar;
  double F_next = 0.0;
  double H_next = 0.0;
  double gamma_bar = 0.0;
  double beta_bar = 0.0;
  int inner_iters = 0;
  double step_sq = 0.0;
};

using AcceptFn = std::function<bool(double, double, double, double, double)>;

/**
 * Backtracking over (beta, gamma) for the current outer iteration. Uses
 * state.xi_cur for every trial and state.grad_y0 (if present) as the gradient
 * at y^{k,0}. Throws SolverError after inner_cap rejections.
 */
template <class Accept = bool (*)(double, double, double, double, double)>
InnerResult inner_loop(const CompositeProblem& problem, const SolverState& state, double beta0,
                       double gamma0, const SolverParams& params, Accept accept = &accept_test) {
  if (!(beta0 >= 0.0 && beta0 <= params.delta * params.beta_max)) {
    throw std::invalid_argument("inner_loop: beta0 outside [0, delta*beta_max]");
  }
  if (!(gamma0 >= params.gamma_min && gamma0 <= params.gamma_max)) {
    throw std::invalid_argument("inner_loop: gamma0 outside [gamma_min, gamma_max]");
  }
  const Vector& xi = state.xi_cur;
  double beta = beta0;
  double gamma = gamma0;
  Vector y;
  Vector grad;
  std::optional<double> beta_of_y;
  for (int i = 0;; ++i) {
    if (i > params.inner_cap) {
      throw SolverError("line search failed: inner iteration cap " +
                        std::to_string(params.inner_cap) + " exceeded at k = " +
                        std::to_string(state.k));
    }
    if (!(gamma <= params.gamma_safety_cap)) {
      throw SolverError("line search failed: gamma exceeded safety cap at k = " +
                        std::to_string(state.k));
    }
    if (!beta_of_y || *beta_of_y != beta) {
      y = extrapolate(state.x_cur, state.x_prev, beta);
      if (i == 0 && state.grad_y0) {
        grad = *state.grad_y0;
      } else {
        grad = smooth_value_grad(problem.smooth, y).second;
      }
      beta_of_y = beta;
    }
    Vector x = prox_gradient_step(problem, y, grad, xi, gamma);
    const double step_sq = (x - state.x_cur).squaredNorm();
    const double F = eval_objective(problem, x);
    const double H = F == kInfinity ? kInfinity : F + (params.delta * gamma / 8.0) * step_sq;
    if (accept(H, state.R, gamma, params.delta, step_sq)) {
      InnerResult out;
      out.x_next = std::move(x);
      out.y_bar = std::move(y);
      out.grad_y_bar = std::move(grad);
      out.F_next = F;
      out.H_next = H;
      out.gamma_bar = gamma;
      out.beta_bar = beta;
      out.inner_iters = i;
      out.step_sq = step_sq;
      return out;
    }
    beta *= params.eta;
    gamma *= params.tau;
    if (params.beta_cutoff_gamma && gamma > *params.beta_cutoff_gamma) beta = 0.0;
  }
}

namespace detail {

/// Wall clock that can exclude diagnostic work from the measured time.
class Stopwatch {
 public:
  using clock = std::chrono::steady_clock;

  Stopwatch() : start_(clock::now()) {}

  double elapsed() const {
    const auto now = paused_ ? pause_start_ : clock::now();
    return std::chrono::duration<double>(now - start_ - excluded_).count();
  }
  void pause() {
    pause_start_ = clock::now();
    paused_ = true;
  }
  void resume() {
    excluded_ += clock::now() - pause_start_;
    paused_ = false;
  }

 private:
  clock::time_point start_;
  clock::time_point pause_start_{};
  clock::duration excluded_{0};
  bool paused_ = false;
};

inline void check_invariant(bool ok, std::size_t k, const char* what) {
  if (!ok) {
    throw SolverError(std::string("invariant violated at k = ") + std::to_string(k) + ": " + what);
  }
}

}  // namespace detail

/**
 * Runs outer iterations from x0 until a stopping rule fires. Emits one trace
 * record for x^0 and one per completed iteration. Under the average-type
 * reference the monotonicity of R_k and R_k >= H_k are asserted each
 * iteration to 1e-10 * (1 + |R_k|).
 */
inline SolveResult solve(const CompositeProblem& problem, const Vector& x0,
                         const SolverParams& params,
                         ReferencePolicy policy = ReferencePolicy::average(),
                         const SolveHooks& hooks = {}) {
  params.validate();
  require_length(x0, problem.dimension, "solve: x0");
  if (!all_finite(x0)) throw std::invalid_argument("solve: x0 must be finite");

  detail::Stopwatch clock;

  SolverState state;
  state.x_cur = x0;
  state.x_prev = x0;
  state.R = eval_objective(problem, x0);
  if (!std::isfinite(state.R)) throw std::invalid_argument("solve: F(x0) must be finite");
  state.gamma_bar_prev = params.gamma_min;

  std::deque<double> window{state.R};

  SolveResult result;
  auto emit = [&](const IterTrace& rec, const Vector& x) {
    result.traces.push_back(rec);
    if (hooks.on_trace) hooks.on_trace(rec);
    if (hooks.on_iterate) hooks.on_iterate(rec.k, x);
  };

  {
    IterTrace rec;
    rec.k = 0;
    rec.wall_time = 0.0;
    rec.F = rec.R = rec.H = state.R;
    rec.gamma_bar = state.gamma_bar_prev;
    clock.pause();
    emit(rec, state.x_cur);
    clock.resume();
  }

  const auto& stop = params.stopping;
  for (;;) {
    if (state.k >= stop.max_iters) {
      result.status = StopStatus::kMaxIters;
      break;
    }
    if (clock.elapsed() >= stop.max_time_s) {
      result.status = StopStatus::kMaxTime;
      break;
    }

    // Step 1.
    state.xi_cur = problem.p2.subgradient(state.x_cur);
    if (state.xi_cur.size() != problem.dimension || !all_finite(state.xi_cur)) {
      throw OracleError("P2 subgradient has wrong length or non-finite entries");
    }

    double beta0 = 0.0;
    if (params.beta_init == BetaInit::kFista) {
      const FistaStep fs = fista_beta_next(state.t_prev, state.t_cur, params.delta, params.beta_max);
      beta0 = fs.beta0;
      state.t_prev = state.t_cur;
      state.t_cur = fs.t_next;
    }

    double gamma0 = params.clip_gamma(params.gamma_first);
    state.grad_y0.reset();
    if (params.gamma_init == GammaInit::kSpectral && state.k > 0) {
      const Vector y0 = extrapolate(state.x_cur, state.x_prev, beta0);
      Vector g0 = smooth_value_grad(problem.smooth, y0).second;
      gamma0 = spectral_gamma_init(y0 - state.y_bar_prev, g0 - state.grad_y_bar_prev,
                                   state.gamma_bar_prev, params);
      state.grad_y0 = std::move(g0);
    }

    InnerResult step = inner_loop(problem, state, beta0, gamma0, params);

    // Step 2.
    const double p = params.weight(state.k);
    double R_next = 0.0;
    if (policy.kind == ReferencePolicy::Kind::kAverage) {
      R_next = reference_update(state.R, p, step.H_next);
      if (params.check_invariants) {
        const double tol = 1e-10 * (1.0 + std::abs(state.R));
        const double decrease = (1.0 - params.delta) * p * step.gamma_bar / 8.0 * step.step_sq;
        detail::check_invariant(R_next <= state.R - decrease + tol, state.k + 1,
                                "R_{k+1} <= R_k - (1-delta) p gamma_bar/8 ||dx||^2");
        detail::check_invariant(R_next >= step.H_next - tol, state.k + 1, "R_{k+1} >= H_{k+1}");
      }
    } else {
      window.push_back(step.H_next);
      while (window.size() > policy.window + 1) window.pop_front();
      R_next = *std::max_element(window.begin(), window.end());
    }

    IterTrace rec;
    rec.k = state.k + 1;
    rec.wall_time = clock.elapsed();
    rec.F = step.F_next;
    rec.R = R_next;
    rec.H = step.H_next;
    rec.gamma_bar = step.gamma_bar;
    rec.beta_bar = step.beta_bar;
    rec.inner_iters = step.inner_iters;
    rec.step_norm = std::sqrt(step.step_sq);
    rec.gamma_init = gamma0;
    rec.beta_init = beta0;

    clock.pause();
    if (params.track_residual) {
      const Vector grad_next = smooth_value_grad(problem.smooth, step.x_next).second;
      rec.residual = stationarity_residual(grad_next, step.grad_y_bar, step.x_next, step.y_bar,
                                           step.gamma_bar);
    }
    emit(rec, step.x_next);
    clock.resume();

    state.x_prev = std::move(state.x_cur);
    state.x_cur = std::move(step.x_next);
    state.R = R_next;
    state.gamma_bar_prev = step.gamma_bar;
    state.y_bar_prev = std::move(step.y_bar);
    state.grad_y_bar_prev = std::move(step.grad_y_bar);
    ++state.k;

    if (stop.step_tol && rec.step_norm <= *stop.step_tol) {
      result.status = StopStatus::kStepTol;
      break;
    }
  }

  result.x = state.x_cur;
  result.F = result.traces.back().F;
  return result;
}

}  // namespace nexpga
