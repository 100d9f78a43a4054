/**
 * @file problem.hpp
 * @brief Composite objective F = f + P1 - P2 and its three oracle interfaces.
 *
 * f is continuously differentiable with a locally Lipschitz gradient, P1 is
 * proper and lower semicontinuous with an easy proximal mapping, and P2 is a
 * continuous convex function for which one subgradient can be selected.
 */
#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace nexpga {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Raised when an oracle or solver produces a value it must never produce.
class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline bool all_finite(const Vector& v) { return v.allFinite(); }

inline void require_length(const Vector& v, Eigen::Index n, const char* what) {
  if (v.size() != n) {
    throw std::invalid_argument(std::string(what) + ": expected length " +
                                std::to_string(n) + ", got " +
                                std::to_string(v.size()));
  }
}

/// Smooth part f. `value_grad` writes the gradient into its second argument.
struct SmoothOracle {
  std::function<double(const Vector&)> value;
  std::function<double(const Vector&, Vector&)> value_grad;
};

/// Prox-friendly part P1. `prox(z, t)` returns a global minimizer of
/// 0.5 * ||x - z||^2 + t * P1(x). `value` may return +inf outside dom P1.
struct ProxOracle {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&, double)> prox;
};

/// Convex part P2 with a deterministic subgradient selector.
struct SubgradOracle {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> subgradient;
};

struct CompositeProblem {
  SmoothOracle smooth;
  ProxOracle p1;
  SubgradOracle p2;
  Eigen::Index dimension = 0;
};

/// f(x) and grad f(x), checked for length and finiteness.
inline std::pair<double, Vector> smooth_value_grad(const SmoothOracle& oracle,
                                                   const Vector& x) {
  if (!all_finite(x)) throw OracleError("smooth oracle: non-finite input");
  Vector grad;
  const double value = oracle.value_grad(x, grad);
  if (grad.size() != x.size()) {
    throw OracleError("smooth oracle: gradient length differs from input");
  }
  if (!std::isfinite(value) || !all_finite(grad)) {
    throw OracleError("smooth oracle: non-finite output");
  }
  return {value, std::move(grad)};
}

inline double smooth_value(const SmoothOracle& oracle, const Vector& x) {
  const double value = oracle.value(x);
  if (!std::isfinite(value)) throw OracleError("smooth oracle: non-finite value");
  return value;
}

/// F(x) = f(x) + P1(x) - P2(x). Returns +inf when x lies outside dom P1.
inline double eval_objective(const CompositeProblem& problem, const Vector& x) {
  require_length(x, problem.dimension, "eval_objective");
  const double p1 = problem.p1.value(x);
  if (std::isnan(p1) || p1 == -kInfinity) {
    throw OracleError("P1 returned NaN or -inf");
  }
  if (p1 == kInfinity) return kInfinity;
  const double f = smooth_value(problem.smooth, x);
  const double p2 = problem.p2.value(x);
  if (!std::isfinite(p2)) throw OracleError("P2 returned a non-finite value");
  return f + p1 - p2;
}

/// The zero function, usable as either f, P1 or P2.
inline SmoothOracle zero_smooth() {
  return {[](const Vector&) { return 0.0; },
          [](const Vector& x, Vector& g) {
            g = Vector::Zero(x.size());
            return 0.0;
          }};
}

inline ProxOracle zero_prox() {
  return {[](const Vector&) { return 0.0; },
          [](const Vector& z, double) { return Vector(z); }};
}

inline SubgradOracle zero_subgrad() {
  return {[](const Vector&) { return 0.0; },
          [](const Vector& x) { return Vector(Vector::Zero(x.size())); }};
}

/// f(x) = 0.5 * ||x - c||^2.
inline SmoothOracle shifted_quadratic(Vector center) {
  return {[center](const Vector& x) { return 0.5 * (x - center).squaredNorm(); },
          [center](const Vector& x, Vector& g) {
            g = x - center;
            return 0.5 * g.squaredNorm();
          }};
}

}  // namespace nexpga
