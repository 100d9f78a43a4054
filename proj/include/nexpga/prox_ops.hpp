/**
 * @file prox_ops.hpp
 * @brief Concrete oracles for l1-2 regularized least squares.
 */
#pragma once

#include <cmath>
#include <memory>
#include <stdexcept>

#include "nexpga/problem.hpp"

namespace nexpga {

/// Dense design for f(x) = 0.5 * ||A x - b||^2.
struct LeastSquaresData {
  Matrix A;
  Vector b;

  LeastSquaresData(Matrix a, Vector rhs) : A(std::move(a)), b(std::move(rhs)) {
    if (A.rows() < 1 || A.cols() < 1) {
      throw std::invalid_argument("least squares: A must be non-empty");
    }
    if (b.size() != A.rows()) {
      throw std::invalid_argument("least squares: b length must equal rows of A");
    }
    if (!A.allFinite() || !b.allFinite()) {
      throw std::invalid_argument("least squares: non-finite data");
    }
  }
};

/// Value 0.5 * ||Ax - b||^2, gradient A^T (Ax - b). No normal matrix is formed.
inline SmoothOracle least_squares_oracle(std::shared_ptr<const LeastSquaresData> data) {
  auto value = [data](const Vector& x) {
    require_length(x, data->A.cols(), "least squares");
    return 0.5 * (data->A * x - data->b).squaredNorm();
  };
  auto value_grad = [data](const Vector& x, Vector& g) {
    require_length(x, data->A.cols(), "least squares");
    const Vector r = data->A * x - data->b;
    g.noalias() = data->A.transpose() * r;
    return 0.5 * r.squaredNorm();
  };
  return {value, value_grad};
}

inline void require_positive_weight(double t, const char* what) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw std::invalid_argument(std::string(what) + ": weight must be positive and finite");
  }
}

/// prox of t * ||.||_1: componentwise sign(z_i) * max(|z_i| - t, 0).
inline Vector soft_threshold(const Vector& z, double t) {
  require_positive_weight(t, "soft_threshold");
  return z.unaryExpr([t](double v) {
    const double mag = std::abs(v) - t;
    return mag > 0.0 ? std::copysign(mag, v) : 0.0;
  });
}

/**
 * Global minimizer of 0.5 * ||x - z||^2 + t * (||x||_1 - ||x||).
 *
 * If ||z||_inf > t the minimizer is the soft-thresholded point pushed back out
 * along its own direction by t. Otherwise the minimizer is 1-sparse and keeps
 * the largest-magnitude entry of z unchanged; among tied magnitudes the lowest
 * index wins (all ties share the same objective value).
 */
inline Vector prox_l1_minus_l2(const Vector& z, double t) {
  require_positive_weight(t, "prox_l1_minus_l2");
  Vector x = Vector::Zero(z.size());
  if (z.size() == 0) return x;
  Eigen::Index imax = 0;
  const double zmax = z.cwiseAbs().maxCoeff(&imax);  // first maximizer
  if (zmax == 0.0) return x;
  if (zmax > t) {
    const Vector s = soft_threshold(z, t);
    if ((s.array() != 0.0).count() == 1) {
      // Single survivor: the scaling restores it to z exactly; avoid the rounding.
      x[imax] = z[imax];
      return x;
    }
    const double ns = s.norm();
    return s * ((ns + t) / ns);
  }
  x[imax] = z[imax];
  return x;
}

/// lambda * x / ||x||, or zero at the origin.
inline Vector norm_subgradient(const Vector& x, double lambda) {
  require_positive_weight(lambda, "norm_subgradient");
  if (!all_finite(x)) throw OracleError("norm_subgradient: non-finite input");
  const double nx = x.norm();
  if (nx == 0.0) return Vector::Zero(x.size());
  return (lambda / nx) * x;
}

inline ProxOracle l1_oracle(double lambda) {
  require_positive_weight(lambda, "l1_oracle");
  return {[lambda](const Vector& x) { return lambda * x.lpNorm<1>(); },
          [lambda](const Vector& z, double t) { return soft_threshold(z, lambda * t); }};
}

inline ProxOracle l1_minus_l2_oracle(double lambda) {
  require_positive_weight(lambda, "l1_minus_l2_oracle");
  return {[lambda](const Vector& x) { return lambda * (x.lpNorm<1>() - x.norm()); },
          [lambda](const Vector& z, double t) { return prox_l1_minus_l2(z, lambda * t); }};
}

inline SubgradOracle norm_oracle(double lambda) {
  require_positive_weight(lambda, "norm_oracle");
  return {[lambda](const Vector& x) { return lambda * x.norm(); },
          [lambda](const Vector& x) { return norm_subgradient(x, lambda); }};
}

}  // namespace nexpga
