/**
 * @file instances.hpp
 * @brief Random sparse regression instances and the two DC splittings of
 *        F(x) = 0.5 ||Ax - b||^2 + lambda (||x||_1 - ||x||).
 */
#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <iostream>
#include <istream>
#include <memory>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "nexpga/problem.hpp"
#include "nexpga/prox_ops.hpp"
#include "nexpga/random.hpp"

namespace nexpga {

struct Instance {
  std::shared_ptr<const LeastSquaresData> data;
  Vector x_true;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  Eigen::Index n = 0;
  Eigen::Index m = 0;
  Eigen::Index s = 0;
  double noise_scale = 0.01;

  const Matrix& A() const { return data->A; }
  const Vector& b() const { return data->b; }
};

/**
 * A has i.i.d. standard normal entries (drawn row-major), the support of
 * x_true is a uniform s-subset (partial Fisher-Yates), its nonzeros are
 * standard normal, and b = A x_true + noise_scale * z with z standard normal.
 */
inline Instance generate_instance(Eigen::Index n, Eigen::Index m, Eigen::Index s,
                                  double noise_scale, std::uint64_t seed,
                                  std::uint64_t stream = 0) {
  if (!(s >= 1 && s <= m && m <= n)) {
    throw std::invalid_argument("generate_instance: need 1 <= s <= m <= n");
  }
  if (!(noise_scale >= 0.0) || !std::isfinite(noise_scale)) {
    throw std::invalid_argument("generate_instance: noise_scale must be finite and >= 0");
  }
  RandomStream rng(seed, stream);

  Matrix A(m, n);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) A(i, j) = rng.gaussian();
  }

  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  for (Eigen::Index i = 0; i < s; ++i) {
    const auto j = i + static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n - i)));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  Vector x_true = Vector::Zero(n);
  for (Eigen::Index i = 0; i < s; ++i) {
    double v = rng.gaussian();
    while (v == 0.0) v = rng.gaussian();
    x_true[idx[static_cast<std::size_t>(i)]] = v;
  }

  Vector b = A * x_true;
  if (noise_scale > 0.0) {
    for (Eigen::Index i = 0; i < m; ++i) b[i] += noise_scale * rng.gaussian();
  }

  Instance inst;
  inst.data = std::make_shared<const LeastSquaresData>(std::move(A), std::move(b));
  inst.x_true = std::move(x_true);
  inst.seed = seed;
  inst.stream = stream;
  inst.n = n;
  inst.m = m;
  inst.s = s;
  inst.noise_scale = noise_scale;
  return inst;
}

/// f = least squares, P1 = lambda (||.||_1 - ||.||), P2 = 0.
inline CompositeProblem decomposition_I(const Instance& inst, double lambda) {
  return {least_squares_oracle(inst.data), l1_minus_l2_oracle(lambda), zero_subgrad(), inst.n};
}

using WarningSink = std::function<void(std::string_view)>;

inline void warn_to_stderr(std::string_view msg) { std::clog << "warning: " << msg << '\n'; }

/// ||A^T b||_inf; the DC splitting is known to be well posed when 2 lambda is below it.
inline double dc_condition_bound(const Instance& inst) {
  return (inst.A().transpose() * inst.b()).cwiseAbs().maxCoeff();
}

/// f = least squares, P1 = lambda ||.||_1, P2 = lambda ||.||. Warns when
/// 2 lambda >= ||A^T b||_inf.
inline CompositeProblem decomposition_II(const Instance& inst, double lambda,
                                         const WarningSink& warn = warn_to_stderr) {
  const double bound = dc_condition_bound(inst);
  if (!(2.0 * lambda < bound) && warn) {
    std::ostringstream msg;
    msg << "decomposition II: 2*lambda = " << 2.0 * lambda << " >= ||A^T b||_inf = " << bound;
    warn(msg.str());
  }
  return {least_squares_oracle(inst.data), l1_oracle(lambda), norm_oracle(lambda), inst.n};
}

/// Text dump: "n m s seed noise", A row-major, b, then "index value" per nonzero of x_true.
inline void write_instance(std::ostream& os, const Instance& inst) {
  os << std::setprecision(17);
  os << inst.n << ' ' << inst.m << ' ' << inst.s << ' ' << inst.seed << ' ' << inst.noise_scale
     << '\n';
  for (Eigen::Index i = 0; i < inst.m; ++i) {
    for (Eigen::Index j = 0; j < inst.n; ++j) os << (j ? " " : "") << inst.A()(i, j);
    os << '\n';
  }
  for (Eigen::Index i = 0; i < inst.m; ++i) os << (i ? " " : "") << inst.b()[i];
  os << '\n';
  for (Eigen::Index j = 0; j < inst.n; ++j) {
    if (inst.x_true[j] != 0.0) os << j << ' ' << inst.x_true[j] << '\n';
  }
}

inline Instance read_instance(std::istream& is) {
  Instance inst;
  if (!(is >> inst.n >> inst.m >> inst.s >> inst.seed >> inst.noise_scale)) {
    throw std::runtime_error("read_instance: bad header");
  }
  if (inst.n < 1 || inst.m < 1 || inst.s < 0) throw std::runtime_error("read_instance: bad dims");
  Matrix A(inst.m, inst.n);
  for (Eigen::Index i = 0; i < inst.m; ++i) {
    for (Eigen::Index j = 0; j < inst.n; ++j) {
      if (!(is >> A(i, j))) throw std::runtime_error("read_instance: truncated A");
    }
  }
  Vector b(inst.m);
  for (Eigen::Index i = 0; i < inst.m; ++i) {
    if (!(is >> b[i])) throw std::runtime_error("read_instance: truncated b");
  }
  inst.x_true = Vector::Zero(inst.n);
  for (Eigen::Index k = 0; k < inst.s; ++k) {
    Eigen::Index j = 0;
    double v = 0.0;
    if (!(is >> j >> v) || j < 0 || j >= inst.n) {
      throw std::runtime_error("read_instance: bad x_true entry");
    }
    inst.x_true[j] = v;
  }
  inst.data = std::make_shared<const LeastSquaresData>(std::move(A), std::move(b));
  return inst;
}

}  // namespace nexpga
