#include <cmath>

#include <gtest/gtest.h>

#include "nexpga/instances.hpp"
#include "nexpga/problem.hpp"
#include "nexpga/prox_ops.hpp"
#include "oracles.hpp"

using namespace nexpga;

namespace {

CompositeProblem half_norm_problem(Eigen::Index n) {
  return {shifted_quadratic(Vector::Zero(n)), zero_prox(), zero_subgrad(), n};
}

}  // namespace

TEST(EvalObjective, QuadraticArithmetic) {
  const auto problem = half_norm_problem(2);
  EXPECT_DOUBLE_EQ(eval_objective(problem, Vector{{3.0, 4.0}}), 12.5);
}

TEST(EvalObjective, LeastSquaresAtOriginIsHalfNormOfB) {
  const Instance inst = generate_instance(40, 10, 3, 0.01, 5);
  const auto problem = decomposition_I(inst, 0.1);
  EXPECT_DOUBLE_EQ(eval_objective(problem, Vector::Zero(40)), 0.5 * inst.b().squaredNorm());
}

TEST(EvalObjective, DimensionMismatchThrows) {
  const auto problem = half_norm_problem(3);
  EXPECT_THROW(eval_objective(problem, Vector::Zero(2)), std::invalid_argument);
}

TEST(EvalObjective, PlusInfinityFromP1Propagates) {
  CompositeProblem problem = half_norm_problem(2);
  problem.p1.value = [](const Vector& x) { return x[0] < 0 ? kInfinity : 0.0; };
  EXPECT_EQ(eval_objective(problem, Vector{{-1.0, 0.0}}), kInfinity);
  EXPECT_DOUBLE_EQ(eval_objective(problem, Vector{{1.0, 0.0}}), 0.5);
}

TEST(EvalObjective, NonFiniteOracleOutputIsAnError) {
  CompositeProblem problem = half_norm_problem(2);
  problem.p1.value = [](const Vector&) { return std::nan(""); };
  EXPECT_THROW(eval_objective(problem, Vector::Zero(2)), OracleError);
  problem = half_norm_problem(2);
  problem.p1.value = [](const Vector&) { return -kInfinity; };
  EXPECT_THROW(eval_objective(problem, Vector::Zero(2)), OracleError);
  problem = half_norm_problem(2);
  problem.p2.value = [](const Vector&) { return kInfinity; };
  EXPECT_THROW(eval_objective(problem, Vector::Zero(2)), OracleError);
}

TEST(EvalObjective, DecompositionsAgreePointwise) {
  const Instance inst = generate_instance(60, 20, 4, 0.01, 11);
  const auto p1 = decomposition_I(inst, 0.1);
  const auto p2 = decomposition_II(inst, 0.1, nullptr);
  RandomStream rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    Vector x(60);
    for (auto& v : x) v = rng.gaussian();
    const double a = eval_objective(p1, x);
    const double b = eval_objective(p2, x);
    EXPECT_NEAR(a, b, 1e-12 * (1.0 + std::abs(a)));
  }
}

TEST(SmoothValueGrad, IdentityQuadratic) {
  const auto [v, g] = smooth_value_grad(shifted_quadratic(Vector::Zero(2)), Vector{{1.0, -2.0}});
  EXPECT_DOUBLE_EQ(v, 2.5);
  EXPECT_DOUBLE_EQ(g[0], 1.0);
  EXPECT_DOUBLE_EQ(g[1], -2.0);
}

TEST(SmoothValueGrad, ZeroFunction) {
  const auto [v, g] = smooth_value_grad(zero_smooth(), Vector{{1.0, -2.0, 7.0}});
  EXPECT_EQ(v, 0.0);
  EXPECT_EQ(g, Vector::Zero(3));
}

TEST(SmoothValueGrad, MatchesCentralDifferencesOnLeastSquares) {
  RandomStream rng(17);
  Matrix A(5, 8);
  for (auto& v : A.reshaped()) v = rng.gaussian();
  Vector b(5);
  for (auto& v : b) v = rng.gaussian();
  const auto oracle = least_squares_oracle(std::make_shared<const LeastSquaresData>(A, b));
  Vector x(8);
  for (auto& v : x) v = rng.gaussian();
  const auto [value, grad] = smooth_value_grad(oracle, x);
  const Vector fd = oracle::central_difference_gradient(oracle.value, x);
  EXPECT_LT((grad - fd).norm() / grad.norm(), 1e-6);
}

TEST(SmoothValueGrad, NonFiniteOutputThrows) {
  SmoothOracle bad{[](const Vector&) { return 0.0; },
                   [](const Vector& x, Vector& g) {
                     g = Vector::Constant(x.size(), std::nan(""));
                     return 0.0;
                   }};
  EXPECT_THROW(smooth_value_grad(bad, Vector::Zero(2)), OracleError);
  SmoothOracle short_grad{[](const Vector&) { return 0.0; },
                          [](const Vector&, Vector& g) {
                            g = Vector::Zero(1);
                            return 0.0;
                          }};
  EXPECT_THROW(smooth_value_grad(short_grad, Vector::Zero(2)), OracleError);
}

// Prox outputs must do at least as well as z and 0 on the prox subproblem.
TEST(OracleProperties, ProxBeatsZAndOrigin) {
  RandomStream rng(23);
  const std::vector<std::pair<const char*, ProxOracle>> oracles{
      {"l1", l1_oracle(0.3)}, {"l1-l2", l1_minus_l2_oracle(0.3)}, {"zero", zero_prox()}};
  for (const auto& [name, op] : oracles) {
    for (int trial = 0; trial < 100; ++trial) {
      const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng.below(6));
      Vector z(n);
      for (auto& v : z) v = 2.0 * rng.gaussian();
      const double t = rng.uniform(0.01, 3.0);
      auto obj = [&](const Vector& x) { return 0.5 * (x - z).squaredNorm() + t * op.value(x); };
      const Vector xp = op.prox(z, t);
      EXPECT_LE(obj(xp), obj(z) + 1e-12) << name;
      EXPECT_LE(obj(xp), obj(Vector::Zero(n)) + 1e-12) << name;
    }
  }
}

TEST(OracleProperties, SubgradientConvexityInequality) {
  RandomStream rng(29);
  const std::vector<SubgradOracle> oracles{norm_oracle(0.7), zero_subgrad()};
  for (const auto& op : oracles) {
    for (int trial = 0; trial < 100; ++trial) {
      Vector x(5), y(5);
      for (auto& v : x) v = rng.gaussian();
      for (auto& v : y) v = rng.gaussian();
      if (trial % 10 == 0) x.setZero();
      EXPECT_GE(op.value(y), op.value(x) + op.subgradient(x).dot(y - x) - 1e-10);
    }
  }
}
