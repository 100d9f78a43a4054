#include <cmath>
#include <memory>

#include <gtest/gtest.h>

#include "nexpga/prox_ops.hpp"
#include "nexpga/random.hpp"
#include "oracles.hpp"

using namespace nexpga;

TEST(LeastSquaresOracle, ZeroResidual) {
  auto data = std::make_shared<const LeastSquaresData>(Matrix::Identity(2, 2), Vector{{1.0, 1.0}});
  const auto [v, g] = smooth_value_grad(least_squares_oracle(data), Vector{{1.0, 1.0}});
  EXPECT_EQ(v, 0.0);
  EXPECT_EQ(g, Vector::Zero(2));
}

TEST(LeastSquaresOracle, SingleRow) {
  Matrix A(1, 2);
  A << 1.0, 0.0;
  auto data = std::make_shared<const LeastSquaresData>(A, Vector{{2.0}});
  const auto [v, g] = smooth_value_grad(least_squares_oracle(data), Vector{{0.0, 5.0}});
  EXPECT_DOUBLE_EQ(v, 2.0);
  EXPECT_DOUBLE_EQ(g[0], -2.0);
  EXPECT_DOUBLE_EQ(g[1], 0.0);
}

TEST(LeastSquaresOracle, GradientMatchesFiniteDifferences) {
  RandomStream rng(101);
  Matrix A(10, 20);
  for (auto& v : A.reshaped()) v = rng.gaussian();
  Vector b(10);
  for (auto& v : b) v = rng.gaussian();
  const auto oracle = least_squares_oracle(std::make_shared<const LeastSquaresData>(A, b));
  Vector x(20);
  for (auto& v : x) v = rng.gaussian();
  const auto [value, grad] = smooth_value_grad(oracle, x);
  const Vector fd = oracle::central_difference_gradient(oracle.value, x);
  EXPECT_LT((grad - fd).norm() / grad.norm(), 1e-6);
}

TEST(LeastSquaresOracle, RejectsBadData) {
  EXPECT_THROW(LeastSquaresData(Matrix(0, 3), Vector(0)), std::invalid_argument);
  EXPECT_THROW(LeastSquaresData(Matrix::Identity(2, 2), Vector::Zero(3)), std::invalid_argument);
  auto data = std::make_shared<const LeastSquaresData>(Matrix::Identity(2, 2), Vector::Zero(2));
  EXPECT_THROW(least_squares_oracle(data).value(Vector::Zero(3)), std::invalid_argument);
}

TEST(SoftThreshold, Basics) {
  EXPECT_EQ(soft_threshold(Vector::Zero(2), 1.0), Vector::Zero(2));
  const Vector x = soft_threshold(Vector{{3.0, -0.5}}, 1.0);
  EXPECT_DOUBLE_EQ(x[0], 2.0);
  EXPECT_DOUBLE_EQ(x[1], 0.0);
  EXPECT_THROW(soft_threshold(Vector::Zero(2), 0.0), std::invalid_argument);
  EXPECT_THROW(soft_threshold(Vector::Zero(2), -1.0), std::invalid_argument);
}

TEST(SoftThreshold, BeatsGridSearch) {
  RandomStream rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng.below(4));
    Vector z(n);
    for (auto& v : z) v = rng.uniform(-3.0, 3.0);
    const double t = rng.uniform(0.05, 2.0);
    auto f = [&](const Eigen::VectorXd& x) { return oracle::l1_prox_objective(x, z, t); };
    const double r = z.cwiseAbs().maxCoeff();
    const auto grid = oracle::grid_search(f, n, r, n <= 2 ? 401 : (n == 3 ? 81 : 31));
    EXPECT_LE(f(soft_threshold(z, t)), grid.value + 1e-6);
  }
}

TEST(ProxL1MinusL2, EdgeCases) {
  EXPECT_EQ(prox_l1_minus_l2(Vector::Zero(3), 0.5), Vector::Zero(3));
  RandomStream rng(2);
  for (int i = 0; i < 20; ++i) {
    const Vector z{{rng.uniform(-5.0, 5.0)}};
    EXPECT_EQ(prox_l1_minus_l2(z, rng.uniform(0.01, 10.0)), z);
  }
  EXPECT_THROW(prox_l1_minus_l2(Vector::Ones(2), 0.0), std::invalid_argument);
}

TEST(ProxL1MinusL2, SingleSupportIsIdentity) {
  RandomStream rng(4);
  for (int i = 0; i < 50; ++i) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng.below(2));
    Vector z = Vector::Zero(n);
    z[static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)))] = rng.uniform(-4.0, 4.0);
    const double t = rng.uniform(0.01, 5.0);
    const Vector x = prox_l1_minus_l2(z, t);
    EXPECT_TRUE(x.isApprox(z, 1e-14)) << z.transpose();
    const auto bf = oracle::l12_brute_force(z, t, 1000 + static_cast<std::uint64_t>(i));
    EXPECT_LE(oracle::l12_prox_objective(x, z, t), bf.value + 1e-6);
  }
}

TEST(ProxL1MinusL2, TiesPickLowestIndex) {
  const Vector x = prox_l1_minus_l2(Vector{{0.5, -0.5, 0.2}}, 1.0);
  EXPECT_EQ(x, (Vector{{0.5, 0.0, 0.0}}));
}

TEST(ProxL1MinusL2, MatchesBruteForce) {
  RandomStream rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng.below(2));
    Vector z(n);
    for (auto& v : z) v = rng.uniform(-3.0, 3.0);
    const double t = rng.uniform(0.05, 3.0);
    const Vector x = prox_l1_minus_l2(z, t);
    const auto bf = oracle::l12_brute_force(z, t, static_cast<std::uint64_t>(trial));
    EXPECT_LE(oracle::l12_prox_objective(x, z, t), bf.value + 1e-6)
        << "z = " << z.transpose() << " t = " << t;
  }
}

TEST(ProxL1MinusL2, OutputBounded) {
  RandomStream rng(37);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng.below(8));
    Vector z(n);
    for (auto& v : z) v = 3.0 * rng.gaussian();
    const double t = rng.uniform(0.01, 4.0);
    const double bound = z.cwiseAbs().maxCoeff() + t + 1e-12;
    EXPECT_LE(prox_l1_minus_l2(z, t).cwiseAbs().maxCoeff(), bound);
    EXPECT_LE(soft_threshold(z, t).cwiseAbs().maxCoeff(), bound);
  }
}

TEST(NormSubgradient, Values) {
  EXPECT_EQ(norm_subgradient(Vector::Zero(3), 0.1), Vector::Zero(3));
  const Vector g = norm_subgradient(Vector{{3.0, 4.0}}, 1.0);
  EXPECT_DOUBLE_EQ(g[0], 0.6);
  EXPECT_DOUBLE_EQ(g[1], 0.8);
  EXPECT_THROW(norm_subgradient(Vector{{std::nan("")}}, 1.0), OracleError);
}

TEST(NormSubgradient, ConvexityInequality) {
  RandomStream rng(41);
  const double lambda = 0.37;
  for (int trial = 0; trial < 100; ++trial) {
    Vector x(4), y(4);
    for (auto& v : x) v = rng.gaussian();
    for (auto& v : y) v = rng.gaussian();
    const double lhs = lambda * y.norm();
    const double rhs = lambda * x.norm() + norm_subgradient(x, lambda).dot(y - x);
    EXPECT_GE(lhs, rhs - 1e-12);
  }
}
