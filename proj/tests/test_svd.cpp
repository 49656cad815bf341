#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace poselsa;

namespace {

Eigen::MatrixXd random_matrix(std::mt19937& rng, Eigen::Index m, Eigen::Index n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd a(m, n);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = u(rng);
  return a;
}

double residual_norm(const Eigen::VectorXd& s, Eigen::Index k) {
  return std::sqrt(s.tail(s.size() - k).squaredNorm());
}

}  // namespace

TEST(Svd, Identity) {
  const auto f = full_svd(Eigen::MatrixXd::Identity(3, 3));
  EXPECT_TRUE(f.sigma.isApprox(Eigen::VectorXd::Ones(3)));
  EXPECT_TRUE(f.reconstruct().isApprox(Eigen::MatrixXd::Identity(3, 3)));
}

TEST(Svd, RankOne) {
  Eigen::VectorXd a(4), b(3);
  a << 1, 2, -1, 0.5;
  b << 3, 0, 4;
  const Eigen::MatrixXd m = a * b.transpose();
  const auto f = truncated_svd(m, 1);
  EXPECT_NEAR(f.sigma(0), a.norm() * b.norm(), 1e-12);
  EXPECT_LT((m - f.reconstruct()).norm(), 1e-12);
}

TEST(Svd, MatchesEigenOracleOnRandomMatrices) {
  std::mt19937 rng(4242);
  std::uniform_int_distribution<int> dim(1, 20);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index m = dim(rng), n = std::min(dim(rng), 15);
    const auto a = random_matrix(rng, m, n);
    const auto f = full_svd(a);
    const Eigen::Index r = std::min(m, n);
    ASSERT_EQ(f.sigma.size(), r);
    EXPECT_LT((f.sigma - oracle::singular_values(a)).cwiseAbs().maxCoeff(), 1e-8) << m << "x" << n;
    EXPECT_LT((f.u.transpose() * f.u - Eigen::MatrixXd::Identity(r, r)).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LT((f.v.transpose() * f.v - Eigen::MatrixXd::Identity(r, r)).cwiseAbs().maxCoeff(), 1e-8);
    for (Eigen::Index k = 1; k <= r; ++k) {
      EXPECT_NEAR((a - f.truncated(k).reconstruct()).norm(), residual_norm(f.sigma, k), 1e-8);
    }
  }
}

TEST(Svd, SigmaDescendingAndResidualMonotone) {
  std::mt19937 rng(5);
  const auto a = random_matrix(rng, 12, 9);
  const auto f = full_svd(a);
  double last = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 1; k <= f.rank(); ++k) {
    EXPECT_LE(f.sigma(k - 1), k > 1 ? f.sigma(k - 2) : last);
    const double r = (a - f.truncated(k).reconstruct()).norm();
    EXPECT_LE(r, last + 1e-12);
    last = r;
  }
}

TEST(Svd, RankDeficientStillOrthonormal) {
  std::mt19937 rng(11);
  Eigen::MatrixXd a = random_matrix(rng, 8, 5);
  a.col(3) = a.col(0) + a.col(1);
  a.col(4).setZero();
  const auto f = full_svd(a);
  EXPECT_LT((f.u.transpose() * f.u - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((f.v.transpose() * f.v - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT(f.sigma(3), 1e-12);
  EXPECT_LT((a - f.reconstruct()).norm(), 1e-12);
}

TEST(Svd, MoreColumnsThanRows) {
  std::mt19937 rng(3);
  const auto a = random_matrix(rng, 4, 9);
  const auto f = full_svd(a);
  EXPECT_EQ(f.u.rows(), 4);
  EXPECT_EQ(f.v.rows(), 9);
  EXPECT_LT((f.sigma - oracle::singular_values(a)).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LT((a - f.reconstruct()).norm(), 1e-12);
}

TEST(Svd, SignsAreCanonicalAndDeterministic) {
  std::mt19937 rng(8);
  const auto a = random_matrix(rng, 7, 6);
  const auto f = full_svd(a);
  const auto g = full_svd(a);
  EXPECT_EQ(f.u, g.u);
  EXPECT_EQ(f.sigma, g.sigma);
  for (Eigen::Index j = 0; j < f.u.cols(); ++j) {
    Eigen::Index at;
    f.u.col(j).cwiseAbs().maxCoeff(&at);
    EXPECT_GT(f.u(at, j), 0.0);
  }
}

TEST(Svd, RejectsBadInput) {
  EXPECT_THROW(full_svd(Eigen::MatrixXd(0, 3)), Error);
  Eigen::MatrixXd a = Eigen::MatrixXd::Ones(2, 2);
  a(0, 1) = std::nan("");
  EXPECT_THROW(full_svd(a), Error);
  EXPECT_THROW(truncated_svd(Eigen::MatrixXd::Ones(3, 2), 3), Error);
  EXPECT_THROW(truncated_svd(Eigen::MatrixXd::Ones(3, 2), 0), Error);
}
