#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "normlap/laplacian.hpp"
#include "normlap/spectral.hpp"
#include "support/oracles.hpp"

using namespace normlap;

namespace {

GraphLaplacian random_laplacian(oracle::Gen& g, int n) {
  const PointCloud pts = g.points(n, 2);
  AffinityOptions opts;
  opts.truncation = Truncation::never;
  return graph_laplacian(gaussian_affinity(pairwise_distances(pts, Norm::euclidean(2)), 0.8, opts));
}

}  // namespace

TEST(Spectral, ZeroMatrix) {
  const GraphLaplacian L = graph_laplacian(Eigen::MatrixXd::Identity(3, 3));
  const EigenPairs p = eig_symmetric(L, 3);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(p.values[i], 0.0, 1e-15);
}

TEST(Spectral, PathGraphTwoNodes) {
  Eigen::MatrixXd W(2, 2);
  W << 0, 1, 1, 0;
  const EigenPairs p = eig_symmetric(graph_laplacian(W), 2);
  EXPECT_NEAR(p.values[0], 0.0, 1e-14);
  EXPECT_NEAR(p.values[1], -2.0, 1e-14);
  EXPECT_NEAR(std::abs(p.vectors(0, 1)), 1 / std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(p.vectors(0, 1), -p.vectors(1, 1), 1e-14);
}

TEST(Spectral, CycleGraphMatchesCirculantOracle) {
  for (int n : {5, 8, 13}) {
    const EigenPairs p = eig_symmetric(graph_laplacian(oracle::cycle_affinity(n)), n);
    const Eigen::VectorXd ref = oracle::cycle_eigenvalues(n);
    for (int i = 0; i < n; ++i) EXPECT_NEAR(p.values[i], ref[i], 1e-12);
  }
}

TEST(Spectral, ArgumentErrors) {
  const GraphLaplacian L = graph_laplacian(oracle::cycle_affinity(4));
  EXPECT_THROW(eig_symmetric(L, 5), InvalidArgument);
  EXPECT_THROW(eig_symmetric(L, 0), InvalidArgument);
  GraphLaplacian bad = L;
  bad.dense(0, 1) += 0.5;
  EXPECT_THROW(eig_symmetric(bad, 2), InvalidArgument);
}

TEST(Spectral, CycleEmbeddingIsARegularPolygon) {
  const Embedding e = embed(graph_laplacian(oracle::cycle_affinity(4)), 2);
  ASSERT_EQ(e.coords.rows(), 4);
  const double r0 = e.coords.row(0).norm();
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(e.coords.row(i).norm(), r0, 1e-12);
  for (int i = 0; i < 4; ++i) {
    const Eigen::Vector2d a = e.coords.row(i), b = e.coords.row((i + 1) % 4);
    EXPECT_NEAR(std::abs(a.dot(b)), 0.0, 1e-12);
  }
  EXPECT_FALSE(e.disconnected);
}

TEST(Spectral, DisjointCliquesSetWarningFlag) {
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(6, 6);
  W.topLeftCorner(3, 3).setOnes();
  W.bottomRightCorner(3, 3).setOnes();
  const Embedding e = embed(graph_laplacian(W), 1);
  EXPECT_TRUE(e.disconnected);
  EXPECT_NEAR(e.coords.col(0).sum(), 0.0, 1e-8);
}

TEST(Spectral, CircularScoreExamples) {
  oracle::Gen g(41);
  const int n = 200;
  Eigen::VectorXd ang(n);
  Embedding e;
  e.n = n;
  e.m = 2;
  e.coords.resize(n, 2);
  for (int i = 0; i < n; ++i) {
    ang[i] = g.uniform(0, 2 * std::numbers::pi);
    e.coords(i, 0) = std::cos(ang[i]);
    e.coords(i, 1) = std::sin(ang[i]);
  }
  EXPECT_NEAR(circular_score(e, ang), 1.0, 1e-12);
  e.coords.col(1) *= -1.0;
  EXPECT_NEAR(circular_score(e, ang), 1.0, 1e-12);
  for (int i = 0; i < n; ++i) {
    const double r = g.uniform(0, 2 * std::numbers::pi);
    e.coords(i, 0) = std::cos(r);
    e.coords(i, 1) = std::sin(r);
  }
  EXPECT_LT(circular_score(e, ang), 0.5);
  e.coords.setZero();
  EXPECT_THROW(circular_score(e, ang), InvalidArgument);
  e.coords.resize(n, 3);
  e.m = 3;
  EXPECT_THROW(circular_score(e, ang), InvalidArgument);
}

TEST(SpectralProperty, EmbeddingOrthonormalAndOrthogonalToConstants) {
  oracle::Gen g(42);
  for (int trial = 0; trial < 15; ++trial) {
    const int n = g.integer(6, 64), m = g.integer(1, 3);
    const Embedding e = embed(random_laplacian(g, n), m);
    const Eigen::MatrixXd G = e.coords.transpose() * e.coords;
    EXPECT_LE((G - Eigen::MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff(), 1e-10);
    for (int j = 0; j < m; ++j) EXPECT_NEAR(e.coords.col(j).sum(), 0.0, 1e-8);
  }
}

TEST(SpectralProperty, DenseSolverMatchesJacobiOracle) {
  oracle::Gen g(43);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = g.integer(2, 64);
    const GraphLaplacian L = random_laplacian(g, n);
    const int k = g.integer(1, n);
    const EigenPairs p = eig_symmetric(L, k);
    const Eigen::VectorXd ref = oracle::jacobi_eigenvalues(L.to_dense());
    for (int i = 0; i < k; ++i) EXPECT_NEAR(p.values[i], ref[i], 1e-10 * std::max(1.0, L.inf_norm()));
    for (int i = 0; i < k; ++i) {
      const Eigen::VectorXd r = L.apply(p.vectors.col(i)) - p.values[i] * p.vectors.col(i);
      EXPECT_LE(r.norm(), 1e-9 * std::max(1.0, L.inf_norm()));
    }
  }
}

TEST(SpectralProperty, IterativeSolverMatchesDense) {
  oracle::Gen g(44);
  for (int trial = 0; trial < 4; ++trial) {
    const int n = g.integer(30, 64);
    const GraphLaplacian L = random_laplacian(g, n);
    EigOptions iterative;
    iterative.dense_max_n = 0;
    const EigenPairs a = eig_symmetric(L, 3), b = eig_symmetric(L, 3, iterative);
    for (int i = 0; i < 3; ++i) {
      EXPECT_NEAR(a.values[i], b.values[i], 1e-8 * L.inf_norm());
      EXPECT_NEAR(std::abs(a.vectors.col(i).dot(b.vectors.col(i))), 1.0, 1e-6);
    }
  }
}
