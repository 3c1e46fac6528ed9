#pragma once

// Symmetric eigensolvers for graph Laplacians and the Laplacian eigenmaps
// embedding built on them.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "normlap/error.hpp"
#include "normlap/laplacian.hpp"

namespace normlap {

struct EigenPairs {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // one eigenvector per column
};

/// Flips each column so that its first entry of (numerically) largest
/// magnitude is positive.
inline void normalize_signs(Eigen::MatrixXd& vectors) {
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    const double m = vectors.col(c).cwiseAbs().maxCoeff();
    if (m == 0.0) continue;
    for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
      if (std::abs(vectors(r, c)) >= m * (1.0 - 1e-9)) {
        if (vectors(r, c) < 0.0) vectors.col(c) *= -1.0;
        break;
      }
    }
  }
}

namespace detail {

// Orders pairs by eigenvalue (descending); near-ties are ordered by the
// first differing entry of the sign-normalized eigenvectors.
inline EigenPairs sort_pairs(const Eigen::VectorXd& vals, Eigen::MatrixXd vecs, double tie_tol) {
  normalize_signs(vecs);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(vals.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (std::abs(vals[a] - vals[b]) > tie_tol) return vals[a] > vals[b];
    for (Eigen::Index r = 0; r < vecs.rows(); ++r) {
      if (std::abs(vecs(r, a) - vecs(r, b)) > 1e-10) return vecs(r, a) > vecs(r, b);
    }
    return false;
  });
  EigenPairs out;
  out.values.resize(vals.size());
  out.vectors.resize(vecs.rows(), vecs.cols());
  for (std::size_t i = 0; i < order.size(); ++i) {
    out.values[static_cast<Eigen::Index>(i)] = vals[order[i]];
    out.vectors.col(static_cast<Eigen::Index>(i)) = vecs.col(order[i]);
  }
  return out;
}

inline void check_residuals(const GraphLaplacian& L, const EigenPairs& p, double tol) {
  const double scale = std::max(L.inf_norm(), 1e-300);
  for (Eigen::Index i = 0; i < p.values.size(); ++i) {
    const Eigen::VectorXd r = L.apply(p.vectors.col(i)) - p.values[i] * p.vectors.col(i);
    if (r.norm() > tol * scale) {
      throw ConvergenceError("eig_symmetric: residual " + std::to_string(r.norm()) +
                             " exceeds tolerance for eigenpair " + std::to_string(i));
    }
  }
}

// Lanczos with full reorthogonalization for the k algebraically largest
// eigenpairs of a sparse symmetric matrix.
inline EigenPairs lanczos_largest(const Eigen::SparseMatrix<double>& A, int k, double tol,
                                  std::uint64_t seed = 2020) {
  const Eigen::Index n = A.rows();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  auto random_unit_orthogonal = [&](const Eigen::MatrixXd& V, Eigen::Index cols) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = gauss(rng);
    for (int pass = 0; pass < 2; ++pass)
      if (cols > 0) v -= V.leftCols(cols) * (V.leftCols(cols).transpose() * v);
    return Eigen::VectorXd(v / v.norm());
  };

  double anorm = 0.0;
  {
    Eigen::VectorXd rs = Eigen::VectorXd::Zero(n);
    for (int c = 0; c < A.outerSize(); ++c)
      for (Eigen::SparseMatrix<double>::InnerIterator it(A, c); it; ++it) rs[it.row()] += std::abs(it.value());
    anorm = std::max(rs.maxCoeff(), 1e-300);
  }

  const Eigen::Index max_m = n;
  Eigen::MatrixXd V(n, std::min<Eigen::Index>(max_m, 64));
  std::vector<double> alpha, beta;
  V.col(0) = random_unit_orthogonal(V, 0);
  Eigen::Index m = 0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
  while (true) {
    Eigen::VectorXd w = A * V.col(m);
    const double a = V.col(m).dot(w);
    alpha.push_back(a);
    for (int pass = 0; pass < 2; ++pass) w -= V.leftCols(m + 1) * (V.leftCols(m + 1).transpose() * w);
    double b = w.norm();
    ++m;

    const bool full = m >= max_m;
    if (m >= k && (m % 8 == 0 || full || b < 1e-12 * anorm)) {
      Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
      for (Eigen::Index i = 0; i < m; ++i) {
        T(i, i) = alpha[static_cast<std::size_t>(i)];
        if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[static_cast<std::size_t>(i)];
      }
      tri.compute(T);
      bool done = true;
      for (int j = 0; j < k; ++j) {
        const double resid = std::abs(b * tri.eigenvectors()(m - 1, m - 1 - j));
        if (resid > 0.1 * tol * anorm) done = false;
      }
      if (done || full) {
        Eigen::VectorXd vals(k);
        Eigen::MatrixXd vecs(n, k);
        for (int j = 0; j < k; ++j) {
          vals[j] = tri.eigenvalues()[m - 1 - j];
          vecs.col(j) = V.leftCols(m) * tri.eigenvectors().col(m - 1 - j);
          vecs.col(j).normalize();
        }
        return sort_pairs(vals, vecs, 1e-10 * anorm);
      }
    }
    if (m >= V.cols()) V.conservativeResize(n, std::min<Eigen::Index>(max_m, 2 * V.cols()));
    if (b < 1e-12 * anorm) {
      // Invariant subspace found: restart with a fresh orthogonal direction.
      beta.push_back(0.0);
      V.col(m) = random_unit_orthogonal(V, m);
    } else {
      beta.push_back(b);
      V.col(m) = w / b;
    }
  }
}

}  // namespace detail

/// Dense solve (n <= 2000) or Lanczos above that / for sparse input.
struct EigOptions {
  std::size_t dense_max_n = 2000;
  double residual_tol = 1e-8;
};

/// The k algebraically largest eigenpairs (those closest to 0 for a
/// negative semi-definite Laplacian), eigenvalues in descending order.
inline EigenPairs eig_symmetric(const GraphLaplacian& L, int k, const EigOptions& opts = {}) {
  const auto n = static_cast<Eigen::Index>(L.n());
  if (k < 1 || k > n) throw InvalidArgument("eig_symmetric: need 1 <= k <= n");
  const double scale = std::max(L.inf_norm(), 1e-300);
  EigenPairs out;
  if (!L.is_sparse && static_cast<std::size_t>(n) <= opts.dense_max_n) {
    if ((L.dense - L.dense.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
      throw InvalidArgument("eig_symmetric: matrix is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L.dense);
    if (es.info() != Eigen::Success) throw ConvergenceError("eig_symmetric: dense solver failed");
    Eigen::VectorXd vals = es.eigenvalues().tail(k).reverse();
    Eigen::MatrixXd vecs = es.eigenvectors().rightCols(k).rowwise().reverse();
    out = detail::sort_pairs(vals, vecs, 1e-10 * scale);
  } else {
    Eigen::SparseMatrix<double> A = L.is_sparse ? L.sparse : L.dense.sparseView();
    out = detail::lanczos_largest(A, k, opts.residual_tol);
  }
  detail::check_residuals(L, out, opts.residual_tol);
  return out;
}

struct Embedding {
  std::size_t n = 0;
  std::size_t m = 0;
  Eigen::MatrixXd coords;      // n x m, columns phi_1..phi_m
  Eigen::VectorXd eigenvalues;  // lambda_0..lambda_m, descending
  bool disconnected = false;    // zero eigenvalue has multiplicity > 1
};

/// Laplacian eigenmaps: drops the constant eigenvector and maps sample i to
/// (phi_1(i), ..., phi_m(i)).
inline Embedding embed(const GraphLaplacian& L, int m, const EigOptions& opts = {}) {
  const auto n = static_cast<int>(L.n());
  if (m < 1 || m > n - 1) throw InvalidArgument("embed: need 1 <= m <= n-1");
  EigenPairs pairs = eig_symmetric(L, m + 1, opts);
  Embedding e;
  e.n = static_cast<std::size_t>(n);
  e.m = static_cast<std::size_t>(m);
  e.eigenvalues = pairs.values;
  e.coords = pairs.vectors.rightCols(m);
  const double scale = std::max(L.inf_norm(), 1e-300);
  e.disconnected = std::abs(pairs.values[1]) <= 1e-8 * scale;
  if (e.disconnected) {
    // Project the constant vector out of the leading eigenvectors.
    const Eigen::VectorXd one = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
    Eigen::MatrixXd basis = pairs.vectors.leftCols(m + 1);
    basis -= one * (one.transpose() * basis);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(basis, Eigen::ComputeThinU);
    e.coords = svd.matrixU().leftCols(m);
    normalize_signs(e.coords);
  }
  return e;
}

namespace detail {

// Fisher-Lee circular-circular correlation,
// sum_{i<j} sin(a_i - a_j) sin(b_i - b_j) / sqrt(sum sin^2(a_i - a_j) * sum sin^2(b_i - b_j)),
// evaluated in O(n) through the expanded trigonometric sums.
inline double circular_correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::ArrayXd ca = a.array().cos(), sa = a.array().sin();
  const Eigen::ArrayXd cb = b.array().cos(), sb = b.array().sin();
  const double n = static_cast<double>(a.size());
  const double A = (ca * cb).sum(), B = (sa * sb).sum(), C = (ca * sb).sum(), D = (sa * cb).sum();
  const double E = (2.0 * a.array()).cos().sum(), F = (2.0 * a.array()).sin().sum();
  const double G = (2.0 * b.array()).cos().sum(), H = (2.0 * b.array()).sin().sum();
  const double den = (n * n - E * E - F * F) * (n * n - G * G - H * H);
  return den > 0.0 ? 4.0 * (A * B - C * D) / std::sqrt(den) : 0.0;
}

}  // namespace detail

/// Circular correlation between the embedding angles atan2(phi_2, phi_1) and
/// the ground-truth angles (radians), maximized over the orientation flip.
/// Reversing the orientation negates the coefficient, so the maximum is its
/// absolute value.
inline double circular_score(const Embedding& e, const Eigen::VectorXd& true_angles) {
  if (e.m != 2 || e.coords.cols() != 2) throw InvalidArgument("circular_score: embedding must be 2-D");
  if (true_angles.size() != e.coords.rows()) throw InvalidArgument("circular_score: length mismatch");
  if (e.coords.rowwise().norm().maxCoeff() <= 1e-12) {
    throw InvalidArgument("circular_score: degenerate embedding (all points at origin)");
  }
  Eigen::VectorXd est(e.coords.rows());
  for (Eigen::Index i = 0; i < est.size(); ++i) est[i] = std::atan2(e.coords(i, 1), e.coords(i, 0));
  return std::abs(detail::circular_correlation(est, true_angles));
}

}  // namespace normlap
