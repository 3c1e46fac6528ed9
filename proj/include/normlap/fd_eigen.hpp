#pragma once

// Periodic finite-difference discretization of second-order operators
// a(theta) f'' + b(theta) f' on the circle, and a shift-invert eigensolver for
// the eigenpairs of smallest magnitude.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "normlap/error.hpp"
#include "normlap/limit_op.hpp"
#include "normlap/spectral.hpp"

namespace normlap {

/// Cyclic tridiagonal operator on the grid theta_k = 2 pi k / n.
/// (A f)_k = lower_k f_{k-1} + diag_k f_k + upper_k f_{k+1}, indices mod n.
struct FDOperator {
  std::size_t n = 0;
  Eigen::VectorXd lower, diag, upper;
  Eigen::VectorXd theta;
  double w1 = 0.0, w2 = 0.0;  // metadata when built from the circle operator

  double step() const { return 2.0 * std::numbers::pi / static_cast<double>(n); }

  /// Differences against f_k are formed first so that constants map to 0 exactly.
  Eigen::VectorXd apply(const Eigen::VectorXd& f) const {
    detail::require(static_cast<std::size_t>(f.size()) == n, "FDOperator::apply: length mismatch");
    const auto N = static_cast<Eigen::Index>(n);
    Eigen::VectorXd out(N);
    for (Eigen::Index k = 0; k < N; ++k) {
      const double fm = f[(k + N - 1) % N], fp = f[(k + 1) % N];
      out[k] = lower[k] * (fm - f[k]) + upper[k] * (fp - f[k]);
    }
    return out;
  }

  Eigen::MatrixXd apply(const Eigen::MatrixXd& F) const {
    Eigen::MatrixXd out(F.rows(), F.cols());
    for (Eigen::Index c = 0; c < F.cols(); ++c) out.col(c) = apply(Eigen::VectorXd(F.col(c)));
    return out;
  }

  double inf_norm() const {
    return (lower.cwiseAbs() + diag.cwiseAbs() + upper.cwiseAbs()).maxCoeff();
  }

  Eigen::SparseMatrix<double> to_sparse() const {
    const auto N = static_cast<Eigen::Index>(n);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(3 * n);
    for (Eigen::Index k = 0; k < N; ++k) {
      trip.emplace_back(k, (k + N - 1) % N, lower[k]);
      trip.emplace_back(k, k, diag[k]);
      trip.emplace_back(k, (k + 1) % N, upper[k]);
    }
    Eigen::SparseMatrix<double> A(N, N);
    A.setFromTriplets(trip.begin(), trip.end());
    return A;
  }
};

/// Row k: first(theta_k) (f_{k+1} - f_{k-1}) / (2 dtheta)
///      + second(theta_k) (f_{k+1} - 2 f_k + f_{k-1}) / dtheta^2.
inline FDOperator assemble_fd_operator(const std::function<double(double)>& first_coeff,
                                       const std::function<double(double)>& second_coeff, std::size_t n) {
  detail::require(n >= 4, "assemble_fd_operator: n must be >= 4");
  FDOperator op;
  op.n = n;
  const auto N = static_cast<Eigen::Index>(n);
  op.lower.resize(N);
  op.diag.resize(N);
  op.upper.resize(N);
  op.theta.resize(N);
  const double h = op.step();
  for (Eigen::Index k = 0; k < N; ++k) {
    const double th = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    const double b = first_coeff(th), a = second_coeff(th);
    op.theta[k] = th;
    op.lower[k] = a / (h * h) - b / (2.0 * h);
    op.upper[k] = a / (h * h) + b / (2.0 * h);
    op.diag[k] = -(op.lower[k] + op.upper[k]);
  }
  return op;
}

/// FD discretization of the weighted-l1 circle operator.
inline FDOperator assemble_circle_operator(double w1, double w2, std::size_t n) {
  detail::require(w1 > 0.0 && w2 > 0.0, "assemble_circle_operator: weights must be positive");
  FDOperator op = assemble_fd_operator(
      [=](double th) { return circle_limit_operator(th, w1, w2, 1.0, 0.0); },
      [=](double th) { return circle_limit_operator(th, w1, w2, 0.0, 1.0); }, n);
  op.w1 = w1;
  op.w2 = w2;
  return op;
}

/// LU factorization of the cyclic tridiagonal matrix A - shift*I using the
/// Thomas algorithm plus a Sherman-Morrison correction for the corners.
class CyclicTridiagonalSolver {
 public:
  CyclicTridiagonalSolver(const FDOperator& op, double shift) : n_(static_cast<Eigen::Index>(op.n)) {
    const Eigen::Index N = n_;
    detail::require(N >= 3, "cyclic solver: n must be >= 3");
    const double alpha = op.upper[N - 1];  // row n-1, col 0
    const double beta = op.lower[0];       // row 0, col n-1
    Eigen::VectorXd b = op.diag.array() - shift;
    gamma_ = -b[0];
    if (gamma_ == 0.0) gamma_ = 1.0;
    b[0] -= gamma_;
    b[N - 1] -= alpha * beta / gamma_;
    sub_ = op.lower;
    sup_ = op.upper;
    // Thomas forward elimination on the modified tridiagonal system.
    cp_.resize(N);
    denom_.resize(N);
    const double scale = op.inf_norm() + std::abs(shift);
    double d = b[0];
    check_pivot(d, scale);
    denom_[0] = d;
    cp_[0] = sup_[0] / d;
    for (Eigen::Index i = 1; i < N; ++i) {
      d = b[i] - sub_[i] * cp_[i - 1];
      check_pivot(d, scale);
      denom_[i] = d;
      cp_[i] = i + 1 < N ? sup_[i] / d : 0.0;
    }
    u_ = Eigen::VectorXd::Zero(N);
    u_[0] = gamma_;
    u_[N - 1] = alpha;
    v0_ = 1.0;
    vn_ = beta / gamma_;
    z_ = solve_tridiagonal(u_);
    const double den = 1.0 + v0_ * z_[0] + vn_ * z_[N - 1];
    if (std::abs(den) < 1e-14) {
      throw ConvergenceError("shift-invert: shifted operator is singular; choose a different shift");
    }
    sm_den_ = den;
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& r) const {
    Eigen::VectorXd y = solve_tridiagonal(r);
    const double fact = (v0_ * y[0] + vn_ * y[n_ - 1]) / sm_den_;
    y -= fact * z_;
    return y;
  }

 private:
  static void check_pivot(double d, double scale) {
    if (!(std::abs(d) > 1e-14 * scale)) {
      throw ConvergenceError("shift-invert: zero pivot in factorization; choose a different shift");
    }
  }

  Eigen::VectorXd solve_tridiagonal(const Eigen::VectorXd& r) const {
    Eigen::VectorXd x(n_);
    x[0] = r[0] / denom_[0];
    for (Eigen::Index i = 1; i < n_; ++i) x[i] = (r[i] - sub_[i] * x[i - 1]) / denom_[i];
    for (Eigen::Index i = n_ - 2; i >= 0; --i) x[i] -= cp_[i] * x[i + 1];
    return x;
  }

  Eigen::Index n_;
  double gamma_ = 0.0;
  Eigen::VectorXd sub_, sup_, cp_, denom_, u_, z_;
  double v0_ = 0.0, vn_ = 0.0, sm_den_ = 1.0;
};

struct FDEigenOptions {
  double shift = 1.0;
  int max_iterations = 5000;
  double residual_tol = 1e-7;     // relative to the operator's infinity norm
  double stagnation_tol = 1e-12;  // relative change of Ritz values between sweeps
  int block_size = 0;             // 0 picks max(2k + 6, k + 10)
};

struct FDEigenResult {
  Eigen::VectorXd eigenvalues;  // ordered by increasing magnitude
  Eigen::MatrixXd eigenfunctions;  // n x k, unit l2 norm, sign-normalized
  Eigen::VectorXd residuals;
  double max_imag_part = 0.0;
  int iterations = 0;
};

/// The k eigenpairs of smallest magnitude, found by block subspace iteration
/// on (A - shift I)^{-1} with Rayleigh-Ritz extraction on A.
inline FDEigenResult smallest_magnitude_eigs(const FDOperator& op, int k, const FDEigenOptions& opts = {}) {
  const auto N = static_cast<Eigen::Index>(op.n);
  detail::require(k >= 1 && k < N, "smallest_magnitude_eigs: need 1 <= k < n");
  const int p = static_cast<int>(std::min<Eigen::Index>(
      N, opts.block_size > 0 ? opts.block_size : std::max(2 * k + 6, k + 10)));
  CyclicTridiagonalSolver solver(op, opts.shift);

  std::mt19937_64 rng(2020);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd V(N, p);
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index i = 0; i < N; ++i) V(i, j) = gauss(rng);
  auto orthonormalize = [&](Eigen::MatrixXd& M) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(M);
    M = qr.householderQ() * Eigen::MatrixXd::Identity(N, p);
  };
  orthonormalize(V);

  const double anorm = op.inf_norm();
  Eigen::VectorXd prev_vals = Eigen::VectorXd::Constant(k, std::numeric_limits<double>::quiet_NaN());
  FDEigenResult res;
  for (int it = 1; it <= opts.max_iterations; ++it) {
    for (Eigen::Index j = 0; j < p; ++j) V.col(j) = solver.solve(V.col(j));
    orthonormalize(V);
    const Eigen::MatrixXd AV = op.apply(V);
    const Eigen::MatrixXd H = V.transpose() * AV;
    Eigen::EigenSolver<Eigen::MatrixXd> es(H);
    if (es.info() != Eigen::Success) throw ConvergenceError("smallest_magnitude_eigs: Ritz problem failed");
    const Eigen::VectorXcd lam = es.eigenvalues();
    std::vector<int> order(static_cast<std::size_t>(p));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      const double ma = std::abs(lam[a]), mb = std::abs(lam[b]);
      if (ma != mb) return ma < mb;
      return lam[a].imag() > lam[b].imag();
    });

    Eigen::VectorXd vals(k);
    Eigen::MatrixXd vecs(N, k);
    Eigen::VectorXd resid(k);
    double max_imag = 0.0;
    bool residual_ok = true;
    for (int j = 0; j < k; ++j) {
      const int idx = order[static_cast<std::size_t>(j)];
      vals[j] = lam[idx].real();
      max_imag = std::max(max_imag, std::abs(lam[idx].imag()));
      Eigen::VectorXd y = es.eigenvectors().col(idx).real();
      if (y.norm() == 0.0) y = es.eigenvectors().col(idx).imag();
      Eigen::VectorXd x = V * y;
      x.normalize();
      vecs.col(j) = x;
      resid[j] = (op.apply(x) - vals[j] * x).norm();
      if (resid[j] > opts.residual_tol * anorm) residual_ok = false;
    }
    bool stagnant = true;
    for (int j = 0; j < k; ++j) {
      if (!(std::abs(vals[j] - prev_vals[j]) <= opts.stagnation_tol * (1.0 + std::abs(vals[j])))) stagnant = false;
    }
    prev_vals = vals;
    if (residual_ok && stagnant) {
      normalize_signs(vecs);
      res.eigenvalues = vals;
      res.eigenfunctions = vecs;
      res.residuals = resid;
      res.max_imag_part = max_imag;
      res.iterations = it;
      return res;
    }
  }
  throw ConvergenceError("smallest_magnitude_eigs: no convergence after " + std::to_string(opts.max_iterations) +
                         " iterations (block size " + std::to_string(p) + ")");
}

/// Number of sign changes of a periodic grid function, ignoring entries
/// with magnitude below rel_floor * max|f|.
inline int count_sign_changes(const Eigen::VectorXd& f, double rel_floor = 1e-8) {
  const double floor = rel_floor * f.cwiseAbs().maxCoeff();
  std::vector<int> signs;
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    if (std::abs(f[i]) > floor) signs.push_back(f[i] > 0.0 ? 1 : -1);
  }
  if (signs.size() < 2) return 0;
  int changes = 0;
  for (std::size_t i = 0; i < signs.size(); ++i) {
    if (signs[i] != signs[(i + 1) % signs.size()]) ++changes;
  }
  return changes;
}

}  // namespace normlap
