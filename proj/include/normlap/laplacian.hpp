#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "normlap/error.hpp"
#include "normlap/norms.hpp"

namespace normlap {

/// n samples in R^D, one sample per row.
using PointCloud = Eigen::MatrixXd;

struct DistanceMatrix {
  Eigen::MatrixXd values;
  std::string norm_id;

  std::size_t n() const { return static_cast<std::size_t>(values.rows()); }
};

/// Builds a distance matrix from any symmetric pair functor dist(i, j),
/// evaluating each unordered pair once.
template <class DistFn>
DistanceMatrix pairwise_distances(std::size_t n, DistFn&& dist, std::string norm_id) {
  DistanceMatrix out;
  out.norm_id = std::move(norm_id);
  out.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = dist(i, j);
      if (!std::isfinite(d) || d < 0.0) throw InvalidArgument("pairwise_distances: invalid distance");
      out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = d;
      out.values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = d;
    }
  }
  return out;
}

inline DistanceMatrix pairwise_distances(const PointCloud& points, const Norm& norm) {
  if (norm.dim() != 0 && static_cast<std::size_t>(points.cols()) != norm.dim()) {
    throw InvalidArgument("pairwise_distances: point dimension does not match norm");
  }
  if (!points.allFinite()) throw InvalidArgument("pairwise_distances: non-finite input");
  Eigen::VectorXd diff(points.cols());
  return pairwise_distances(
      static_cast<std::size_t>(points.rows()),
      [&](std::size_t i, std::size_t j) {
        diff = points.row(static_cast<Eigen::Index>(i)) - points.row(static_cast<Eigen::Index>(j));
        return norm.eval(diff);
      },
      std::string(to_string(norm.kind())));
}

/// Gaussian kernel K_sigma(t) = exp(-t^2 / sigma^2).
inline double gaussian_kernel(double t, double sigma) { return std::exp(-(t * t) / (sigma * sigma)); }

enum class Truncation { automatic, never, always };

struct AffinityOptions {
  Truncation truncation = Truncation::automatic;
  double radius_factor = 3.0;        // entries with d > radius_factor * sigma are dropped
  std::size_t auto_sparse_above = 2000;
};

struct Affinity {
  double sigma = 0.0;
  bool is_sparse = false;
  Eigen::MatrixXd dense;
  Eigen::SparseMatrix<double> sparse;

  std::size_t n() const {
    return static_cast<std::size_t>(is_sparse ? sparse.rows() : dense.rows());
  }
};

inline Affinity gaussian_affinity(const DistanceMatrix& distances, double sigma,
                                  const AffinityOptions& opts = {}) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidArgument("gaussian_affinity: sigma must be > 0");
  const Eigen::Index n = distances.values.rows();
  const bool truncate = opts.truncation == Truncation::always ||
                        (opts.truncation == Truncation::automatic &&
                         static_cast<std::size_t>(n) > opts.auto_sparse_above);
  const double radius = opts.radius_factor * sigma;
  Affinity a;
  a.sigma = sigma;
  if (!truncate) {
    a.dense.resize(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < n; ++i)
        a.dense(i, j) = i == j ? 1.0 : gaussian_kernel(distances.values(i, j), sigma);
    return a;
  }
  a.is_sparse = true;
  std::vector<Eigen::Triplet<double>> trip;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d = distances.values(i, j);
      if (i == j) {
        trip.emplace_back(i, j, 1.0);
      } else if (!(d > radius)) {
        trip.emplace_back(i, j, gaussian_kernel(d, sigma));
      }
    }
  }
  a.sparse.resize(n, n);
  a.sparse.setFromTriplets(trip.begin(), trip.end());
  return a;
}

/// L = W - D with D the diagonal degree matrix; negative semi-definite.
struct GraphLaplacian {
  static constexpr const char* kConvention = "negative semi-definite";

  double sigma = std::numeric_limits<double>::quiet_NaN();
  bool is_sparse = false;
  Eigen::MatrixXd dense;
  Eigen::SparseMatrix<double> sparse;

  std::size_t n() const {
    return static_cast<std::size_t>(is_sparse ? sparse.rows() : dense.rows());
  }

  Eigen::VectorXd apply(const Eigen::VectorXd& f) const {
    detail::require(static_cast<std::size_t>(f.size()) == n(), "laplacian apply: length mismatch");
    return is_sparse ? Eigen::VectorXd(sparse * f) : Eigen::VectorXd(dense * f);
  }

  /// Max absolute row sum.
  double inf_norm() const {
    if (!is_sparse) return dense.cwiseAbs().rowwise().sum().maxCoeff();
    Eigen::VectorXd rs = Eigen::VectorXd::Zero(sparse.rows());
    for (int k = 0; k < sparse.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(sparse, k); it; ++it) rs[it.row()] += std::abs(it.value());
    return rs.maxCoeff();
  }

  Eigen::MatrixXd to_dense() const { return is_sparse ? Eigen::MatrixXd(sparse) : dense; }
};

inline GraphLaplacian graph_laplacian(const Eigen::MatrixXd& W,
                                      double sigma = std::numeric_limits<double>::quiet_NaN()) {
  detail::require(W.rows() == W.cols(), "graph_laplacian: W must be square");
  const double scale = std::max(1.0, W.cwiseAbs().maxCoeff());
  if ((W - W.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw InvalidArgument("graph_laplacian: W is not symmetric");
  }
  if ((W.array() < 0.0).any()) throw InvalidArgument("graph_laplacian: W has negative entries");
  GraphLaplacian L;
  L.sigma = sigma;
  L.dense = W;
  for (Eigen::Index i = 0; i < W.rows(); ++i) {
    double off = 0.0;
    for (Eigen::Index k = 0; k < W.cols(); ++k)
      if (k != i) off += W(i, k);
    L.dense(i, i) = -off;
  }
  return L;
}

inline GraphLaplacian graph_laplacian(const Eigen::SparseMatrix<double>& W,
                                      double sigma = std::numeric_limits<double>::quiet_NaN()) {
  detail::require(W.rows() == W.cols(), "graph_laplacian: W must be square");
  Eigen::SparseMatrix<double> Wt = W.transpose();
  const double asym = Eigen::MatrixXd(W - Wt).cwiseAbs().maxCoeff();
  if (asym > 1e-9) throw InvalidArgument("graph_laplacian: W is not symmetric");
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd off = Eigen::VectorXd::Zero(W.rows());
  for (int k = 0; k < W.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(W, k); it; ++it) {
      if (it.value() < 0.0) throw InvalidArgument("graph_laplacian: W has negative entries");
      if (it.row() != it.col()) {
        trip.emplace_back(it.row(), it.col(), it.value());
        off[it.row()] += it.value();
      }
    }
  }
  for (Eigen::Index i = 0; i < W.rows(); ++i) trip.emplace_back(i, i, -off[i]);
  GraphLaplacian L;
  L.sigma = sigma;
  L.is_sparse = true;
  L.sparse.resize(W.rows(), W.cols());
  L.sparse.setFromTriplets(trip.begin(), trip.end());
  return L;
}

inline GraphLaplacian graph_laplacian(const Affinity& W) {
  return W.is_sparse ? graph_laplacian(W.sparse, W.sigma) : graph_laplacian(W.dense, W.sigma);
}

namespace detail {

// Kahan-Babuska (Neumaier) compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace detail

/// (1/n) sum_i K_sigma(|x_i - p|_B) (f(x_i) - f(p)), summed in index order.
inline double apply_pointcloud_laplacian(const PointCloud& points, const Eigen::VectorXd& f_values,
                                         const Eigen::VectorXd& p, double f_at_p, const Norm& norm,
                                         double sigma) {
  if (f_values.size() != points.rows()) throw InvalidArgument("pointcloud laplacian: length mismatch");
  if (p.size() != points.cols()) throw InvalidArgument("pointcloud laplacian: base point dimension mismatch");
  if (!(sigma > 0.0)) throw InvalidArgument("pointcloud laplacian: sigma must be > 0");
  const Eigen::Index n = points.rows();
  detail::require(n > 0, "pointcloud laplacian: empty point cloud");
  detail::CompensatedSum acc;
  Eigen::VectorXd diff(points.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    diff = points.row(i).transpose() - p;
    acc.add(gaussian_kernel(norm.eval(diff), sigma) * (f_values[i] - f_at_p));
  }
  return acc.value() / static_cast<double>(n);
}

/// Kernel width and normalization for a sample of size n on a d-manifold:
/// sigma_n = n^{-1/(2d+4+alpha)}, c_n = Gamma((d+4)/2) sigma_n^{d+2}.
struct ScalingSchedule {
  std::size_t n = 1;
  int d = 1;
  double alpha = 1.0;
  double sigma_n = 1.0;
  double c_n = 1.0;

  /// Factor vol(M)/c_n that makes the point-cloud Laplacian comparable with
  /// the limiting operator.
  double rescale(double manifold_volume) const { return manifold_volume / c_n; }
};

inline ScalingSchedule scaling_schedule(std::size_t n, int d, double alpha) {
  detail::require(n >= 1, "scaling_schedule: n must be >= 1");
  detail::require(d >= 1, "scaling_schedule: d must be >= 1");
  detail::require(alpha > 0.0, "scaling_schedule: alpha must be > 0");
  ScalingSchedule s;
  s.n = n;
  s.d = d;
  s.alpha = alpha;
  s.sigma_n = std::pow(static_cast<double>(n), -1.0 / (2.0 * d + 4.0 + alpha));
  s.c_n = std::tgamma((d + 4.0) / 2.0) * std::pow(s.sigma_n, d + 2.0);
  return s;
}

}  // namespace normlap
