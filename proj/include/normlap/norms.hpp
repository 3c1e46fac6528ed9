#pragma once

// Norms on R^D used to build affinities: Euclidean, weighted l1, and the
// composite wavelet Earthmover norm (a plain l1 norm on coefficient vectors
// that were already transformed and scale-weighted by wavelets.hpp).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>

#include "normlap/error.hpp"

namespace normlap {

enum class NormKind { euclidean, weighted_l1, wemd_composite };

enum class Differentiability { everywhere_smooth, smooth_away_from_kinks };

inline std::string_view to_string(NormKind kind) {
  switch (kind) {
    case NormKind::euclidean: return "euclidean";
    case NormKind::weighted_l1: return "weighted_l1";
    case NormKind::wemd_composite: return "wemd";
  }
  return "unknown";
}

/// An immutable norm on R^D together with its unit ball.
///
/// A dimension of 0 means "any dimension"; it is only used for the WEMD
/// composite norm, whose ambient dimension is the coefficient count of
/// whatever transform produced its inputs.
class Norm {
 public:
  static constexpr double kDefaultMembershipTol = 1e-9;
  static constexpr double kKinkRelTol = 1e-12;
  static constexpr double kDefaultWemdExponent = 2.5;

  static Norm euclidean(std::size_t dim) {
    detail::require(dim > 0, "euclidean norm: dimension must be positive");
    return Norm(NormKind::euclidean, dim, Eigen::VectorXd(), 0.0);
  }

  static Norm weighted_l1(Eigen::VectorXd weights) {
    detail::require(weights.size() > 0, "weighted_l1: empty weight vector");
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
      detail::require(std::isfinite(weights[i]) && weights[i] > 0.0,
                      "weighted_l1: weights must be finite and strictly positive");
    }
    const auto dim = static_cast<std::size_t>(weights.size());
    return Norm(NormKind::weighted_l1, dim, std::move(weights), 0.0);
  }

  static Norm wemd(double exponent = kDefaultWemdExponent, std::size_t dim = 0) {
    detail::require(std::isfinite(exponent), "wemd: exponent must be finite");
    return Norm(NormKind::wemd_composite, dim, Eigen::VectorXd(), exponent);
  }

  NormKind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  double wemd_exponent() const { return wemd_exponent_; }

  Differentiability differentiability() const {
    return kind_ == NormKind::euclidean ? Differentiability::everywhere_smooth
                                        : Differentiability::smooth_away_from_kinks;
  }

  double eval(const Eigen::Ref<const Eigen::VectorXd>& v) const {
    check_dim(v.size());
    switch (kind_) {
      case NormKind::euclidean:
        return v.norm();
      case NormKind::weighted_l1:
        return weights_.cwiseProduct(v.cwiseAbs()).sum();
      case NormKind::wemd_composite:
        return v.cwiseAbs().sum();
    }
    return 0.0;
  }

  /// True when some coordinate of v is (relatively) zero, where the l1-type
  /// norms have no gradient. Always false for the Euclidean norm.
  bool on_kink(const Eigen::Ref<const Eigen::VectorXd>& v) const {
    check_dim(v.size());
    if (kind_ == NormKind::euclidean) return false;
    const double scale = v.cwiseAbs().maxCoeff();
    if (scale == 0.0) return true;
    return (v.cwiseAbs().array() < kKinkRelTol * scale).any();
  }

  Eigen::VectorXd grad(const Eigen::Ref<const Eigen::VectorXd>& v) const {
    check_dim(v.size());
    if (v.cwiseAbs().maxCoeff() == 0.0) {
      throw InvalidArgument("norm_grad: nondifferentiable at origin");
    }
    if (kind_ == NormKind::euclidean) return v / v.norm();
    if (on_kink(v)) throw InvalidArgument("norm_grad: on kink set");
    Eigen::VectorXd g(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      const double w = kind_ == NormKind::weighted_l1 ? weights_[i] : 1.0;
      g[i] = v[i] > 0.0 ? w : -w;
    }
    return g;
  }

  bool unit_ball_contains(const Eigen::Ref<const Eigen::VectorXd>& v,
                          double tol = kDefaultMembershipTol) const {
    return eval(v) <= 1.0 + tol;
  }

  /// Largest r with r * (Euclidean unit ball) contained in the unit ball,
  /// i.e. 1 / max_{|v|_2 = 1} |v|.
  double inner_radius(std::size_t dim_hint = 0) const {
    switch (kind_) {
      case NormKind::euclidean: return 1.0;
      case NormKind::weighted_l1: return 1.0 / weights_.norm();
      case NormKind::wemd_composite: {
        const std::size_t d = dim_ ? dim_ : dim_hint;
        detail::require(d > 0, "wemd inner_radius: dimension unknown");
        return 1.0 / std::sqrt(static_cast<double>(d));
      }
    }
    return 0.0;
  }

  /// Smallest R with the unit ball contained in R * (Euclidean unit ball).
  double outer_radius() const {
    switch (kind_) {
      case NormKind::euclidean: return 1.0;
      case NormKind::weighted_l1: return 1.0 / weights_.minCoeff();
      case NormKind::wemd_composite: return 1.0;
    }
    return 0.0;
  }

 private:
  Norm(NormKind kind, std::size_t dim, Eigen::VectorXd weights, double exponent)
      : kind_(kind), dim_(dim), weights_(std::move(weights)), wemd_exponent_(exponent) {}

  void check_dim(Eigen::Index n) const {
    if (dim_ != 0 && static_cast<std::size_t>(n) != dim_) {
      throw InvalidArgument("norm: dimension mismatch (expected " + std::to_string(dim_) +
                            ", got " + std::to_string(n) + ")");
    }
  }

  NormKind kind_;
  std::size_t dim_;
  Eigen::VectorXd weights_;
  double wemd_exponent_;
};

inline double norm_eval(const Norm& norm, const Eigen::Ref<const Eigen::VectorXd>& v) {
  return norm.eval(v);
}

inline Eigen::VectorXd norm_grad(const Norm& norm, const Eigen::Ref<const Eigen::VectorXd>& v) {
  return norm.grad(v);
}

inline bool unit_ball_contains(const Norm& norm, const Eigen::Ref<const Eigen::VectorXd>& v,
                               double tol = Norm::kDefaultMembershipTol) {
  return norm.unit_ball_contains(v, tol);
}

}  // namespace normlap
