#pragma once

// The limiting Laplacian-like operator for a graph Laplacian built with an
// arbitrary norm: tilt function, tangent-slice second moment, tilt-weighted
// first-order coefficient, and operator application.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "normlap/error.hpp"
#include "normlap/norms.hpp"

namespace normlap {

/// First and second order data of the exponential map at a point p:
/// exp_p(s) = p + L s + 1/2 Q(s) + O(|s|^3).
struct TangentData {
  int d = 1;
  Eigen::MatrixXd L_basis;  // D x d, orthonormal columns
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> Q_eval;
  std::optional<double> circle_theta;  // set for the planar unit circle

  Eigen::Index ambient_dim() const { return L_basis.rows(); }
};

/// Unit circle at angle theta, unit-speed parametrization.
inline TangentData circle_tangent(double theta) {
  TangentData t;
  t.d = 1;
  t.L_basis.resize(2, 1);
  t.L_basis << -std::sin(theta), std::cos(theta);
  const Eigen::Vector2d p(std::cos(theta), std::sin(theta));
  t.Q_eval = [p](const Eigen::VectorXd& s) -> Eigen::VectorXd { return -s.squaredNorm() * p; };
  t.circle_theta = theta;
  return t;
}

/// Unit sphere S^{D-1} at the unit vector p.
inline TangentData sphere_tangent(const Eigen::VectorXd& p) {
  detail::require(p.size() >= 2, "sphere_tangent: ambient dimension must be >= 2");
  detail::require(std::abs(p.norm() - 1.0) <= 1e-12, "sphere_tangent: p must be a unit vector");
  const Eigen::Index D = p.size();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(p);
  const Eigen::MatrixXd Qm = qr.householderQ() * Eigen::MatrixXd::Identity(D, D);
  TangentData t;
  t.d = static_cast<int>(D - 1);
  t.L_basis = Qm.rightCols(D - 1);
  t.Q_eval = [p](const Eigen::VectorXd& s) -> Eigen::VectorXd { return -s.squaredNorm() * p; };
  return t;
}

/// Tangent data of a parametric curve gamma(t) at t0 from central differences.
inline TangentData curve_tangent(const std::function<Eigen::VectorXd(double)>& gamma, double t0,
                                 double h = 1e-4) {
  detail::require(h > 0.0, "curve_tangent: step must be positive");
  const Eigen::VectorXd gp = gamma(t0 + h), g0 = gamma(t0), gm = gamma(t0 - h);
  const Eigen::VectorXd d1 = (gp - gm) / (2.0 * h);
  const Eigen::VectorXd d2 = (gp - 2.0 * g0 + gm) / (h * h);
  const double speed = d1.norm();
  detail::require(speed > 0.0, "curve_tangent: curve is singular at t0");
  const Eigen::VectorXd T = d1 / speed;
  const Eigen::VectorXd kN = (d2 - d2.dot(T) * T) / (speed * speed);
  TangentData t;
  t.d = 1;
  t.L_basis = T;
  t.Q_eval = [kN](const Eigen::VectorXd& s) -> Eigen::VectorXd { return s.squaredNorm() * kN; };
  return t;
}

/// Checks the isometry and perpendicularity invariants on a few directions.
inline void validate_tangent(const TangentData& t) {
  detail::require(t.d >= 1, "tangent data: d must be >= 1");
  detail::require(t.L_basis.cols() == t.d, "tangent data: L_basis must have d columns");
  detail::require(static_cast<bool>(t.Q_eval), "tangent data: missing Q_eval");
  const Eigen::MatrixXd G = t.L_basis.transpose() * t.L_basis;
  if ((G - Eigen::MatrixXd::Identity(t.d, t.d)).cwiseAbs().maxCoeff() > 1e-10) {
    throw InvalidArgument("tangent data: L_basis is not isometric");
  }
  for (int i = 0; i < t.d; ++i) {
    const Eigen::VectorXd q = t.Q_eval(Eigen::VectorXd::Unit(t.d, i));
    if (q.size() != t.ambient_dim()) throw InvalidArgument("tangent data: Q_eval has wrong dimension");
    if ((t.L_basis.transpose() * q).cwiseAbs().maxCoeff() > 1e-8) {
      throw InvalidArgument("tangent data: Q is not normal to the tangent space");
    }
  }
}

namespace detail {

inline void check_tilt_args(const char* who, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) throw InvalidArgument(std::string(who) + ": a and b differ in dimension");
  if (a.cwiseAbs().maxCoeff() == 0.0) throw InvalidArgument(std::string(who) + ": a = 0");
  if (std::abs(a.norm() - 1.0) > 1e-8) throw InvalidArgument(std::string(who) + ": a must be a unit vector");
  if (std::abs(a.dot(b)) > 1e-8 * std::max(1.0, b.norm())) {
    throw InvalidArgument(std::string(who) + ": a and b are not orthogonal");
  }
}

// sign(x) with sign(0) = 0.
inline double sgn(double x) { return (x > 0.0) - (x < 0.0); }

// sign(cos(theta) sin(theta)), exactly 0 when theta is within 1e-12 rad of a
// multiple of pi/2.
inline double axis_sign(double theta) {
  const double q = theta / (std::numbers::pi / 2.0);
  if (std::abs(q - std::round(q)) * (std::numbers::pi / 2.0) <= 1e-12) return 0.0;
  return sgn(std::cos(theta) * std::sin(theta));
}

}  // namespace detail

/// Tilt for a norm differentiable at a:
/// -<g, b> / <g, a> / |a|_B^2 with g the gradient of the norm at a.
inline double tilt_c1(const Norm& norm, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  detail::check_tilt_args("tilt_c1", a, b);
  if (b.cwiseAbs().maxCoeff() == 0.0) return 0.0;
  if (norm.on_kink(a)) throw InvalidArgument("tilt_c1: a lies on the kink set of the norm, use tilt_slice");
  const Eigen::VectorXd g = norm.grad(a);
  const double na = norm.eval(a);
  return -g.dot(b) / g.dot(a) / (na * na);
}

struct TiltSliceOptions {
  std::array<double, 4> steps = {1e-3, 1e-4, 1e-5, 1e-6};  // base angular step per attempt
  double consistency_tol = 1e-4;
};

/// Tilt from the one-sided tangent of the unit ball's boundary inside the
/// 2-D slice span{a, b}; valid at kinks of the norm.
inline double tilt_slice(const Norm& norm, const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                         const TiltSliceOptions& opts = {}) {
  detail::check_tilt_args("tilt_slice", a, b);
  const double bn = b.norm();
  if (bn == 0.0) return 0.0;
  const Eigen::VectorXd bh = b / bn;
  // Boundary of the slice ball in polar form: c(phi) = rho(phi) (cos phi a + sin phi bh),
  // with rho(phi) = 1 / |cos phi a + sin phi bh|_B by homogeneity.
  auto rho = [&](double phi) { return 1.0 / norm.eval(std::cos(phi) * a + std::sin(phi) * bh); };
  const double rho0 = rho(0.0);

  std::ostringstream diag;
  for (const double h : opts.steps) {
    const double D1 = (rho(h) - rho0) / h;
    const double D2 = (rho(h / 2) - rho0) / (h / 2);
    const double D4 = (rho(h / 4) - rho0) / (h / 4);
    const double R12 = 2.0 * D2 - D1;
    const double R24 = 2.0 * D4 - D2;
    const double R = (4.0 * R24 - R12) / 3.0;
    if (std::abs(R24 - R12) <= opts.consistency_tol * (1.0 + std::abs(R))) {
      // Forward tangent d1 = rho'(0+) a + rho(0) bh, so <d1, a> = rho'(0+) and
      // <d1, b> = rho(0) |b| > 0.
      const double na = 1.0 / rho0;
      return bn * bn * R / (na * na * rho0 * bn);
    }
    diag << " h=" << h << ": extrapolants " << R12 << " vs " << R24 << ";";
  }
  throw ConvergenceError("tilt_slice: could not resolve the tangent direction of the slice boundary;" +
                         diag.str());
}

/// Closed-form tilt on the unit circle with the weighted l1 norm
/// w1|x| + w2|y|, for the direction s = +1 at angle theta.
inline double tilt_circle_weighted_l1(double theta, double w1, double w2) {
  detail::require(w1 > 0.0 && w2 > 0.0, "tilt_circle_weighted_l1: weights must be positive");
  const double c = std::abs(std::cos(theta)), s = std::abs(std::sin(theta));
  const double N = w1 * s + w2 * c;
  return 0.5 * detail::axis_sign(theta) * (-w1 * c + w2 * s) / (N * N * N);
}

enum class MomentMethod { exact_interval, sphere_quadrature, quasi_monte_carlo };

inline const char* to_string(MomentMethod m) {
  switch (m) {
    case MomentMethod::exact_interval: return "exact_interval";
    case MomentMethod::sphere_quadrature: return "sphere_quadrature";
    case MomentMethod::quasi_monte_carlo: return "quasi_monte_carlo";
  }
  return "unknown";
}

struct QuadratureConfig {
  double rel_tol = 1e-4;
  int max_refinements = 10;
  bool force_qmc = false;
  int qmc_log2_points = 20;
  int qmc_shifts = 8;
  std::uint64_t qmc_seed = 2020;
};

struct MomentResult {
  Eigen::MatrixXd matrix;  // 1/2 * integral of s s^T over the slice ball
  double error_estimate = 0.0;
  MomentMethod method = MomentMethod::exact_interval;
};

namespace detail {

// Gauss-Legendre nodes and weights on [-1, 1].
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(static_cast<std::size_t>(n), 0.0);
  w.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[static_cast<std::size_t>(i)] = -z;
    x[static_cast<std::size_t>(n - 1 - i)] = z;
    w[static_cast<std::size_t>(i)] = w[static_cast<std::size_t>(n - 1 - i)] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

// Sum over an unnormalized-surface-measure rule on S^{d-1}, d in {2, 3}.
// Resolution doubles with each level.
template <class Fn, class Acc>
void sphere_rule(int d, int level, Fn&& f, Acc& acc) {
  if (d == 2) {
    const int m = 64 << level;
    const double wt = 2.0 * std::numbers::pi / m;
    for (int k = 0; k < m; ++k) {
      const double phi = 2.0 * std::numbers::pi * (k + 0.5) / m;
      Eigen::VectorXd s(2);
      s << std::cos(phi), std::sin(phi);
      f(s, wt, acc);
    }
    return;
  }
  if (d == 3) {
    const int nz = 16 << level;
    const int nphi = 2 * nz;
    std::vector<double> zx, zw;
    gauss_legendre(nz, zx, zw);
    for (int i = 0; i < nz; ++i) {
      const double z = zx[static_cast<std::size_t>(i)];
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      for (int k = 0; k < nphi; ++k) {
        const double phi = 2.0 * std::numbers::pi * (k + 0.5) / nphi;
        Eigen::VectorXd s(3);
        s << r * std::cos(phi), r * std::sin(phi), z;
        f(s, zw[static_cast<std::size_t>(i)] * 2.0 * std::numbers::pi / nphi, acc);
      }
    }
    return;
  }
  throw InvalidArgument("sphere_rule: only d = 2 and d = 3 are supported");
}

inline double radical_inverse(std::uint64_t i, int base) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= base;
    r += f * static_cast<double>(i % static_cast<std::uint64_t>(base));
    i /= static_cast<std::uint64_t>(base);
  }
  return r;
}

inline MomentResult second_moment_qmc(const Norm& norm, const TangentData& t, const QuadratureConfig& q) {
  static constexpr std::array<int, 12> primes = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  const int d = t.d;
  detail::require(d <= static_cast<int>(primes.size()), "second_moment: dimension too large for QMC");
  const double R = norm.outer_radius();
  const double box = std::pow(2.0 * R, d);
  const std::uint64_t total = std::uint64_t{1} << q.qmc_log2_points;
  const std::uint64_t per = total / static_cast<std::uint64_t>(q.qmc_shifts);
  std::mt19937_64 rng(q.qmc_seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Eigen::MatrixXd> estimates;
  Eigen::VectorXd s(d);
  for (int sh = 0; sh < q.qmc_shifts; ++sh) {
    Eigen::VectorXd shift(d);
    for (int j = 0; j < d; ++j) shift[j] = unif(rng);
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(d, d);
    for (std::uint64_t i = 1; i <= per; ++i) {
      for (int j = 0; j < d; ++j) {
        double u = radical_inverse(i, primes[static_cast<std::size_t>(j)]) + shift[j];
        u -= std::floor(u);
        s[j] = R * (2.0 * u - 1.0);
      }
      if (norm.eval(t.L_basis * s) <= 1.0) acc.noalias() += s * s.transpose();
    }
    estimates.push_back(0.5 * box * acc / static_cast<double>(per));
  }
  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(d, d);
  for (const auto& e : estimates) mean += e;
  mean /= static_cast<double>(estimates.size());
  double var = 0.0;
  for (const auto& e : estimates) var += (e - mean).squaredNorm();
  var /= static_cast<double>(estimates.size() - 1);
  MomentResult r;
  r.matrix = mean;
  r.error_estimate = std::sqrt(var / static_cast<double>(estimates.size()));
  r.method = MomentMethod::quasi_monte_carlo;
  return r;
}

}  // namespace detail

/// 1/2 * integral of s s^T over {s in R^d : |L s|_B <= 1}.
inline MomentResult second_moment(const Norm& norm, const TangentData& t, const QuadratureConfig& q = {}) {
  detail::require(t.d >= 1 && t.L_basis.cols() == t.d, "second_moment: invalid tangent data");
  const int d = t.d;
  if (d == 1 && !q.force_qmc) {
    const double r = 1.0 / norm.eval(t.L_basis.col(0));
    MomentResult res;
    res.matrix = Eigen::MatrixXd::Constant(1, 1, r * r * r / 3.0);
    res.method = MomentMethod::exact_interval;
    return res;
  }
  if (d <= 3 && !q.force_qmc) {
    // Polar coordinates with the radial integral done exactly:
    // 1/2 * 1/(d+2) * integral over the sphere of shat shat^T rho(shat)^{d+2}.
    auto body = [&](const Eigen::VectorXd& s, double wt, Eigen::MatrixXd& acc) {
      const double rho = 1.0 / norm.eval(t.L_basis * s);
      acc.noalias() += (wt * std::pow(rho, d + 2)) * (s * s.transpose());
    };
    Eigen::MatrixXd prev;
    for (int level = 0; level <= q.max_refinements; ++level) {
      Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(d, d);
      detail::sphere_rule(d, level, body, acc);
      acc *= 0.5 / (d + 2.0);
      if (level > 0) {
        const double change = (acc - prev).norm() / acc.norm();
        if (change < q.rel_tol) {
          MomentResult res;
          res.matrix = acc;
          res.error_estimate = (acc - prev).norm();
          res.method = MomentMethod::sphere_quadrature;
          return res;
        }
      }
      prev = acc;
    }
  }
  return detail::second_moment_qmc(norm, t, q);
}

enum class TiltMethod { c1, slice, circle_closed_form };

struct FirstOrderConfig {
  double rel_tol = 1e-4;
  int max_refinements = 8;
};

/// Integral over unit tangent directions shat of shat |L shat|_B^{-d} tilt(shat),
/// with counting measure on {+1, -1} when d = 1.
inline Eigen::VectorXd first_order_coeff(const Norm& norm, const TangentData& t, TiltMethod method,
                                         const FirstOrderConfig& cfg = {}) {
  detail::require(t.d >= 1 && t.L_basis.cols() == t.d, "first_order_coeff: invalid tangent data");
  const int d = t.d;
  if (method == TiltMethod::circle_closed_form) {
    if (!t.circle_theta || norm.kind() != NormKind::weighted_l1 || norm.dim() != 2) {
      throw InvalidArgument("first_order_coeff: closed form needs circle tangent data and a 2-D weighted l1 norm");
    }
    const double th = *t.circle_theta;
    const double w1 = norm.weights()[0], w2 = norm.weights()[1];
    const double N = w1 * std::abs(std::sin(th)) + w2 * std::abs(std::cos(th));
    return Eigen::VectorXd::Constant(1, 2.0 * tilt_circle_weighted_l1(th, w1, w2) / N);
  }
  auto term = [&](const Eigen::VectorXd& s) -> Eigen::VectorXd {
    const Eigen::VectorXd a = t.L_basis * s;
    const Eigen::VectorXd b = 0.5 * t.Q_eval(s);
    try {
      const double tilt = method == TiltMethod::c1 ? tilt_c1(norm, a, b) : tilt_slice(norm, a, b);
      return s * (tilt / std::pow(norm.eval(a), d));
    } catch (const ConvergenceError& e) {
      std::ostringstream os;
      os << e.what() << " [direction " << s.transpose() << "]";
      throw ConvergenceError(os.str());
    } catch (const InvalidArgument& e) {
      std::ostringstream os;
      os << e.what() << " [direction " << s.transpose() << "]";
      throw InvalidArgument(os.str());
    }
  };
  if (d == 1) {
    const Eigen::VectorXd plus = Eigen::VectorXd::Constant(1, 1.0);
    return term(plus) + term(-plus);
  }
  Eigen::VectorXd prev;
  for (int level = 0; level <= cfg.max_refinements; ++level) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(d);
    detail::sphere_rule(d, level, [&](const Eigen::VectorXd& s, double wt, Eigen::VectorXd& a) {
      a += wt * term(s);
    }, acc);
    if (level > 0) {
      const double change = (acc - prev).norm();
      if (change <= cfg.rel_tol * std::max(acc.norm(), 1e-12)) return acc;
    }
    prev = acc;
  }
  throw ConvergenceError("first_order_coeff: sphere quadrature did not converge");
}

struct LimitOperatorCoeffs {
  Eigen::MatrixXd second_order;
  Eigen::VectorXd first_order;
  double second_order_error = 0.0;
};

inline LimitOperatorCoeffs limit_operator_coeffs(const Norm& norm, const TangentData& t, TiltMethod method,
                                                 const QuadratureConfig& q = {}) {
  LimitOperatorCoeffs c;
  const MomentResult m = second_moment(norm, t, q);
  c.second_order = m.matrix;
  c.second_order_error = m.error_estimate;
  c.first_order = first_order_coeff(norm, t, method);
  return c;
}

inline double apply_limit_operator(const LimitOperatorCoeffs& c, const Eigen::VectorXd& grad_f,
                                   const Eigen::MatrixXd& hess_f) {
  const Eigen::Index d = c.second_order.rows();
  if (c.second_order.cols() != d || c.first_order.size() != d || grad_f.size() != d || hess_f.rows() != d ||
      hess_f.cols() != d) {
    throw InvalidArgument("apply_limit_operator: shape mismatch");
  }
  return (hess_f.array() * c.second_order.array()).sum() + grad_f.dot(c.first_order);
}

/// Limiting operator on the unit circle for the norm w1|x| + w2|y|.
inline double circle_limit_operator(double theta, double w1, double w2, double f_prime, double f_double_prime) {
  detail::require(w1 > 0.0 && w2 > 0.0, "circle_limit_operator: weights must be positive");
  const double c = std::abs(std::cos(theta)), s = std::abs(std::sin(theta));
  const double N = w1 * s + w2 * c;
  const double first = detail::axis_sign(theta) * (-w1 * c + w2 * s) / std::pow(N, 4);
  const double second = 1.0 / (3.0 * N * N * N);
  return first * f_prime + second * f_double_prime;
}

/// Extra first-order term for a non-uniform sampling density P:
/// grad_f^T (integral of s s^T) grad_P.
inline double nonuniform_correction(const Eigen::VectorXd& grad_f, const Eigen::VectorXd& grad_P,
                                    const Eigen::MatrixXd& second_moment_unhalved) {
  const Eigen::Index d = grad_f.size();
  if (grad_P.size() != d || second_moment_unhalved.rows() != d || second_moment_unhalved.cols() != d) {
    throw InvalidArgument("nonuniform_correction: shape mismatch");
  }
  return grad_f.dot(second_moment_unhalved * grad_P);
}

/// pi^{d/2} / (4 Gamma((d+4)/2)): the Euclidean-ball value of second_moment.
inline double euclidean_moment_constant(int d) {
  detail::require(d >= 1, "euclidean_moment_constant: d must be >= 1");
  return std::pow(std::numbers::pi, d / 2.0) / (4.0 * std::tgamma((d + 4.0) / 2.0));
}

/// Lower bound on the smallest eigenvalue of second_moment for any isometric
/// tangent slice of the norm's unit ball.
inline double ellipticity_floor(const Norm& norm, int d, std::size_t dim_hint = 0) {
  const double c = norm.inner_radius(dim_hint);
  return std::pow(c, d + 2) * euclidean_moment_constant(d);
}

}  // namespace normlap
