#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

#include "normlap/experiments.hpp"
#include "normlap/normlap.hpp"

using namespace normlap;
namespace ex = normlap::experiments;

namespace {

constexpr double kPi = std::numbers::pi;
int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

template <class Fn>
void guarded(int id, Fn&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    report(id, false, std::string("exception: ") + e.what());
  }
}

void criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  auto median_error = [](std::size_t n) {
    std::vector<double> e;
    for (std::uint64_t s = 0; s < 5; ++s) {
      ex::VerifyCircleParams q;
      q.n = n;
      q.seed = 2020 + s;
      e.push_back(ex::verify_circle(q).rms_rel_error);
    }
    return ex::median(e);
  };
  const double big = median_error(40000), small = median_error(4000), secs = ex::seconds_since(t0);
  const bool ok = big <= 0.10 && small > big && secs < 60;
  report(1, ok,
         fmt("median rms relative error %.4f at n=40000", big) + fmt(" (target <= 0.10), %.4f at n=4000", small) +
             fmt(", %.1f s", secs));
}

void criterion2() {
  bool ok = true;
  std::string detail;
  for (int d = 1; d <= 3; ++d) {
    const double c = std::pow(kPi, d / 2.0) / (4 * std::tgamma((d + 4) / 2.0));
    Eigen::VectorXd pole = Eigen::VectorXd::Zero(d + 1);
    pole[d] = 1.0;
    const TangentData t = d == 1 ? circle_tangent(0.7) : sphere_tangent(pole);
    const Norm n = Norm::euclidean(static_cast<std::size_t>(d + 1));
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d, d);
    const double eq = (second_moment(n, t).matrix - c * I).cwiseAbs().maxCoeff() / c;
    ok = ok && eq <= 1e-3;
    detail += fmt("d=%g ", d) + fmt("quad rel %.1e", eq);
    if (d >= 2) {
      QuadratureConfig q;
      q.force_qmc = true;
      const double eqmc = (second_moment(n, t, q).matrix - c * I).cwiseAbs().maxCoeff() / c;
      ok = ok && eqmc <= 1e-2;
      detail += fmt(" qmc rel %.1e", eqmc);
    }
    detail += "; ";
  }
  double worst = 0.0;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-5, 5), th(0, 2 * kPi);
  for (int i = 0; i < 200; ++i) {
    const double theta = th(rng), fp = u(rng), fpp = u(rng);
    const LimitOperatorCoeffs c = limit_operator_coeffs(Norm::euclidean(2), circle_tangent(theta), TiltMethod::c1);
    const double v = apply_limit_operator(c, Eigen::VectorXd::Constant(1, fp), Eigen::MatrixXd::Constant(1, 1, fpp));
    worst = std::max(worst, std::abs(v - fpp / 3));
  }
  ok = ok && worst <= 1e-10;
  report(2, ok, detail + fmt("circle l2 operator vs f''/3 max err %.1e", worst));
}

void criterion3() {
  const auto t0 = std::chrono::steady_clock::now();
  const Norm n2 = Norm::weighted_l1(Eigen::Vector2d(1, 1.5));
  double e1 = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double theta = 2 * kPi * (i + 0.37) / 100;
    const Eigen::Vector2d a(-std::sin(theta), std::cos(theta));
    const Eigen::Vector2d b = -0.5 * Eigen::Vector2d(std::cos(theta), std::sin(theta));
    e1 = std::max(e1, std::abs(tilt_slice(n2, a, b) - tilt_circle_weighted_l1(theta, 1, 1.5)));
  }
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> w(0.5, 3.0);
  double e2 = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Norm n3 = Norm::weighted_l1(Eigen::Vector3d(w(rng), w(rng), w(rng)));
    Eigen::Vector3d a, b;
    do {
      a = Eigen::Vector3d(g(rng), g(rng), g(rng)).normalized();
    } while (a.cwiseAbs().minCoeff() < 0.05);
    b = Eigen::Vector3d(g(rng), g(rng), g(rng));
    b -= b.dot(a) * a;
    e2 = std::max(e2, std::abs(tilt_c1(n3, a, b) - tilt_slice(n3, a, b)));
  }
  const double secs = ex::seconds_since(t0);
  report(3, e1 <= 1e-6 && e2 <= 1e-6 && secs < 10,
         fmt("slice vs closed form %.1e", e1) + fmt(", c1 vs slice in R^3 %.1e", e2) + fmt(", %.2f s", secs));
}

void criterion4() {
  bool ok = true;
  std::string detail;
  {
    const auto t0 = std::chrono::steady_clock::now();
    const FDOperator op =
        assemble_fd_operator([](double) { return 0.0; }, [](double) { return 1.0 / 3.0; }, 100000);
    const FDEigenResult r = smallest_magnitude_eigs(op, 3);
    const double err = std::max(std::abs(r.eigenvalues[1] + 1.0 / 3.0), std::abs(r.eigenvalues[2] + 1.0 / 3.0));
    const double secs = ex::seconds_since(t0);
    ok = ok && err <= 1e-6 && secs < 30;
    detail += fmt("pure case k=+-1 err %.1e", err) + fmt(" (%.1f s)", secs);
  }
  for (double w1 : {2.0, 4.0, 8.0}) {
    ex::EigenfunctionsParams p;
    p.w1 = w1;
    p.w2 = 1.0;
    const ex::EigenfunctionsResult r = ex::eigenfunctions(p);
    const bool nonpos = r.eig.eigenvalues.maxCoeff() <= 1e-6;
    const Eigen::VectorXd c0 = r.eig.eigenfunctions.col(0);
    const bool constant = std::abs(r.eig.eigenvalues[0]) <= 1e-6 && c0.maxCoeff() - c0.minCoeff() <= 1e-6;
    bool monotone = true;
    for (std::size_t i = 1; i < r.sign_changes.size(); ++i) monotone = monotone && r.sign_changes[i] >= r.sign_changes[i - 1];
    ok = ok && nonpos && constant && monotone && r.seconds < 30;
    std::string counts;
    for (int s : r.sign_changes) counts += std::to_string(s) + " ";
    detail += fmt("; w=(%g,1): ", w1) + fmt("max eig %.1e", r.eig.eigenvalues.maxCoeff()) +
              (constant ? ", constant mode" : ", NO constant mode") + ", sign changes " + counts +
              fmt("(%.1f s)", r.seconds);
  }
  report(4, ok, detail);
}

void criterion5() {
  const std::vector<std::size_t> sizes{100, 200, 400, 800};
  auto score = [](std::size_t n, ex::EmbedNorm norm) {
    std::vector<double> s;
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      RotorConfig c = RotorConfig::defaults();
      c.noise_std = 0.0;
      c.seed = 2020 + seed;
      const Dataset ds = make_dataset(n, c, false);
      ex::EmbedParams p;
      p.norm = norm;
      s.push_back(ex::embed_volumes(ds.volumes, ds.angles_deg, p).score);
    }
    return ex::median(s);
  };
  const double wemd100 = score(100, ex::EmbedNorm::wemd);
  std::vector<double> eu;
  for (std::size_t n : sizes) eu.push_back(score(n, ex::EmbedNorm::euclidean));
  bool reaches_later = false;
  for (std::size_t i = 1; i < sizes.size(); ++i) reaches_later = reaches_later || eu[i] >= 0.99;
  const bool ok = wemd100 >= 0.99 && eu[0] < wemd100 && eu[0] < 0.99 && reaches_later;
  std::string detail = fmt("WEMD n=100 median score %.4f; Euclidean", wemd100);
  for (std::size_t i = 0; i < sizes.size(); ++i) detail += fmt(" n=%g:", static_cast<double>(sizes[i])) + fmt("%.4f", eu[i]);
  report(5, ok, detail);
}

void criterion6() {
  ex::ProfileParams p;
  const ex::ProfileResult r = ex::distance_profile(p);
  bool wemd_increasing = true, l2_dips = false;
  for (std::size_t i = 1; i < r.wemd.size(); ++i) {
    wemd_increasing = wemd_increasing && r.wemd[i] > r.wemd[i - 1];
    l2_dips = l2_dips || r.l2[i] < r.l2[i - 1];
  }
  report(6, wemd_increasing && l2_dips,
         std::string("WEMD strictly increasing: ") + (wemd_increasing ? "yes" : "no") +
             ", l2 has a decrease: " + (l2_dips ? "yes" : "no"));
}

void criterion7() {
  ex::BenchParams p;
  p.sizes = {200, 400, 800};
  const auto rows = ex::bench(p);
  const ex::BenchRow& big = rows.back();
  const bool sparse_clean = big.wemd_sparse_clean < big.wemd_dense;
  const bool sparse_noisy = big.wemd_sparse_noisy < big.wemd_dense;
  const bool clean_faster = big.wemd_sparse_clean < big.wemd_sparse_noisy;
  bool linear = true;
  std::string ratios;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double per_prev = rows[i - 1].dwt / static_cast<double>(rows[i - 1].n);
    const double per = rows[i].dwt / static_cast<double>(rows[i].n);
    linear = linear && per / per_prev <= 2.0 && per / per_prev >= 0.5;
    ratios += fmt(" %.2f", per / per_prev);
  }
  report(7, sparse_clean && sparse_noisy && clean_faster && linear,
         fmt("n=800 dense %.2f s", big.wemd_dense) + fmt(", sparse clean %.3f s", big.wemd_sparse_clean) +
             fmt(", sparse noisy %.2f s", big.wemd_sparse_noisy) + "; DWT per-volume time ratios" + ratios);
}

void criterion8() {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.2, 3.0);
  auto gvec = [&](Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (auto& x : v) x = g(rng);
    return v;
  };
  std::vector<std::string> failed;
  auto check = [&](bool ok, const char* name) {
    if (!ok) failed.emplace_back(name);
  };

  bool axioms = true;
  for (int t = 0; t < 100; ++t) {
    const Norm n = t % 2 ? Norm::euclidean(3) : Norm::weighted_l1(Eigen::Vector3d(u(rng), u(rng), u(rng)));
    const Eigen::VectorXd a = gvec(3), b = gvec(3);
    const double s = g(rng);
    axioms = axioms && n.eval(a + b) <= n.eval(a) + n.eval(b) + 1e-12 &&
             std::abs(n.eval(s * a) - std::abs(s) * n.eval(a)) <= 1e-12 * (1 + n.eval(a)) && n.eval(a) > 0;
  }
  check(axioms, "norm axioms");

  bool recon = true, triangle = true;
  auto rand_volume = [&](std::size_t m) {
    Volume v = Volume::zeros(m, m, m);
    for (double& x : v.voxels) x = g(rng);
    return v;
  };
  for (int t = 0; t < 4; ++t) {
    const Volume v = rand_volume(16);
    const Volume back = idwt3(dwt3(v, Wavelet::sym3, 3));
    for (std::size_t i = 0; i < v.voxels.size(); ++i) recon = recon && std::abs(back.voxels[i] - v.voxels[i]) <= 1e-10;
    const Volume a = rand_volume(8), b = rand_volume(8), c = rand_volume(8);
    triangle = triangle && wemd_distance(a, c, Wavelet::sym3, 3) <=
                               wemd_distance(a, b, Wavelet::sym3, 3) + wemd_distance(b, c, Wavelet::sym3, 3) + 1e-12;
  }
  check(recon, "DWT reconstruction");
  check(triangle, "WEMD triangle inequality");

  bool lap = true, emb = true;
  for (int t = 0; t < 6; ++t) {
    const int n = 20 + 8 * t;
    PointCloud pts(n, 2);
    for (Eigen::Index i = 0; i < pts.size(); ++i) pts.data()[i] = g(rng);
    const GraphLaplacian L = graph_laplacian(gaussian_affinity(pairwise_distances(pts, Norm::euclidean(2)), 1.0));
    const Eigen::MatrixXd M = L.to_dense();
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(M).eigenvalues();
    lap = lap && M.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-12 * L.inf_norm() && ev.maxCoeff() <= 1e-12 * L.inf_norm();
    const Embedding e = embed(L, 2);
    emb = emb && (e.coords.transpose() * e.coords - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() <= 1e-10;
    EigOptions it;
    it.dense_max_n = 0;
    const EigenPairs a = eig_symmetric(L, 3), b = eig_symmetric(L, 3, it);
    emb = emb && (a.values - b.values).cwiseAbs().maxCoeff() <= 1e-8 * L.inf_norm();
  }
  check(lap, "Laplacian row sums and semidefiniteness");
  check(emb, "embedding orthonormality and solver equivalence");

  const Norm w = Norm::weighted_l1(Eigen::Vector2d(1, 1.5));
  const double left = first_order_coeff(w, circle_tangent(kPi / 2 - 1e-4), TiltMethod::slice)[0];
  const double right = first_order_coeff(w, circle_tangent(kPi / 2 + 1e-4), TiltMethod::slice)[0];
  check(std::abs(left - right) > 0.1, "first-order discontinuity at pi/2");

  Eigen::Vector2d gf(1, 2), gp(-2, 1);
  const Eigen::Matrix2d M = 2 * (kPi / 8) * Eigen::Matrix2d::Identity();
  check(nonuniform_correction(gf, Eigen::Vector2d::Zero(), M) == 0.0 &&
            std::abs(nonuniform_correction(gf, gp, M)) <= 1e-15,
        "nonuniform correction zero cases");

  std::string detail = failed.empty() ? "all property checks hold" : "failed:";
  for (const auto& f : failed) detail += " [" + f + "]";
  report(8, failed.empty(), detail + fmt(" (left %.4f", left) + fmt(", right %.4f at pi/2)", right));
}

}  // namespace

int main() {
  guarded(1, criterion1);
  guarded(2, criterion2);
  guarded(3, criterion3);
  guarded(4, criterion4);
  guarded(5, criterion5);
  guarded(6, criterion6);
  guarded(7, criterion7);
  guarded(8, criterion8);
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
