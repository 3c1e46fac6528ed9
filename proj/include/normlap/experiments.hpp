#pragma once

// Experiment drivers shared by the command-line tool and the acceptance
// checks. Each driver has a pure computational part and a writer that
// produces the CSV/SVG/JSON artifacts.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "normlap/dataset.hpp"
#include "normlap/error.hpp"
#include "normlap/fd_eigen.hpp"
#include "normlap/io.hpp"
#include "normlap/laplacian.hpp"
#include "normlap/limit_op.hpp"
#include "normlap/spectral.hpp"
#include "normlap/svg.hpp"
#include "normlap/wavelets.hpp"

namespace normlap::experiments {

namespace fs = std::filesystem;

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline double median(std::vector<double> v) {
  detail::require(!v.empty(), "median: empty input");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// ---------------------------------------------------------------------------
// verify-circle

/// f(t) = sin t + cos 2t + cos 5t and its first two derivatives.
struct TestFunction {
  static double f(double t) { return std::sin(t) + std::cos(2 * t) + std::cos(5 * t); }
  static double d1(double t) { return std::cos(t) - 2 * std::sin(2 * t) - 5 * std::sin(5 * t); }
  static double d2(double t) { return -std::sin(t) - 4 * std::cos(2 * t) - 25 * std::cos(5 * t); }
};

struct VerifyCircleParams {
  std::size_t n = 40000;
  double w1 = 1.0;
  double w2 = 1.5;
  double alpha = 1.0;
  std::size_t grid_points = 200;
  std::uint64_t seed = 2020;
  double exclude_deg = 5.0;

  void validate() const {
    detail::require(n >= 100, "verify-circle: n must be >= 100");
    detail::require(w1 > 0.0 && w2 > 0.0, "verify-circle: weights must be positive");
    detail::require(alpha > 0.0, "verify-circle: alpha must be positive");
    detail::require(grid_points >= 8, "verify-circle: grid_points must be >= 8");
    detail::require(exclude_deg >= 0.0 && exclude_deg < 45.0, "verify-circle: exclude_deg must lie in [0, 45)");
  }
};

struct VerifyCircleResult {
  std::vector<double> theta, empirical, theoretical;
  std::vector<bool> included;
  ScalingSchedule schedule;
  double rms_rel_error = 0.0;
  std::size_t points_used = 0;
};

/// True when theta is within `band_deg` degrees of a multiple of pi/2.
inline bool near_axis(double theta, double band_deg) {
  const double q = std::numbers::pi / 2.0;
  const double r = std::remainder(theta, q);
  return std::abs(r) < band_deg * std::numbers::pi / 180.0;
}

inline VerifyCircleResult verify_circle(const VerifyCircleParams& p) {
  p.validate();
  VerifyCircleResult r;
  std::vector<double> angles;
  const PointCloud pts = sample_circle(p.n, p.seed, &angles);
  Eigen::VectorXd fv(static_cast<Eigen::Index>(p.n));
  for (std::size_t i = 0; i < p.n; ++i) fv[static_cast<Eigen::Index>(i)] = TestFunction::f(angles[i]);

  const Norm norm = Norm::weighted_l1(Eigen::Vector2d(p.w1, p.w2));
  r.schedule = scaling_schedule(p.n, 1, p.alpha);
  const double scale = r.schedule.rescale(2.0 * std::numbers::pi);

  double num = 0.0, den = 0.0;
  Eigen::Vector2d base;
  for (std::size_t k = 0; k < p.grid_points; ++k) {
    const double th = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(p.grid_points);
    base << std::cos(th), std::sin(th);
    const double emp =
        scale * apply_pointcloud_laplacian(pts, fv, base, TestFunction::f(th), norm, r.schedule.sigma_n);
    const double theo = circle_limit_operator(th, p.w1, p.w2, TestFunction::d1(th), TestFunction::d2(th));
    const bool keep = !near_axis(th, p.exclude_deg);
    r.theta.push_back(th);
    r.empirical.push_back(emp);
    r.theoretical.push_back(theo);
    r.included.push_back(keep);
    if (keep) {
      num += (emp - theo) * (emp - theo);
      den += theo * theo;
      ++r.points_used;
    }
  }
  r.rms_rel_error = std::sqrt(num / den);
  return r;
}

inline std::string overlay_svg(const io::CsvTable& empirical, const io::CsvTable& theoretical) {
  svg::Plot plot{"Point-cloud vs limiting operator", "theta", "value"};
  return svg::render(plot, {{"empirical", empirical.column_values("theta"), empirical.column_values("value"), false},
                            {"theoretical", theoretical.column_values("theta"), theoretical.column_values("value"),
                             false}});
}

inline nlohmann::json write_verify_circle(const fs::path& out, const VerifyCircleParams& p,
                                          const VerifyCircleResult& r) {
  io::ensure_dir(out);
  io::CsvTable emp{{"theta", "value", "included"}, {}}, theo{{"theta", "value"}, {}};
  for (std::size_t k = 0; k < r.theta.size(); ++k) {
    emp.rows.push_back({r.theta[k], r.empirical[k], r.included[k] ? 1.0 : 0.0});
    theo.rows.push_back({r.theta[k], r.theoretical[k]});
  }
  io::write_csv(out / "empirical.csv", emp);
  io::write_csv(out / "theoretical.csv", theo);
  io::write_text(out / "overlay.svg", overlay_svg(io::read_csv(out / "empirical.csv"),
                                                  io::read_csv(out / "theoretical.csv")));
  nlohmann::json rep = {{"command", "verify-circle"},
                        {"n", p.n},
                        {"weights", {p.w1, p.w2}},
                        {"alpha", p.alpha},
                        {"sigma_n", r.schedule.sigma_n},
                        {"c_n", r.schedule.c_n},
                        {"scale", r.schedule.rescale(2.0 * std::numbers::pi)},
                        {"grid_points", p.grid_points},
                        {"excluded_band_deg", p.exclude_deg},
                        {"points_used", r.points_used},
                        {"rms_relative_error", r.rms_rel_error}};
  io::write_json(out / "report.json", rep);
  return rep;
}

// ---------------------------------------------------------------------------
// eigenfunctions

struct EigenfunctionsParams {
  std::size_t n_grid = 100000;
  double w1 = 1.0;
  double w2 = 1.0;
  int k = 5;
  double shift = 1.0;

  void validate() const {
    detail::require(n_grid >= 1000, "eigenfunctions: n_grid must be >= 1000");
    detail::require(w1 > 0.0 && w2 > 0.0, "eigenfunctions: weights must be positive");
    detail::require(k >= 1 && k <= 50, "eigenfunctions: k must lie in [1, 50]");
  }
};

struct EigenfunctionsResult {
  FDOperator op;
  FDEigenResult eig;
  std::vector<int> sign_changes;
  double seconds = 0.0;
};

inline EigenfunctionsResult eigenfunctions(const EigenfunctionsParams& p) {
  p.validate();
  const auto t0 = std::chrono::steady_clock::now();
  EigenfunctionsResult r;
  r.op = assemble_circle_operator(p.w1, p.w2, p.n_grid);
  FDEigenOptions opts;
  opts.shift = p.shift;
  r.eig = smallest_magnitude_eigs(r.op, p.k, opts);
  for (Eigen::Index j = 0; j < r.eig.eigenfunctions.cols(); ++j) {
    r.sign_changes.push_back(count_sign_changes(r.eig.eigenfunctions.col(j)));
  }
  r.seconds = seconds_since(t0);
  return r;
}

inline std::string eigenfunctions_svg(const io::CsvTable& t) {
  std::vector<svg::Series> series;
  const auto theta = t.column_values("theta");
  for (std::size_t c = 1; c < t.header.size(); ++c) {
    series.push_back({t.header[c], theta, t.column_values(t.header[c]), false});
  }
  return svg::render({"Eigenfunctions of the limiting operator", "theta", "value"}, series);
}

inline nlohmann::json write_eigenfunctions(const fs::path& out, const EigenfunctionsParams& p,
                                           const EigenfunctionsResult& r) {
  io::ensure_dir(out);
  const auto n = static_cast<Eigen::Index>(r.op.n);
  io::CsvTable t;
  t.header.push_back("theta");
  for (Eigen::Index j = 0; j < r.eig.eigenfunctions.cols(); ++j) t.header.push_back("phi_" + std::to_string(j));
  t.rows.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    std::vector<double> row{2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n)};
    for (Eigen::Index j = 0; j < r.eig.eigenfunctions.cols(); ++j) row.push_back(r.eig.eigenfunctions(i, j));
    t.rows.push_back(std::move(row));
  }
  io::write_csv(out / "eigenfunctions.csv", t);
  io::write_text(out / "plot.svg", eigenfunctions_svg(io::read_csv(out / "eigenfunctions.csv")));
  nlohmann::json rep = {{"command", "eigenfunctions"},
                        {"n_grid", p.n_grid},
                        {"weights", {p.w1, p.w2}},
                        {"k", p.k},
                        {"shift", p.shift},
                        {"eigenvalues", std::vector<double>(r.eig.eigenvalues.data(),
                                                            r.eig.eigenvalues.data() + r.eig.eigenvalues.size())},
                        {"residuals", std::vector<double>(r.eig.residuals.data(),
                                                          r.eig.residuals.data() + r.eig.residuals.size())},
                        {"max_imag_part", r.eig.max_imag_part},
                        {"iterations", r.eig.iterations},
                        {"sign_changes", r.sign_changes},
                        {"normalization", "unit l2 norm over grid values"},
                        {"seconds", r.seconds}};
  io::write_json(out / "eigenvalues.json", rep);
  return rep;
}

// ---------------------------------------------------------------------------
// embed

enum class EmbedNorm { euclidean, wemd };

inline EmbedNorm parse_embed_norm(const std::string& s) {
  if (s == "euclidean" || s == "l2") return EmbedNorm::euclidean;
  if (s == "wemd") return EmbedNorm::wemd;
  throw InvalidArgument("unknown norm '" + s + "' (expected euclidean or wemd)");
}

inline std::string to_string(EmbedNorm n) { return n == EmbedNorm::wemd ? "wemd" : "euclidean"; }

struct EmbedParams {
  EmbedNorm norm = EmbedNorm::wemd;
  double sigma = 0.0;         // 0 selects sigma_factor * median distance
  double sigma_factor = 0.5;
  int m = 2;
  double threshold_fraction = 0.0;  // 0 disables thresholding
  Wavelet wavelet = Wavelet::sym3;
  int levels = 5;

  void validate() const {
    detail::require(sigma >= 0.0, "embed: sigma must be >= 0");
    detail::require(sigma_factor > 0.0, "embed: sigma_factor must be positive");
    detail::require(m >= 1, "embed: m must be >= 1");
    detail::require(threshold_fraction >= 0.0 && threshold_fraction < 1.0,
                    "embed: threshold_fraction must lie in [0, 1)");
    detail::require(levels >= 1, "embed: levels must be >= 1");
  }
};

struct EmbedResult {
  Embedding embedding;
  double sigma = 0.0;
  double median_distance = 0.0;
  double score = std::numeric_limits<double>::quiet_NaN();
  double threshold = 0.0;
  double mean_nnz = 0.0;
};

inline double median_offdiagonal(const DistanceMatrix& D) {
  std::vector<double> v;
  const Eigen::Index n = D.values.rows();
  v.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) v.push_back(D.values(i, j));
  return median(std::move(v));
}

inline double l2_distance(const Volume& a, const Volume& b) {
  const auto n = static_cast<Eigen::Index>(a.voxels.size());
  detail::require(b.voxels.size() == a.voxels.size(), "l2 distance: volume size mismatch");
  const Eigen::Map<const Eigen::ArrayXd> pa(a.voxels.data(), n), pb(b.voxels.data(), n);
  return std::sqrt((pa - pb).square().sum());
}

inline DistanceMatrix volume_distances(const std::vector<Volume>& volumes, const EmbedParams& p,
                                       double* threshold = nullptr, double* mean_nnz = nullptr) {
  const std::size_t n = volumes.size();
  if (p.norm == EmbedNorm::euclidean) {
    return pairwise_distances(n, [&](std::size_t i, std::size_t j) { return l2_distance(volumes[i], volumes[j]); },
                              "euclidean");
  }
  std::vector<WaveletCoeffs> coeffs;
  coeffs.reserve(n);
  for (const auto& v : volumes) coeffs.push_back(wemd_embed(v, p.wavelet, p.levels));
  if (p.threshold_fraction <= 0.0) {
    return pairwise_distances(
        n, [&](std::size_t i, std::size_t j) { return dense_l1_distance(coeffs[i], coeffs[j]); }, "wemd");
  }
  const double t = select_threshold(coeffs, p.threshold_fraction);
  std::vector<SparseCoeffs> sparse;
  sparse.reserve(n);
  double nnz = 0.0;
  for (const auto& c : coeffs) {
    sparse.push_back(hard_threshold(c, t));
    nnz += static_cast<double>(sparse.back().index.size());
  }
  if (threshold) *threshold = t;
  if (mean_nnz) *mean_nnz = nnz / static_cast<double>(n);
  return DistanceMatrix{sparse_pairwise_l1(sparse), "wemd-sparse"};
}

inline EmbedResult embed_volumes(const std::vector<Volume>& volumes, const std::vector<double>& angles_deg,
                                 const EmbedParams& p) {
  p.validate();
  detail::require(volumes.size() >= static_cast<std::size_t>(p.m) + 2, "embed: too few volumes");
  EmbedResult r;
  const DistanceMatrix D = volume_distances(volumes, p, &r.threshold, &r.mean_nnz);
  r.median_distance = median_offdiagonal(D);
  r.sigma = p.sigma > 0.0 ? p.sigma : p.sigma_factor * r.median_distance;
  if (!(r.sigma > 0.0)) throw InvalidArgument("embed: all volumes coincide, sigma would be zero");
  r.embedding = embed(graph_laplacian(gaussian_affinity(D, r.sigma)), p.m);
  if (p.m == 2 && angles_deg.size() == volumes.size()) {
    Eigen::VectorXd ang(static_cast<Eigen::Index>(angles_deg.size()));
    for (std::size_t i = 0; i < angles_deg.size(); ++i)
      ang[static_cast<Eigen::Index>(i)] = angles_deg[i] * std::numbers::pi / 180.0;
    r.score = circular_score(r.embedding, ang);
  }
  return r;
}

inline std::string embedding_svg(const io::CsvTable& t) {
  svg::Plot plot{"Laplacian eigenmap", "phi_1", "phi_2"};
  plot.equal_aspect = true;
  return svg::render(plot, {{"samples", t.column_values("phi_1"), t.column_values("phi_2"), true}});
}

inline nlohmann::json write_embed(const fs::path& out, const EmbedParams& p, const Dataset& ds,
                                  const EmbedResult& r) {
  io::ensure_dir(out);
  io::CsvTable t;
  t.header.push_back("index");
  for (int j = 1; j <= p.m; ++j) t.header.push_back("phi_" + std::to_string(j));
  t.header.push_back("true_angle");
  for (Eigen::Index i = 0; i < r.embedding.coords.rows(); ++i) {
    std::vector<double> row{static_cast<double>(i)};
    for (int j = 0; j < p.m; ++j) row.push_back(r.embedding.coords(i, j));
    row.push_back(ds.angles_deg[static_cast<std::size_t>(i)]);
    t.rows.push_back(std::move(row));
  }
  io::write_csv(out / "embedding.csv", t);
  if (p.m >= 2) io::write_text(out / "scatter.svg", embedding_svg(io::read_csv(out / "embedding.csv")));
  nlohmann::json rep = {{"command", "embed"},
                        {"norm", to_string(p.norm)},
                        {"n", r.embedding.n},
                        {"m", p.m},
                        {"sigma", r.sigma},
                        {"median_distance", r.median_distance},
                        {"threshold_fraction", p.threshold_fraction},
                        {"threshold", r.threshold},
                        {"mean_nnz", r.mean_nnz},
                        {"disconnected", r.embedding.disconnected},
                        {"eigenvalues", std::vector<double>(r.embedding.eigenvalues.data(),
                                                            r.embedding.eigenvalues.data() +
                                                                r.embedding.eigenvalues.size())}};
  rep["circular_score"] = std::isfinite(r.score) ? nlohmann::json(r.score) : nlohmann::json(nullptr);
  io::write_json(out / "score.json", rep);
  return rep;
}

// ---------------------------------------------------------------------------
// distance-profile

struct ProfileParams {
  RotorConfig config = RotorConfig::defaults();
  double step_deg = 2.0;
  double max_deg = 180.0;
  bool noisy = false;
  Wavelet wavelet = Wavelet::sym3;
  int levels = 5;

  void validate() const {
    normlap::validate(config);
    detail::require(step_deg > 0.0, "distance-profile: step must be positive");
    detail::require(max_deg >= step_deg, "distance-profile: max must be >= step");
    detail::require(levels >= 1, "distance-profile: levels must be >= 1");
  }
};

struct ProfileResult {
  std::vector<double> offset_deg, wemd, l2, l2_scaled;
  double l2_scale = 1.0;
};

/// Distances between the volume at angle 0 and the volume rotated by each
/// offset. In noisy mode the rotated volumes use an independent noise stream.
inline ProfileResult distance_profile(const ProfileParams& p) {
  p.validate();
  RotorConfig cfg = p.config;
  if (!p.noisy) cfg.noise_std = 0.0;
  const Volume base = render_rotor_volume(0.0, cfg, 0).volume;
  const WaveletCoeffs cb = wemd_embed(base, p.wavelet, p.levels);
  ProfileResult r;
  const auto steps = static_cast<std::size_t>(std::floor(p.max_deg / p.step_deg + 1e-9));
  for (std::size_t k = 0; k <= steps; ++k) {
    const double off = p.step_deg * static_cast<double>(k);
    const Volume v = render_rotor_volume(off, cfg, 1).volume;
    r.offset_deg.push_back(off);
    r.wemd.push_back(dense_l1_distance(cb, wemd_embed(v, p.wavelet, p.levels)));
    r.l2.push_back(l2_distance(base, v));
  }
  const double mw = *std::max_element(r.wemd.begin(), r.wemd.end());
  const double ml = *std::max_element(r.l2.begin(), r.l2.end());
  r.l2_scale = ml > 0.0 ? mw / ml : 1.0;
  for (double d : r.l2) r.l2_scaled.push_back(d * r.l2_scale);
  return r;
}

inline std::string profile_svg(const io::CsvTable& t) {
  const auto x = t.column_values("offset_deg");
  return svg::render({"Distance to the unrotated volume", "offset [deg]", "distance"},
                     {{"WEMD", x, t.column_values("wemd"), false},
                      {"l2 (scaled)", x, t.column_values("l2_scaled"), false}});
}

inline nlohmann::json write_profile(const fs::path& out, const ProfileParams& p, const ProfileResult& r) {
  io::ensure_dir(out);
  io::CsvTable t{{"offset_deg", "wemd", "l2", "l2_scaled"}, {}};
  for (std::size_t k = 0; k < r.offset_deg.size(); ++k)
    t.rows.push_back({r.offset_deg[k], r.wemd[k], r.l2[k], r.l2_scaled[k]});
  io::write_csv(out / "profile.csv", t);
  io::write_text(out / "profile.svg", profile_svg(io::read_csv(out / "profile.csv")));
  auto count_decreases = [](const std::vector<double>& v) {
    int c = 0;
    for (std::size_t i = 1; i < v.size(); ++i) c += v[i] <= v[i - 1];
    return c;
  };
  nlohmann::json rep = {{"command", "distance-profile"},
                        {"noisy", p.noisy},
                        {"step_deg", p.step_deg},
                        {"max_deg", p.max_deg},
                        {"wavelet", to_string(p.wavelet)},
                        {"levels", p.levels},
                        {"l2_scale", r.l2_scale},
                        {"wemd_non_increasing_steps", count_decreases(r.wemd)},
                        {"l2_non_increasing_steps", count_decreases(r.l2)}};
  io::write_json(out / "report.json", rep);
  return rep;
}

// ---------------------------------------------------------------------------
// bench

inline const std::vector<std::size_t>& allowed_bench_sizes() {
  static const std::vector<std::size_t> s{25, 50, 100, 200, 400, 800};
  return s;
}

struct BenchParams {
  std::vector<std::size_t> sizes{25, 50, 100, 200, 400, 800};
  RotorConfig config = RotorConfig::defaults();
  double threshold_fraction = 0.9;
  Wavelet wavelet = Wavelet::sym3;
  int levels = 5;

  void validate() const {
    detail::require(!sizes.empty(), "bench: sizes must not be empty");
    for (auto n : sizes) {
      const auto& ok = allowed_bench_sizes();
      detail::require(std::find(ok.begin(), ok.end(), n) != ok.end(),
                      "bench: size " + std::to_string(n) + " not in {25,50,100,200,400,800}");
    }
    detail::require(threshold_fraction > 0.0 && threshold_fraction < 1.0,
                    "bench: threshold_fraction must lie in (0, 1)");
    normlap::validate(config);
  }
};

struct BenchRow {
  std::size_t n = 0;
  double dwt = 0, wemd_dense = 0, l2 = 0, wemd_sparse_clean = 0, wemd_sparse_noisy = 0;
  double nnz_clean = 0, nnz_noisy = 0;
};

inline BenchRow bench_one(std::size_t n, const BenchParams& p) {
  using clock = std::chrono::steady_clock;
  BenchRow row;
  row.n = n;
  RotorConfig clean_cfg = p.config;
  clean_cfg.noise_std = 0.0;
  const Dataset clean = make_dataset(n, clean_cfg, true);
  const Dataset noisy = make_dataset(n, p.config, true);
  double sink = 0.0;

  auto t0 = clock::now();
  std::vector<WaveletCoeffs> cc;
  cc.reserve(n);
  for (const auto& v : clean.volumes) cc.push_back(wemd_embed(v, p.wavelet, p.levels));
  row.dwt = seconds_since(t0);

  t0 = clock::now();
  sink += pairwise_distances(n, [&](std::size_t i, std::size_t j) { return dense_l1_distance(cc[i], cc[j]); },
                             "wemd").values.sum();
  row.wemd_dense = seconds_since(t0);

  t0 = clock::now();
  sink += pairwise_distances(
              n, [&](std::size_t i, std::size_t j) { return l2_distance(clean.volumes[i], clean.volumes[j]); },
              "euclidean")
              .values.sum();
  row.l2 = seconds_since(t0);

  auto sparse_stage = [&](const std::vector<WaveletCoeffs>& coeffs, double& nnz) {
    const double t = select_threshold(coeffs, p.threshold_fraction);
    std::vector<SparseCoeffs> sp;
    sp.reserve(coeffs.size());
    nnz = 0.0;
    for (const auto& c : coeffs) {
      sp.push_back(hard_threshold(c, t));
      nnz += static_cast<double>(sp.back().index.size());
    }
    nnz /= static_cast<double>(coeffs.size());
    const auto ts = clock::now();
    sink += sparse_pairwise_l1(sp).sum();
    return seconds_since(ts);
  };
  row.wemd_sparse_clean = sparse_stage(cc, row.nnz_clean);

  std::vector<WaveletCoeffs> nc;
  nc.reserve(n);
  for (const auto& v : noisy.volumes) nc.push_back(wemd_embed(v, p.wavelet, p.levels));
  row.wemd_sparse_noisy = sparse_stage(nc, row.nnz_noisy);

  if (!std::isfinite(sink)) throw Error("bench: non-finite distance sum");
  return row;
}

inline std::vector<BenchRow> bench(const BenchParams& p) {
  p.validate();
  std::vector<BenchRow> rows;
  for (auto n : p.sizes) rows.push_back(bench_one(n, p));
  return rows;
}

inline nlohmann::json write_bench(const fs::path& out, const BenchParams& p, const std::vector<BenchRow>& rows) {
  io::ensure_dir(out);
  io::CsvTable t{{"n", "dwt_s", "wemd_dense_s", "l2_s", "wemd_sparse_clean_s", "wemd_sparse_noisy_s",
                  "nnz_clean_mean", "nnz_noisy_mean"},
                 {}};
  for (const auto& r : rows)
    t.rows.push_back({static_cast<double>(r.n), r.dwt, r.wemd_dense, r.l2, r.wemd_sparse_clean, r.wemd_sparse_noisy,
                      r.nnz_clean, r.nnz_noisy});
  io::write_csv(out / "timings.csv", t);
  nlohmann::json rep = {{"command", "bench"},
                        {"sizes", p.sizes},
                        {"threshold_fraction", p.threshold_fraction},
                        {"wavelet", to_string(p.wavelet)},
                        {"levels", p.levels},
                        {"coefficients_per_volume",
                         p.config.dims[0] * p.config.dims[1] * p.config.dims[2]}};
  io::write_json(out / "report.json", rep);
  return rep;
}

}  // namespace normlap::experiments
