#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "normlap/experiments.hpp"

using namespace normlap;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("normlap_exp_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

RotorConfig small_config() {
  RotorConfig c = RotorConfig::defaults();
  c.dims = {16, 16, 16};
  for (Blob& b : c.rotor_blobs) b.center = {7.5 + (b.center[0] - 15.5) / 2, 7.5 + (b.center[1] - 15.5) / 2, b.center[2] / 2};
  for (Blob& b : c.static_blobs) b.center = {7.5, 7.5, b.center[2] / 2};
  c.blob_sigma = 1.0;
  return c;
}

}  // namespace

TEST(Io, CsvRoundTripKeepsFullPrecision) {
  const auto dir = scratch_dir("csv");
  io::ensure_dir(dir);
  io::CsvTable t{{"a", "b"}, {{0.1, 1.0 / 3.0}, {-2.5e-300, std::nextafter(1.0, 2.0)}}};
  io::write_csv(dir / "t.csv", t);
  const io::CsvTable r = io::read_csv(dir / "t.csv");
  EXPECT_EQ(r.header, t.header);
  EXPECT_EQ(r.rows, t.rows);
  EXPECT_EQ(r.column("b"), 1u);
  EXPECT_THROW(r.column("c"), InvalidArgument);
  EXPECT_THROW(io::read_csv(dir / "missing.csv"), IoError);
  std::ofstream(dir / "bad.csv") << "a,b\n1,2\n3\n";
  EXPECT_THROW(io::read_csv(dir / "bad.csv"), IoError);
  std::ofstream(dir / "bad.json") << "{";
  EXPECT_THROW(io::read_json(dir / "bad.json"), IoError);
  fs::remove_all(dir);
}

TEST(Io, MatrixTableAndCoefficientRecords) {
  Eigen::MatrixXd m(2, 3);
  m << 1, 2, 3, 4, 5, 6.25;
  const io::CsvTable t = io::matrix_table(m);
  EXPECT_EQ(t.header, (std::vector<std::string>{"col_0", "col_1", "col_2"}));
  EXPECT_EQ(t.rows[1], (std::vector<double>{4, 5, 6.25}));
  const LimitOperatorCoeffs c = limit_operator_coeffs(Norm::weighted_l1(Eigen::Vector2d(1, 1.5)),
                                                      circle_tangent(std::numbers::pi / 4), TiltMethod::c1);
  const nlohmann::json j = io::coeff_record(0.5, c);
  EXPECT_EQ(j.at("id").get<double>(), 0.5);
  EXPECT_NEAR(j.at("second_order")[0][0].get<double>(), 0.0603398, 1e-7);
  EXPECT_NEAR(j.at("first_order")[0].get<double>(), 0.0362039, 1e-7);
}

TEST(Svg, RenderIsDeterministicAndEscapes) {
  svg::Plot plot{"a < b & c", "x", "y"};
  const std::vector<svg::Series> s{{"line", {0, 1, 2}, {0, 1, 4}, false}, {"pts", {0, 2}, {1, 3}, true}};
  const std::string a = svg::render(plot, s), b = svg::render(plot, s);
  EXPECT_EQ(a, b);
  EXPECT_NE(a.find("a &lt; b &amp; c"), std::string::npos);
  EXPECT_EQ(a.rfind("<svg", 0), 0u);
  EXPECT_NE(a.find("</svg>"), std::string::npos);
}

TEST(Experiments, VerifyCircleSmallRun) {
  experiments::VerifyCircleParams p;
  p.n = 2000;
  p.grid_points = 40;
  const auto r = experiments::verify_circle(p);
  ASSERT_EQ(r.theta.size(), 40u);
  EXPECT_GT(r.points_used, 0u);
  EXPECT_LT(r.points_used, 40u);
  EXPECT_TRUE(std::isfinite(r.rms_rel_error));
  for (std::size_t k = 0; k < r.theta.size(); ++k)
    EXPECT_EQ(r.included[k], !experiments::near_axis(r.theta[k], p.exclude_deg));
  const auto dir = scratch_dir("verify");
  const auto rep = experiments::write_verify_circle(dir, p, r);
  EXPECT_EQ(rep.at("points_used").get<std::size_t>(), r.points_used);
  for (const char* f : {"empirical.csv", "theoretical.csv", "overlay.svg", "report.json"})
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  EXPECT_EQ(slurp(dir / "overlay.svg"), experiments::overlay_svg(io::read_csv(dir / "empirical.csv"),
                                                                  io::read_csv(dir / "theoretical.csv")));
  fs::remove_all(dir);
  p.n = 1;
  EXPECT_THROW(experiments::verify_circle(p), InvalidArgument);
}

TEST(Experiments, NearAxis) {
  EXPECT_TRUE(experiments::near_axis(0.0, 5));
  EXPECT_TRUE(experiments::near_axis(std::numbers::pi / 2 + 0.08, 5));
  EXPECT_FALSE(experiments::near_axis(std::numbers::pi / 4, 5));
  EXPECT_TRUE(experiments::near_axis(2 * std::numbers::pi - 0.01, 5));
}

TEST(Experiments, EigenfunctionsArtifactsAndLocalization) {
  experiments::EigenfunctionsParams p;
  p.n_grid = 2000;
  p.w1 = 8;
  p.w2 = 1;
  p.k = 4;
  const auto r = experiments::eigenfunctions(p);
  ASSERT_EQ(r.sign_changes.size(), 4u);
  for (int i = 0; i < 4; ++i) EXPECT_LE(r.eig.eigenvalues[i], 1e-6);
  for (std::size_t i = 1; i < 4; ++i) EXPECT_GE(r.sign_changes[i], r.sign_changes[i - 1]);
  // The first non-constant mode is larger near the axis where the norm is smaller.
  const Eigen::VectorXd phi = r.eig.eigenfunctions.col(1);
  double near0 = 0, near90 = 0;
  for (Eigen::Index i = 0; i < phi.size(); ++i) {
    const double th = r.op.theta[i];
    if (std::abs(std::sin(th)) < 0.3) near0 = std::max(near0, std::abs(phi[i]));
    if (std::abs(std::cos(th)) < 0.3) near90 = std::max(near90, std::abs(phi[i]));
  }
  EXPECT_GT(std::max(near0, near90) / std::min(near0, near90), 1.0);
  const auto dir = scratch_dir("eig");
  experiments::write_eigenfunctions(dir, p, r);
  const io::CsvTable t = io::read_csv(dir / "eigenfunctions.csv");
  ASSERT_EQ(t.rows.size(), 2000u);
  EXPECT_EQ(t.rows[5][2], r.eig.eigenfunctions(5, 1));
  EXPECT_EQ(slurp(dir / "plot.svg"), experiments::eigenfunctions_svg(t));
  const auto rep = io::read_json(dir / "eigenvalues.json");
  EXPECT_EQ(rep.at("sign_changes").get<std::vector<int>>(), r.sign_changes);
  fs::remove_all(dir);
  p.k = 0;
  EXPECT_THROW(experiments::eigenfunctions(p), InvalidArgument);
}

TEST(Experiments, EmbedWithThresholdRetainsMass) {
  RotorConfig c = small_config();
  c.seed = 5;
  const Dataset ds = make_dataset(40, c, false);
  experiments::EmbedParams p;
  p.levels = 3;
  p.threshold_fraction = 0.9;
  const auto r = experiments::embed_volumes(ds.volumes, ds.angles_deg, p);
  EXPECT_GT(r.threshold, 0.0);
  double kept = 0, total = 0;
  for (const Volume& v : ds.volumes) {
    const WaveletCoeffs w = wemd_embed(v, p.wavelet, p.levels);
    for (double x : w.values) total += std::abs(x);
    for (double x : hard_threshold(w, r.threshold).value) kept += std::abs(x);
  }
  EXPECT_GE(kept / total, 0.9);
  EXPECT_LE(kept / total, 0.92);
  EXPECT_TRUE(std::isfinite(r.score));
  EXPECT_GE(r.score, 0.0);
  EXPECT_LE(r.score, 1.0);
  experiments::EmbedParams full = p;
  full.threshold_fraction = 0.0;
  EXPECT_NEAR(r.score, experiments::embed_volumes(ds.volumes, ds.angles_deg, full).score, 0.02);
  const auto dir = scratch_dir("embed");
  experiments::write_embed(dir, p, ds, r);
  EXPECT_EQ(slurp(dir / "scatter.svg"), experiments::embedding_svg(io::read_csv(dir / "embedding.csv")));
  EXPECT_TRUE(fs::exists(dir / "score.json"));
  fs::remove_all(dir);
}

TEST(Experiments, EmbedErrors) {
  EXPECT_THROW(experiments::parse_embed_norm("l7"), InvalidArgument);
  EXPECT_EQ(experiments::parse_embed_norm("euclidean"), experiments::EmbedNorm::euclidean);
  std::vector<Volume> same(5, Volume::zeros(8, 8, 8));
  experiments::EmbedParams p;
  p.norm = experiments::EmbedNorm::euclidean;
  EXPECT_THROW(experiments::embed_volumes(same, {}, p), InvalidArgument);
  EXPECT_THROW(experiments::embed_volumes({Volume::zeros(8, 8, 8)}, {}, p), InvalidArgument);
}

TEST(Experiments, DistanceProfileCleanAndNoisy) {
  experiments::ProfileParams p;
  p.config = small_config();
  p.levels = 3;
  p.step_deg = 30;
  const auto clean = experiments::distance_profile(p);
  ASSERT_EQ(clean.offset_deg.size(), 7u);
  EXPECT_EQ(clean.wemd[0], 0.0);
  EXPECT_EQ(clean.l2[0], 0.0);
  p.noisy = true;
  const auto noisy = experiments::distance_profile(p);
  EXPECT_GT(noisy.wemd[0], 0.0);
  EXPECT_GT(noisy.l2[0], 0.0);
  p.step_deg = 0;
  EXPECT_THROW(experiments::distance_profile(p), InvalidArgument);
}

TEST(Experiments, BenchRejectsUnlistedSizes) {
  experiments::BenchParams p;
  p.sizes = {30};
  EXPECT_THROW(experiments::bench(p), InvalidArgument);
}

TEST(Experiments, Median) {
  EXPECT_EQ(experiments::median({3, 1, 2}), 2.0);
  EXPECT_EQ(experiments::median({4, 1, 2, 3}), 2.5);
  EXPECT_THROW(experiments::median({}), InvalidArgument);
}
