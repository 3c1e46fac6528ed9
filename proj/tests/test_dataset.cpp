#include <cmath>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "normlap/dataset.hpp"

using namespace normlap;

namespace {

std::filesystem::path scratch_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("normlap_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

RotorConfig small_config() {
  RotorConfig c = RotorConfig::defaults();
  c.dims = {16, 16, 16};
  for (Blob& b : c.rotor_blobs) {
    b.center[0] = 7.5 + (b.center[0] - 15.5) / 2;
    b.center[1] = 7.5 + (b.center[1] - 15.5) / 2;
    b.center[2] /= 2;
  }
  for (Blob& b : c.static_blobs) {
    b.center = {7.5, 7.5, b.center[2] / 2};
  }
  return c;
}

}  // namespace

TEST(Dataset, AnglesAreDeterministicAndInRange) {
  const auto a = sample_angles(500, 7), b = sample_angles(500, 7), c = sample_angles(500, 8);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  for (double x : a) {
    EXPECT_GE(x, 0.0);
    EXPECT_LT(x, 360.0);
  }
  EXPECT_THROW(sample_angles(0, 1), InvalidArgument);
}

TEST(Dataset, CirclePointsLieOnTheCircle) {
  std::vector<double> ang;
  const PointCloud p = sample_circle(100, 3, &ang);
  ASSERT_EQ(ang.size(), 100u);
  for (Eigen::Index i = 0; i < 100; ++i) {
    EXPECT_NEAR(p.row(i).norm(), 1.0, 1e-15);
    EXPECT_NEAR(std::atan2(p(i, 1), p(i, 0)), std::remainder(ang[static_cast<std::size_t>(i)], 2 * std::numbers::pi),
                1e-12);
  }
}

TEST(Dataset, RenderIsDeterministic) {
  const RotorConfig c = small_config();
  const Volume a = render_rotor_volume(33.0, c, 4).volume, b = render_rotor_volume(33.0, c, 4).volume;
  EXPECT_EQ(a.voxels, b.voxels);
  const Volume other = render_rotor_volume(33.0, c, 5).volume;
  EXPECT_NE(a.voxels, other.voxels);
}

TEST(Dataset, ZeroAndFullTurnAreIdentical) {
  const RotorConfig c = small_config();
  EXPECT_EQ(render_rotor_volume(0.0, c).volume.voxels, render_rotor_volume(360.0, c).volume.voxels);
  EXPECT_EQ(render_rotor_volume(-90.0, c).volume.voxels, render_rotor_volume(270.0, c).volume.voxels);
}

TEST(Dataset, NoiseFreeRenderingIgnoresSeedAndStream) {
  RotorConfig c = small_config();
  c.noise_std = 0.0;
  const Volume a = render_rotor_volume(45.0, c, 0).volume;
  c.seed = 99;
  const Volume b = render_rotor_volume(45.0, c, 17).volume;
  EXPECT_EQ(a.voxels, b.voxels);
}

TEST(Dataset, RotationMovesMass) {
  RotorConfig c = small_config();
  c.noise_std = 0.0;
  const Volume a = render_rotor_volume(0.0, c).volume, b = render_rotor_volume(90.0, c).volume;
  double diff = 0, sa = 0, sb = 0;
  for (std::size_t i = 0; i < a.voxels.size(); ++i) {
    diff += std::abs(a.voxels[i] - b.voxels[i]);
    sa += a.voxels[i];
    sb += b.voxels[i];
  }
  EXPECT_GT(diff, 1.0);
  EXPECT_NEAR(sa, sb, 1e-3 * sa);
}

TEST(Dataset, ValidateRejectsBadConfigs) {
  RotorConfig c = RotorConfig::defaults();
  EXPECT_NO_THROW(validate(c));
  RotorConfig bad = c;
  bad.rotor_blobs.clear();
  EXPECT_THROW(validate(bad), InvalidArgument);
  bad = c;
  bad.blob_sigma = 0.0;
  EXPECT_THROW(validate(bad), InvalidArgument);
  bad = c;
  bad.noise_std = -0.1;
  EXPECT_THROW(validate(bad), InvalidArgument);
  bad = c;
  bad.dims = {4, 32, 32};
  EXPECT_THROW(validate(bad), InvalidArgument);
  bad = c;
  bad.rotor_blobs = {{{19.5, 15.5, 20.0}, 1.0}, {{11.5, 15.5, 20.0}, 1.0}};
  EXPECT_THROW(validate(bad), InvalidArgument);
  EXPECT_THROW(render_rotor_volume(std::nan(""), c), InvalidArgument);
}

TEST(Dataset, OutOfBoundsBlobIsFlagged) {
  RotorConfig c = small_config();
  c.static_blobs.push_back({{40.0, 7.5, 7.5}, 1.0});
  EXPECT_TRUE(render_rotor_volume(0.0, c).out_of_bounds);
  EXPECT_FALSE(render_rotor_volume(0.0, small_config()).out_of_bounds);
}

TEST(Dataset, CenteringRemovesTheMean) {
  const Dataset ds = make_dataset(6, small_config(), true);
  EXPECT_TRUE(ds.centered);
  for (std::size_t k = 0; k < ds.volumes[0].size(); k += 97) {
    double s = 0;
    for (const Volume& v : ds.volumes) s += v.voxels[k];
    EXPECT_NEAR(s, 0.0, 1e-12);
  }
  EXPECT_THROW(make_dataset(1, small_config(), false), InvalidArgument);
}

TEST(Dataset, WriteReadRoundTrip) {
  const auto dir = scratch_dir("roundtrip");
  RotorConfig c = small_config();
  c.seed = 11;
  const Dataset ds = make_dataset(4, c, false);
  write_dataset(dir, ds, c);
  RotorConfig back;
  const Dataset r = read_dataset(dir, &back);
  ASSERT_EQ(r.volumes.size(), 4u);
  EXPECT_EQ(r.angles_deg, ds.angles_deg);
  EXPECT_EQ(back.seed, 11u);
  EXPECT_EQ(back.dims, c.dims);
  EXPECT_EQ(back.rotor_blobs.size(), c.rotor_blobs.size());
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t k = 0; k < r.volumes[i].size(); ++k)
      EXPECT_EQ(r.volumes[i].voxels[k], static_cast<double>(static_cast<float>(ds.volumes[i].voxels[k])));
  std::filesystem::remove_all(dir);
}

TEST(Dataset, CorruptOrMissingManifest) {
  const auto dir = scratch_dir("corrupt");
  EXPECT_THROW(read_dataset(dir), IoError);
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "manifest.json") << "{ not json";
  EXPECT_THROW(read_dataset(dir), IoError);
  std::ofstream(dir / "manifest.json") << R"({"angles_deg": [1, 2], "files": ["a.f32"]})";
  EXPECT_THROW(read_dataset(dir), IoError);
  std::ofstream(dir / "manifest.json") << R"({"angles_deg": [1], "files": ["missing.f32"]})";
  EXPECT_THROW(read_dataset(dir), IoError);
  std::filesystem::remove_all(dir);
}

TEST(Dataset, ConfigJsonRoundTrip) {
  RotorConfig c = RotorConfig::defaults();
  c.noise_std = 0.25;
  const RotorConfig r = rotor_config_from_json(to_json(c));
  EXPECT_EQ(r.noise_std, 0.25);
  EXPECT_EQ(r.blob_sigma, c.blob_sigma);
  ASSERT_EQ(r.static_blobs.size(), c.static_blobs.size());
  EXPECT_EQ(r.static_blobs[1].center, c.static_blobs[1].center);
  const RotorConfig partial = rotor_config_from_json(nlohmann::json{{"noise_std", 0.0}});
  EXPECT_EQ(partial.noise_std, 0.0);
  EXPECT_EQ(partial.rotor_blobs.size(), 3u);
}
