#pragma once

// Synthetic data: uniform samples on the unit circle and a family of 3-D
// "rotor" density maps whose conformations form a circle.

#include <Eigen/Dense>

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "normlap/error.hpp"
#include "normlap/laplacian.hpp"
#include "normlap/wavelets.hpp"

namespace normlap {

/// n i.i.d. draws (degrees, [0, 360)) from
/// 0.4 U[0,360] + 0.2 N(0,1) + 0.2 N(120,1) + 0.2 N(240,1), wrapped mod 360.
inline std::vector<double> sample_angles(std::size_t n, std::uint64_t seed) {
  detail::require(n >= 1, "sample_angles: n must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> out(n);
  for (auto& a : out) {
    const double u = unif(rng);
    double x;
    if (u < 0.4) {
      x = 360.0 * unif(rng);
    } else {
      const double mu = u < 0.6 ? 0.0 : (u < 0.8 ? 120.0 : 240.0);
      x = mu + gauss(rng);
    }
    x = std::fmod(x, 360.0);
    if (x < 0.0) x += 360.0;
    if (x >= 360.0) x = 0.0;
    a = x;
  }
  return out;
}

/// n uniform samples on the unit circle; the angles (radians) are written to
/// `angles` when it is non-null.
inline PointCloud sample_circle(std::size_t n, std::uint64_t seed, std::vector<double>* angles = nullptr) {
  detail::require(n >= 1, "sample_circle: n must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 2.0 * std::numbers::pi);
  PointCloud pts(static_cast<Eigen::Index>(n), 2);
  if (angles) angles->resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = unif(rng);
    pts(static_cast<Eigen::Index>(i), 0) = std::cos(t);
    pts(static_cast<Eigen::Index>(i), 1) = std::sin(t);
    if (angles) (*angles)[i] = t;
  }
  return pts;
}

struct Blob {
  std::array<double, 3> center{};  // voxel coordinates
  double amplitude = 1.0;
};

struct RotorConfig {
  Dims3 dims{32, 32, 32};
  std::vector<Blob> rotor_blobs;   // rotated about the central z-axis
  std::vector<Blob> static_blobs;  // fixed
  double blob_sigma = 1.5;         // voxels
  double noise_std = 0.1;          // fraction of the max clean voxel value
  std::uint64_t seed = 2020;

  /// 32^3 grid, three rotor blobs at distinct radius/height and two stator blobs.
  static RotorConfig defaults() {
    RotorConfig c;
    auto polar = [](double r, double deg, double z, double amp) {
      const double t = deg * std::numbers::pi / 180.0;
      return Blob{{15.5 + r * std::cos(t), 15.5 + r * std::sin(t), z}, amp};
    };
    c.rotor_blobs = {polar(4.0, 0.0, 22.0, 1.0), polar(2.5, 152.0, 21.5, 0.8), polar(2.35, 71.0, 22.5, 0.6)};
    c.static_blobs = {{{15.5, 15.5, 5.0}, 1.0}, {{15.5, 15.5, 26.0}, 0.7}};
    return c;
  }
};

namespace detail {

inline std::array<double, 3> rotate_about_axis(const std::array<double, 3>& p, const Dims3& dims, double deg) {
  const double cx = (static_cast<double>(dims[0]) - 1.0) / 2.0;
  const double cy = (static_cast<double>(dims[1]) - 1.0) / 2.0;
  const double t = deg * std::numbers::pi / 180.0;
  const double x = p[0] - cx, y = p[1] - cy;
  return {cx + std::cos(t) * x - std::sin(t) * y, cy + std::sin(t) * x + std::cos(t) * y, p[2]};
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

inline void validate(const RotorConfig& c) {
  for (std::size_t a = 0; a < 3; ++a) detail::require(c.dims[a] >= 8, "rotor config: dims must be >= 8 per axis");
  detail::require(!c.rotor_blobs.empty(), "rotor config: rotor blob list is empty");
  detail::require(!c.static_blobs.empty(), "rotor config: static blob list is empty");
  detail::require(c.blob_sigma > 0.0 && std::isfinite(c.blob_sigma), "rotor config: blob_sigma must be > 0");
  detail::require(c.noise_std >= 0.0 && std::isfinite(c.noise_std), "rotor config: noise_std must be >= 0");
  // Reject rotors invariant under a rotation by 360/k degrees.
  const std::size_t nb = c.rotor_blobs.size();
  for (std::size_t k = 2; k <= std::max<std::size_t>(nb, 2); ++k) {
    bool symmetric = true;
    for (const Blob& b : c.rotor_blobs) {
      const auto r = detail::rotate_about_axis(b.center, c.dims, 360.0 / static_cast<double>(k));
      bool found = false;
      for (const Blob& o : c.rotor_blobs) {
        const double dx = r[0] - o.center[0], dy = r[1] - o.center[1], dz = r[2] - o.center[2];
        if (std::sqrt(dx * dx + dy * dy + dz * dz) < 1e-6 && std::abs(b.amplitude - o.amplitude) < 1e-12) {
          found = true;
        }
      }
      if (!found) symmetric = false;
    }
    if (symmetric) throw InvalidArgument("rotor config: rotor has rotational self-symmetry");
  }
}

struct RenderResult {
  Volume volume;
  bool out_of_bounds = false;  // some blob centre lies more than 3 sigma outside the grid
};

/// Gaussian blobs (stators fixed, rotor rotated by angle_deg about the
/// central z-axis) plus seeded noise. The noise stream is determined by
/// (config.seed, stream, angle_deg).
inline RenderResult render_rotor_volume(double angle_deg, const RotorConfig& config, std::uint64_t stream = 0) {
  validate(config);
  detail::require(std::isfinite(angle_deg), "render_rotor_volume: angle must be finite");
  const Dims3& dims = config.dims;
  RenderResult out;
  out.volume = Volume::zeros(dims[0], dims[1], dims[2]);
  const double inv2s2 = 1.0 / (2.0 * config.blob_sigma * config.blob_sigma);
  const double margin = 3.0 * config.blob_sigma;
  std::array<std::vector<double>, 3> prof;
  auto add_blob = [&](const std::array<double, 3>& c, double amp) {
    for (std::size_t a = 0; a < 3; ++a) {
      if (c[a] < -margin || c[a] > static_cast<double>(dims[a]) - 1.0 + margin) out.out_of_bounds = true;
      prof[a].resize(dims[a]);
      for (std::size_t i = 0; i < dims[a]; ++i) {
        const double t = static_cast<double>(i) - c[a];
        prof[a][i] = std::exp(-t * t * inv2s2);
      }
    }
    double* v = out.volume.voxels.data();
    for (std::size_t i = 0; i < dims[0]; ++i)
      for (std::size_t j = 0; j < dims[1]; ++j) {
        const double xy = amp * prof[0][i] * prof[1][j];
        for (std::size_t k = 0; k < dims[2]; ++k) *v++ += xy * prof[2][k];
      }
  };
  double ang = std::fmod(angle_deg, 360.0);
  if (ang < 0.0) ang += 360.0;
  for (const Blob& b : config.static_blobs) add_blob(b.center, b.amplitude);
  for (const Blob& b : config.rotor_blobs) add_blob(detail::rotate_about_axis(b.center, dims, ang), b.amplitude);

  if (config.noise_std > 0.0) {
    double vmax = 0.0;
    for (double x : out.volume.voxels) vmax = std::max(vmax, x);
    const std::uint64_t key = detail::splitmix64(config.seed ^ detail::splitmix64(stream ^
                                                 detail::splitmix64(std::bit_cast<std::uint64_t>(ang))));
    std::mt19937_64 rng(key);
    std::normal_distribution<double> gauss(0.0, config.noise_std * vmax);
    for (double& x : out.volume.voxels) x += gauss(rng);
  }
  return out;
}

struct Dataset {
  std::vector<Volume> volumes;
  std::vector<double> angles_deg;
  bool centered = false;
  bool out_of_bounds = false;
};

/// n volumes at mixture-distributed angles; with `center`, the dataset mean
/// volume is subtracted from every volume.
inline Dataset make_dataset(std::size_t n, const RotorConfig& config, bool center) {
  detail::require(n >= 2, "make_dataset: n must be >= 2");
  Dataset ds;
  ds.angles_deg = sample_angles(n, config.seed);
  ds.volumes.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    RenderResult r = render_rotor_volume(ds.angles_deg[i], config, i);
    ds.out_of_bounds = ds.out_of_bounds || r.out_of_bounds;
    ds.volumes.push_back(std::move(r.volume));
  }
  if (center) {
    std::vector<double> mean(ds.volumes[0].size(), 0.0);
    for (const Volume& v : ds.volumes)
      for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += v.voxels[k];
    for (double& m : mean) m /= static_cast<double>(n);
    for (Volume& v : ds.volumes)
      for (std::size_t k = 0; k < mean.size(); ++k) v.voxels[k] -= mean[k];
    ds.centered = true;
  }
  return ds;
}

inline nlohmann::json to_json(const RotorConfig& c) {
  auto blobs = [](const std::vector<Blob>& bs) {
    nlohmann::json a = nlohmann::json::array();
    for (const Blob& b : bs) a.push_back({{"center", b.center}, {"amplitude", b.amplitude}});
    return a;
  };
  return {{"dims", c.dims},          {"rotor_blobs", blobs(c.rotor_blobs)},
          {"static_blobs", blobs(c.static_blobs)}, {"blob_sigma", c.blob_sigma},
          {"noise_std", c.noise_std}, {"seed", c.seed}};
}

/// Missing keys keep the values of `base`.
inline RotorConfig rotor_config_from_json(const nlohmann::json& j, RotorConfig base = RotorConfig::defaults()) {
  auto blobs = [](const nlohmann::json& a) {
    std::vector<Blob> out;
    for (const auto& b : a) out.push_back({b.at("center").get<std::array<double, 3>>(), b.value("amplitude", 1.0)});
    return out;
  };
  try {
    if (j.contains("dims")) base.dims = j.at("dims").get<Dims3>();
    if (j.contains("rotor_blobs")) base.rotor_blobs = blobs(j.at("rotor_blobs"));
    if (j.contains("static_blobs")) base.static_blobs = blobs(j.at("static_blobs"));
    if (j.contains("blob_sigma")) base.blob_sigma = j.at("blob_sigma").get<double>();
    if (j.contains("noise_std")) base.noise_std = j.at("noise_std").get<double>();
    if (j.contains("seed")) base.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("rotor config: ") + e.what());
  }
  validate(base);
  return base;
}

inline std::string volume_file_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "vol_%05zu.f32", i);
  return buf;
}

/// Writes manifest.json and vol_%05d.f32 files into dir (created if needed).
inline void write_dataset(const std::filesystem::path& dir, const Dataset& ds, const RotorConfig& config) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("write_dataset: cannot create " + dir.string() + ": " + ec.message());
  nlohmann::json files = nlohmann::json::array();
  for (std::size_t i = 0; i < ds.volumes.size(); ++i) {
    const std::string name = volume_file_name(i);
    write_volume((dir / name).string(), ds.volumes[i]);
    files.push_back(name);
  }
  nlohmann::json m = {{"config", to_json(config)}, {"seed", config.seed}, {"centered", ds.centered},
                      {"n", ds.volumes.size()},    {"angles_deg", ds.angles_deg}, {"files", files}};
  std::ofstream os(dir / "manifest.json");
  if (!os) throw IoError("write_dataset: cannot write manifest in " + dir.string());
  os << m.dump(2) << '\n';
  if (!os) throw IoError("write_dataset: failed writing manifest");
}

inline Dataset read_dataset(const std::filesystem::path& dir, RotorConfig* config = nullptr) {
  std::ifstream is(dir / "manifest.json");
  if (!is) throw IoError("read_dataset: missing manifest.json in " + dir.string());
  nlohmann::json m;
  try {
    is >> m;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("read_dataset: corrupt manifest: ") + e.what());
  }
  Dataset ds;
  try {
    ds.angles_deg = m.at("angles_deg").get<std::vector<double>>();
    ds.centered = m.value("centered", false);
    const auto files = m.at("files").get<std::vector<std::string>>();
    if (files.size() != ds.angles_deg.size()) throw IoError("read_dataset: manifest angle/file count mismatch");
    for (const auto& f : files) ds.volumes.push_back(read_volume((dir / f).string()));
    if (config) *config = rotor_config_from_json(m.at("config"));
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("read_dataset: corrupt manifest: ") + e.what());
  }
  return ds;
}

}  // namespace normlap
