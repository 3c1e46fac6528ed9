#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "normlap/dataset.hpp"
#include "normlap/experiments.hpp"
#include "normlap/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace normlap;
namespace ex = normlap::experiments;

namespace {

struct Common {
  std::string out;
  std::uint64_t seed = 2020;
  std::string config;
};

void add_common(CLI::App* sub, Common& c, const std::string& default_out) {
  c.out = default_out;
  sub->add_option("--out", c.out, "output directory")->capture_default_str();
  sub->add_option("--seed", c.seed, "random seed")->capture_default_str();
  sub->add_option("--config", c.config, "JSON file with option values; flags given on the command line win")
      ->check(CLI::ExistingFile);
}

std::string scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  return v.dump();
}

// Values from the config file are fed through the same option parsers as
// command-line flags, but only for options the user did not pass.
void merge_config(CLI::App* sub, const std::string& path, json* rotor) {
  if (path.empty()) return;
  const json j = io::read_json(path);
  if (!j.is_object()) throw IoError("config: top level of " + path + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (key == "rotor" && rotor) {
      *rotor = value;
      continue;
    }
    if (key == "config") throw InvalidArgument("config: nested 'config' key is not allowed");
    CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (!opt) throw InvalidArgument("config: unknown key '" + key + "' for " + sub->get_name());
    if (opt->count() > 0) continue;
    if (value.is_array()) {
      for (const auto& e : value) opt->add_result(scalar_text(e));
    } else {
      opt->add_result(scalar_text(value));
    }
    opt->run_callback();
  }
}

RotorConfig rotor_from(const json& rotor, std::uint64_t seed, double noise_std, bool noise_set) {
  RotorConfig c = rotor.is_null() ? RotorConfig::defaults() : rotor_config_from_json(rotor);
  c.seed = seed;
  if (noise_set) c.noise_std = noise_std;
  validate(c);
  return c;
}

void finish(const fs::path& out, json config, const json& report) {
  io::write_json(out / "config.json", config);
  std::cout << report.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph Laplacians under arbitrary norms: experiments and figures"};
  app.require_subcommand(1);

  // verify-circle
  Common vc_common;
  ex::VerifyCircleParams vc;
  auto* vc_cmd = app.add_subcommand("verify-circle", "point-cloud vs limiting operator on the unit circle");
  add_common(vc_cmd, vc_common, "out/verify-circle");
  vc_cmd->add_option("--n", vc.n, "number of samples")->capture_default_str();
  vc_cmd->add_option("--w1", vc.w1, "weight of |x|")->capture_default_str();
  vc_cmd->add_option("--w2", vc.w2, "weight of |y|")->capture_default_str();
  vc_cmd->add_option("--alpha", vc.alpha, "bandwidth schedule exponent offset")->capture_default_str();
  vc_cmd->add_option("--grid-points", vc.grid_points, "evaluation grid size")->capture_default_str();
  vc_cmd->add_option("--exclude-deg", vc.exclude_deg, "half-width of excluded bands around the axes")
      ->capture_default_str();

  // eigenfunctions
  Common ef_common;
  ex::EigenfunctionsParams ef;
  auto* ef_cmd = app.add_subcommand("eigenfunctions", "finite-difference eigenpairs of the circle operator");
  add_common(ef_cmd, ef_common, "out/eigenfunctions");
  ef_cmd->add_option("--n-grid", ef.n_grid, "grid size")->capture_default_str();
  ef_cmd->add_option("--w1", ef.w1, "weight of |x|")->capture_default_str();
  ef_cmd->add_option("--w2", ef.w2, "weight of |y|")->capture_default_str();
  ef_cmd->add_option("--k", ef.k, "number of eigenpairs")->capture_default_str();
  ef_cmd->add_option("--shift", ef.shift, "shift for the inverted operator")->capture_default_str();

  // embed
  Common em_common;
  ex::EmbedParams em;
  std::string em_dataset, em_norm = "wemd", em_wavelet = "sym3";
  auto* em_cmd = app.add_subcommand("embed", "Laplacian eigenmap of a volume dataset");
  add_common(em_cmd, em_common, "out/embed");
  em_cmd->add_option("--dataset", em_dataset, "dataset directory written by gen-data");
  em_cmd->add_option("--norm", em_norm, "euclidean or wemd")->capture_default_str();
  em_cmd->add_option("--sigma", em.sigma, "kernel width; 0 uses sigma-factor * median distance")
      ->capture_default_str();
  em_cmd->add_option("--sigma-factor", em.sigma_factor, "multiple of the median distance")->capture_default_str();
  em_cmd->add_option("--m", em.m, "embedding dimension")->capture_default_str();
  em_cmd->add_option("--threshold-fraction", em.threshold_fraction, "retained l1 mass; 0 keeps all coefficients")
      ->capture_default_str();
  em_cmd->add_option("--wavelet", em_wavelet, "haar or sym3")->capture_default_str();
  em_cmd->add_option("--levels", em.levels, "wavelet levels")->capture_default_str();

  // gen-data
  Common gd_common;
  std::size_t gd_n = 100;
  double gd_noise = 0.0;
  bool gd_no_center = false;
  json gd_rotor;
  auto* gd_cmd = app.add_subcommand("gen-data", "render a rotor volume dataset");
  add_common(gd_cmd, gd_common, "out/dataset");
  gd_cmd->add_option("--n", gd_n, "number of volumes")->capture_default_str();
  auto* gd_noise_opt = gd_cmd->add_option("--noise-std", gd_noise, "noise std as a fraction of the max voxel");
  gd_cmd->add_flag("--no-center", gd_no_center, "keep the mean volume");

  // distance-profile
  Common dp_common;
  ex::ProfileParams dp;
  std::string dp_wavelet = "sym3";
  double dp_noise = 0.0;
  json dp_rotor;
  auto* dp_cmd = app.add_subcommand("distance-profile", "WEMD and l2 distance against rotation offset");
  add_common(dp_cmd, dp_common, "out/distance-profile");
  dp_cmd->add_option("--step", dp.step_deg, "offset step in degrees")->capture_default_str();
  dp_cmd->add_option("--max", dp.max_deg, "largest offset in degrees")->capture_default_str();
  dp_cmd->add_flag("--noisy", dp.noisy, "add noise to the volumes");
  auto* dp_noise_opt = dp_cmd->add_option("--noise-std", dp_noise, "noise std as a fraction of the max voxel");
  dp_cmd->add_option("--wavelet", dp_wavelet, "haar or sym3")->capture_default_str();
  dp_cmd->add_option("--levels", dp.levels, "wavelet levels")->capture_default_str();

  // bench
  Common bn_common;
  ex::BenchParams bn;
  std::string bn_wavelet = "sym3";
  double bn_noise = 0.0;
  json bn_rotor;
  auto* bn_cmd = app.add_subcommand("bench", "timings of the distance pipelines");
  add_common(bn_cmd, bn_common, "out/bench");
  bn_cmd->add_option("--sizes", bn.sizes, "dataset sizes, subset of 25 50 100 200 400 800")->capture_default_str();
  bn_cmd->add_option("--threshold-fraction", bn.threshold_fraction, "retained l1 mass for the sparse stage")
      ->capture_default_str();
  auto* bn_noise_opt = bn_cmd->add_option("--noise-std", bn_noise, "noise std of the noisy dataset");
  bn_cmd->add_option("--wavelet", bn_wavelet, "haar or sym3")->capture_default_str();
  bn_cmd->add_option("--levels", bn.levels, "wavelet levels")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (vc_cmd->parsed()) {
      merge_config(vc_cmd, vc_common.config, nullptr);
      vc.seed = vc_common.seed;
      vc.validate();
      const auto r = ex::verify_circle(vc);
      const fs::path out = vc_common.out;
      const json rep = ex::write_verify_circle(out, vc, r);
      finish(out,
             {{"command", "verify-circle"}, {"n", vc.n}, {"w1", vc.w1}, {"w2", vc.w2}, {"alpha", vc.alpha},
              {"grid-points", vc.grid_points}, {"exclude-deg", vc.exclude_deg}, {"seed", vc.seed},
              {"out", vc_common.out}},
             rep);
    } else if (ef_cmd->parsed()) {
      merge_config(ef_cmd, ef_common.config, nullptr);
      ef.validate();
      const auto r = ex::eigenfunctions(ef);
      const fs::path out = ef_common.out;
      const json rep = ex::write_eigenfunctions(out, ef, r);
      finish(out,
             {{"command", "eigenfunctions"}, {"n-grid", ef.n_grid}, {"w1", ef.w1}, {"w2", ef.w2}, {"k", ef.k},
              {"shift", ef.shift}, {"seed", ef_common.seed}, {"out", ef_common.out}},
             rep);
    } else if (em_cmd->parsed()) {
      merge_config(em_cmd, em_common.config, nullptr);
      if (em_dataset.empty()) throw InvalidArgument("embed: --dataset is required");
      em.norm = ex::parse_embed_norm(em_norm);
      em.wavelet = parse_wavelet(em_wavelet);
      em.validate();
      const Dataset ds = read_dataset(em_dataset);
      const auto r = ex::embed_volumes(ds.volumes, ds.angles_deg, em);
      const fs::path out = em_common.out;
      const json rep = ex::write_embed(out, em, ds, r);
      finish(out,
             {{"command", "embed"}, {"dataset", em_dataset}, {"norm", em_norm}, {"sigma", em.sigma},
              {"sigma-factor", em.sigma_factor}, {"m", em.m}, {"threshold-fraction", em.threshold_fraction},
              {"wavelet", em_wavelet}, {"levels", em.levels}, {"seed", em_common.seed}, {"out", em_common.out}},
             rep);
    } else if (gd_cmd->parsed()) {
      merge_config(gd_cmd, gd_common.config, &gd_rotor);
      detail::require(gd_n >= 1, "gen-data: n must be >= 1");
      const RotorConfig cfg = rotor_from(gd_rotor, gd_common.seed, gd_noise, gd_noise_opt->count() > 0);
      const Dataset ds = make_dataset(gd_n, cfg, !gd_no_center);
      const fs::path out = gd_common.out;
      write_dataset(out, ds, cfg);
      const json rep = {{"command", "gen-data"}, {"n", gd_n}, {"centered", ds.centered},
                        {"out_of_bounds", ds.out_of_bounds}, {"manifest", (out / "manifest.json").string()}};
      io::write_json(out / "report.json", rep);
      finish(out,
             {{"command", "gen-data"}, {"n", gd_n}, {"no-center", gd_no_center}, {"seed", gd_common.seed},
              {"rotor", to_json(cfg)}, {"out", gd_common.out}},
             rep);
    } else if (dp_cmd->parsed()) {
      merge_config(dp_cmd, dp_common.config, &dp_rotor);
      dp.config = rotor_from(dp_rotor, dp_common.seed, dp_noise, dp_noise_opt->count() > 0);
      dp.wavelet = parse_wavelet(dp_wavelet);
      dp.validate();
      const auto r = ex::distance_profile(dp);
      const fs::path out = dp_common.out;
      const json rep = ex::write_profile(out, dp, r);
      finish(out,
             {{"command", "distance-profile"}, {"step", dp.step_deg}, {"max", dp.max_deg}, {"noisy", dp.noisy},
              {"wavelet", dp_wavelet}, {"levels", dp.levels}, {"seed", dp_common.seed}, {"rotor", to_json(dp.config)},
              {"out", dp_common.out}},
             rep);
    } else if (bn_cmd->parsed()) {
      merge_config(bn_cmd, bn_common.config, &bn_rotor);
      bn.config = rotor_from(bn_rotor, bn_common.seed, bn_noise, bn_noise_opt->count() > 0);
      bn.wavelet = parse_wavelet(bn_wavelet);
      bn.validate();
      const auto rows = ex::bench(bn);
      const fs::path out = bn_common.out;
      const json rep = ex::write_bench(out, bn, rows);
      finish(out,
             {{"command", "bench"}, {"sizes", bn.sizes}, {"threshold-fraction", bn.threshold_fraction},
              {"wavelet", bn_wavelet}, {"levels", bn.levels}, {"seed", bn_common.seed},
              {"rotor", to_json(bn.config)}, {"out", bn_common.out}},
             rep);
    }
  } catch (const normlap::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
