#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <numbers>

#include "quatro/config.hpp"
#include "quatro/io.hpp"
#include "quatro/scene.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

json transform_json(const quatro::RigidTransform& t) {
  json j;
  json m = json::array();
  const Eigen::Matrix4d mat = t.matrix();
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) m.push_back(mat(r, c));
  }
  j["matrix_row_major_4x4"] = m;
  const auto& rot = t.rotation;
  j["yaw_deg"] = std::atan2(rot(1, 0), rot(0, 0)) * kRadToDeg;
  j["pitch_deg"] = -std::asin(std::clamp(rot(2, 0), -1.0, 1.0)) * kRadToDeg;
  j["roll_deg"] = std::atan2(rot(2, 1), rot(2, 2)) * kRadToDeg;
  j["translation"] = {t.translation.x(), t.translation.y(), t.translation.z()};
  return j;
}

void emit(const json& j, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::ofstream out(out_path);
    if (!out) throw quatro::ParseError("cannot open for writing: " + out_path);
    out << j.dump(2) << "\n";
  }
}

int cmd_register(const std::string& src_path, const std::string& tgt_path,
                 const std::string& corr_path, const std::string& mode,
                 const std::string& solver, const std::vector<double>& ins,
                 const std::vector<double>& ins_src, bool refine,
                 const std::string& config_path, const std::string& out_path,
                 std::uint64_t seed, bool timings) {
  quatro::PipelineConfig cfg = config_path.empty()
                                   ? quatro::PipelineConfig::outdoor_profile()
                                   : quatro::load_pipeline_config(config_path);
  if (mode == "quasi") cfg.mode = quatro::RotationMode::kQuasiSo3;
  else if (mode == "full") cfg.mode = quatro::RotationMode::kFullSo3;
  if (solver == "quatro") cfg.solver = quatro::SolverKind::kQuatro;
  else if (solver == "gnc") cfg.solver = quatro::SolverKind::kFullGnc;
  else if (solver == "ransac") cfg.solver = quatro::SolverKind::kRansac;
  if (!ins.empty()) cfg.ins_tgt = quatro::InsReading{ins[0], ins[1]};
  if (!ins_src.empty()) cfg.ins_src = quatro::InsReading{ins_src[0], ins_src[1]};
  cfg.refine = refine;
  cfg.ransac_seed = seed;

  const quatro::PointCloud src = quatro::load_cloud_auto(src_path);
  const quatro::PointCloud tgt = quatro::load_cloud_auto(tgt_path);

  quatro::RegistrationResult res;
  if (corr_path.empty()) {
    res = quatro::register_clouds(src, tgt, cfg);
  } else {
    const auto corr = quatro::load_correspondences(corr_path);
    res = quatro::register_with_correspondences(src, tgt, corr, cfg);
  }

  json j;
  j["solver"] = solver;
  j["mode"] = cfg.mode == quatro::RotationMode::kQuasiSo3 ? "quasi_so3" : "full_so3";
  j["transform"] = transform_json(res.transform);
  j["degenerate"] = res.degenerate;
  j["num_raw_corr"] = res.num_raw_corr;
  j["num_pruned_corr"] = res.num_pruned_corr;
  j["rotation_inliers"] = res.rotation_inliers;
  if (timings) {
    j["timings_ms"] = {{"preprocess", res.timings.preprocess_ms},
                       {"pruning", res.timings.pruning_ms},
                       {"rotation", res.timings.rotation_ms},
                       {"translation", res.timings.translation_ms},
                       {"optimization", res.timings.optimization_ms},
                       {"total", res.timings.total_ms}};
  }
  emit(j, out_path);
  return 0;
}

int cmd_sweep(const std::string& spec_path, const std::string& out_dir,
              const std::string& config_path) {
  const auto kv = quatro::parse_key_value_file(spec_path);
  const auto sweep = quatro::sweep_spec_from_map(kv);
  const auto base = quatro::scene_spec_from_map(kv);
  const quatro::PipelineConfig cfg = config_path.empty()
                                         ? quatro::PipelineConfig::outdoor_profile()
                                         : quatro::load_pipeline_config(config_path);

  const auto result = quatro::run_sweep(sweep, base, cfg);
  fs::create_directories(out_dir);
  quatro::write_sweep_csv((fs::path(out_dir) / "sweep.csv").string(), result);

  json summary = json::array();
  for (const auto& agg : result.aggregates) {
    summary.push_back({{"value", agg.value},
                       {"solver", quatro::solver_name(agg.solver)},
                       {"n", agg.report.n},
                       {"t_avg_m2", agg.report.t_avg},
                       {"t_rmse_m", agg.report.t_rmse},
                       {"r_avg_deg", agg.report.r_avg},
                       {"success_rate", agg.report.success_rate}});
  }
  emit(summary, (fs::path(out_dir) / "summary.json").string());
  return 0;
}

int cmd_gen_scene(const std::string& spec_path, const std::string& out_dir) {
  const auto kv = quatro::parse_key_value_file(spec_path);
  const auto spec = quatro::scene_spec_from_map(kv);
  const auto scene = quatro::generate_scene(spec);

  fs::create_directories(out_dir);
  quatro::save_cloud((fs::path(out_dir) / "src.ply").string(), scene.src,
                     quatro::CloudFormat::kPlyAscii);
  quatro::save_cloud((fs::path(out_dir) / "tgt.ply").string(), scene.tgt,
                     quatro::CloudFormat::kPlyAscii);
  quatro::save_correspondences((fs::path(out_dir) / "corr.txt").string(), scene.corr);
  quatro::save_poses((fs::path(out_dir) / "gt_pose.txt").string(), {scene.gt});
  std::ofstream labels((fs::path(out_dir) / "labels.txt").string());
  labels << "# 1 = inlier correspondence\n";
  for (bool b : scene.inlier_mask) labels << (b ? 1 : 0) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Global point-cloud registration via yaw-constrained GNC"};
  app.require_subcommand(1);

  // register
  auto* reg = app.add_subcommand("register", "Register a source cloud onto a target");
  std::string src_path, tgt_path, corr_path, mode = "quasi", solver = "quatro";
  std::string config_path, out_path;
  std::vector<double> ins, ins_src;
  bool refine = false, timings = false;
  std::uint64_t seed = 0;
  reg->add_option("src", src_path, "source cloud (.bin or .ply)")->required();
  reg->add_option("tgt", tgt_path, "target cloud (.bin or .ply)")->required();
  reg->add_option("--corr", corr_path, "correspondence file (skips feature matching)");
  reg->add_option("--mode", mode, "quasi | full")
      ->check(CLI::IsMember({"quasi", "full"}));
  reg->add_option("--solver", solver, "quatro | gnc | ransac")
      ->check(CLI::IsMember({"quatro", "gnc", "ransac"}));
  reg->add_option("--ins", ins, "target INS roll pitch (radians)")->expected(2);
  reg->add_option("--ins-src", ins_src, "source INS roll pitch (radians)")->expected(2);
  reg->add_flag("--refine", refine, "run ICP fine alignment");
  reg->add_option("--config", config_path, "pipeline config file");
  reg->add_option("--out", out_path, "JSON output path (default stdout)");
  reg->add_option("--seed", seed, "RANSAC seed");
  reg->add_flag("--timings", timings, "include wall-clock timings in the JSON");

  // sweep
  auto* swp = app.add_subcommand("sweep", "Run a benchmark sweep");
  std::string sweep_spec, sweep_out = "sweep_out", sweep_config;
  swp->add_option("--spec", sweep_spec, "sweep spec file")->required();
  swp->add_option("--out", sweep_out, "output directory");
  swp->add_option("--config", sweep_config, "pipeline config file");

  // gen-scene
  auto* gen = app.add_subcommand("gen-scene", "Generate a synthetic scene");
  std::string gen_spec, gen_out = "scene_out";
  gen->add_option("--spec", gen_spec, "scene spec file")->required();
  gen->add_option("--out", gen_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (reg->parsed()) {
      return cmd_register(src_path, tgt_path, corr_path, mode, solver, ins, ins_src,
                          refine, config_path, out_path, seed, timings);
    }
    if (swp->parsed()) return cmd_sweep(sweep_spec, sweep_out, sweep_config);
    if (gen->parsed()) return cmd_gen_scene(gen_spec, gen_out);
  } catch (const quatro::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const quatro::SpecError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const quatro::Error& e) {
    std::cerr << "registration error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
