#include "quatro/config.hpp"

#include <fstream>
#include <sstream>

namespace quatro {

std::map<std::string, std::string> parse_key_value_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string key;
    if (!(ss >> key)) continue;
    std::string value;
    ss >> value;
    if (value == "=") ss >> value;
    if (value.empty()) {
      throw ParseError("missing value at " + path + ":" + std::to_string(lineno));
    }
    std::string rest;
    if (ss >> rest) {
      // Allow comma-separated lists to contain spaces after commas.
      do {
        value += rest;
      } while (ss >> rest);
    }
    kv[key] = value;
  }
  return kv;
}

namespace {

double to_double(const std::map<std::string, std::string>& kv, const std::string& key,
                 double fallback) {
  auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw ParseError("bad numeric value for key '" + key + "': " + it->second);
  }
}

long to_long(const std::map<std::string, std::string>& kv, const std::string& key,
             long fallback) {
  auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  try {
    return std::stol(it->second);
  } catch (const std::exception&) {
    throw ParseError("bad integer value for key '" + key + "': " + it->second);
  }
}

}  // namespace

PipelineConfig pipeline_config_from_map(const std::map<std::string, std::string>& kv) {
  PipelineConfig cfg = PipelineConfig::outdoor_profile();
  if (auto it = kv.find("profile"); it != kv.end()) {
    if (it->second == "outdoor") {
      cfg = PipelineConfig::outdoor_profile();
    } else if (it->second == "indoor") {
      cfg = PipelineConfig::indoor_profile();
    } else {
      throw ParseError("unknown profile: " + it->second);
    }
  }
  cfg.voxel_size = to_double(kv, "voxel_size", cfg.voxel_size);
  cfg.r_normal = to_double(kv, "r_normal", cfg.r_normal);
  cfg.r_fpfh = to_double(kv, "r_fpfh", cfg.r_fpfh);
  cfg.sigma_default = to_double(kv, "sigma", cfg.sigma_default);
  cfg.gnc.cbar = to_double(kv, "cbar", cfg.gnc.cbar);
  cfg.gnc.kappa = to_double(kv, "kappa", cfg.gnc.kappa);
  cfg.gnc.max_iters = static_cast<int>(to_long(kv, "max_iters", cfg.gnc.max_iters));
  cfg.gnc.cost_tol = to_double(kv, "cost_tol", cfg.gnc.cost_tol);
  cfg.compat_scale = to_double(kv, "compat_scale", cfg.compat_scale);
  cfg.ransac_iterations =
      static_cast<int>(to_long(kv, "ransac_iterations", cfg.ransac_iterations));
  cfg.ransac_inlier_thresh = to_double(kv, "ransac_thresh", cfg.ransac_inlier_thresh);
  cfg.icp_max_corr_dist = to_double(kv, "icp_max_corr_dist", cfg.icp_max_corr_dist);
  cfg.icp_max_iters = static_cast<int>(to_long(kv, "icp_max_iters", cfg.icp_max_iters));
  if (auto it = kv.find("mode"); it != kv.end()) {
    if (it->second == "quasi") {
      cfg.mode = RotationMode::kQuasiSo3;
    } else if (it->second == "full") {
      cfg.mode = RotationMode::kFullSo3;
    } else {
      throw ParseError("unknown mode: " + it->second);
    }
  }
  cfg.validate();
  return cfg;
}

PipelineConfig load_pipeline_config(const std::string& path) {
  return pipeline_config_from_map(parse_key_value_file(path));
}

}  // namespace quatro
