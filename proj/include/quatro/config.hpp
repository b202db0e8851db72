#pragma once

#include <map>
#include <string>

#include "quatro/pipeline.hpp"

namespace quatro {

/// Flat `key value` (or `key = value`) text format, `#` comments. Returns
/// the parsed map; duplicate keys keep the last occurrence.
std::map<std::string, std::string> parse_key_value_file(const std::string& path);

/// Builds a pipeline configuration from a key-value file. The optional
/// `profile` key (outdoor | indoor) selects a preset; the remaining keys
/// (cbar, kappa, voxel_size, r_normal, r_fpfh, sigma, max_iters, cost_tol,
/// compat_scale, ransac_iterations, ransac_thresh) override it.
PipelineConfig pipeline_config_from_map(const std::map<std::string, std::string>& kv);
PipelineConfig load_pipeline_config(const std::string& path);

}  // namespace quatro
