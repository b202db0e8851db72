#pragma once

#include <string>
#include <vector>

#include "quatro/geometry.hpp"

namespace quatro {

enum class CloudFormat { kKittiBin, kPlyAscii };

/// kitti_bin: packed little-endian float32 records (x, y, z, intensity),
/// intensity discarded. ply_ascii: standard header, x/y/z picked out of the
/// vertex property list.
PointCloud load_cloud(const std::string& path, CloudFormat format);

/// Picks the format from the file extension (.bin -> kitti_bin, .ply -> ply_ascii).
PointCloud load_cloud_auto(const std::string& path);

void save_cloud(const std::string& path, const PointCloud& cloud, CloudFormat format);

/// KITTI pose convention: 12 whitespace-separated values per line, the
/// row-major 3x4 [R | t].
std::vector<RigidTransform> load_poses(const std::string& path);

void save_poses(const std::string& path, const std::vector<RigidTransform>& poses);

}  // namespace quatro
