#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "quatro/error.hpp"

namespace quatro {

using Point3 = Eigen::Vector3d;

struct PointCloud {
  std::vector<Point3> points;
  std::string frame_tag;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

enum class RotationMode { kFullSo3, kQuasiSo3 };

struct RigidTransform {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  RotationMode mode = RotationMode::kFullSo3;
  bool degenerate = false;

  static RigidTransform Identity(RotationMode m = RotationMode::kFullSo3) {
    RigidTransform t;
    t.mode = m;
    return t;
  }

  Eigen::Matrix4d matrix() const {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    m.topLeftCorner<3, 3>() = rotation;
    m.topRightCorner<3, 1>() = translation;
    return m;
  }

  RigidTransform inverse() const {
    RigidTransform inv;
    inv.rotation = rotation.transpose();
    inv.translation = -inv.rotation * translation;
    inv.mode = mode;
    inv.degenerate = degenerate;
    return inv;
  }

  Point3 operator*(const Point3& p) const { return rotation * p + translation; }
};

struct Normal3 {
  Eigen::Vector3d dir = Eigen::Vector3d::Zero();
  bool valid = false;
};

Eigen::Matrix3d rot_x(double roll);
Eigen::Matrix3d rot_y(double pitch);
Eigen::Matrix3d rot_z(double yaw);

/// Uniform grid over a point set for radius queries. Cell size equals the
/// query radius so only the 27 surrounding cells need scanning.
class NeighborGrid {
 public:
  NeighborGrid(const std::vector<Point3>& points, double cell_size);

  /// Indices of points within `radius` of `q`, ascending. `radius` must be
  /// <= the cell size used at construction.
  std::vector<int> radius_search(const Point3& q, double radius) const;

  /// Index of the nearest point within `max_dist`, or -1.
  int nearest(const Point3& q, double max_dist) const;

 private:
  const std::vector<Point3>& points_;
  double cell_;
  struct KeyHash {
    std::size_t operator()(const std::array<std::int64_t, 3>& k) const {
      std::size_t h = 1469598103934665603ull;
      for (auto v : k) {
        h ^= static_cast<std::size_t>(v);
        h *= 1099511628211ull;
      }
      return h;
    }
  };
  std::unordered_map<std::array<std::int64_t, 3>, std::vector<int>, KeyHash> cells_;
  std::array<std::int64_t, 3> key(const Point3& p) const;
};

PointCloud voxel_downsample(const PointCloud& cloud, double voxel_size);

std::vector<Normal3> estimate_normals(const PointCloud& cloud, double radius);

PointCloud apply_transform(const PointCloud& cloud, const RigidTransform& T);

}  // namespace quatro
