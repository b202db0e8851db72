#include "quatro/geometry.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>

namespace quatro {

Eigen::Matrix3d rot_x(double roll) {
  return Eigen::AngleAxisd(roll, Eigen::Vector3d::UnitX()).toRotationMatrix();
}

Eigen::Matrix3d rot_y(double pitch) {
  return Eigen::AngleAxisd(pitch, Eigen::Vector3d::UnitY()).toRotationMatrix();
}

Eigen::Matrix3d rot_z(double yaw) {
  return Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()).toRotationMatrix();
}

NeighborGrid::NeighborGrid(const std::vector<Point3>& points, double cell_size)
    : points_(points), cell_(cell_size) {
  for (int i = 0; i < static_cast<int>(points_.size()); ++i) {
    cells_[key(points_[i])].push_back(i);
  }
}

std::array<std::int64_t, 3> NeighborGrid::key(const Point3& p) const {
  return {static_cast<std::int64_t>(std::floor(p.x() / cell_)),
          static_cast<std::int64_t>(std::floor(p.y() / cell_)),
          static_cast<std::int64_t>(std::floor(p.z() / cell_))};
}

std::vector<int> NeighborGrid::radius_search(const Point3& q, double radius) const {
  std::vector<int> out;
  const auto k = key(q);
  const double r2 = radius * radius;
  for (std::int64_t dx = -1; dx <= 1; ++dx) {
    for (std::int64_t dy = -1; dy <= 1; ++dy) {
      for (std::int64_t dz = -1; dz <= 1; ++dz) {
        auto it = cells_.find({k[0] + dx, k[1] + dy, k[2] + dz});
        if (it == cells_.end()) continue;
        for (int i : it->second) {
          if ((points_[i] - q).squaredNorm() <= r2) out.push_back(i);
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

int NeighborGrid::nearest(const Point3& q, double max_dist) const {
  const auto k = key(q);
  int best = -1;
  double best_d2 = max_dist * max_dist;
  for (std::int64_t dx = -1; dx <= 1; ++dx) {
    for (std::int64_t dy = -1; dy <= 1; ++dy) {
      for (std::int64_t dz = -1; dz <= 1; ++dz) {
        auto it = cells_.find({k[0] + dx, k[1] + dy, k[2] + dz});
        if (it == cells_.end()) continue;
        for (int i : it->second) {
          const double d2 = (points_[i] - q).squaredNorm();
          if (d2 < best_d2 || (d2 == best_d2 && best >= 0 && i < best)) {
            best_d2 = d2;
            best = i;
          }
        }
      }
    }
  }
  return best;
}

PointCloud voxel_downsample(const PointCloud& cloud, double voxel_size) {
  if (cloud.empty()) throw EmptyCloud("voxel_downsample: empty input cloud");
  if (!(voxel_size > 0.0)) throw SpecError("voxel_downsample: voxel_size must be > 0");

  // Grid origin fixed at (0,0,0); std::map keeps the output order
  // independent of the input order.
  std::map<std::array<std::int64_t, 3>, std::pair<Eigen::Vector3d, int>> voxels;
  for (const auto& p : cloud.points) {
    std::array<std::int64_t, 3> k = {
        static_cast<std::int64_t>(std::floor(p.x() / voxel_size)),
        static_cast<std::int64_t>(std::floor(p.y() / voxel_size)),
        static_cast<std::int64_t>(std::floor(p.z() / voxel_size))};
    auto [it, inserted] = voxels.try_emplace(k, Eigen::Vector3d::Zero(), 0);
    it->second.first += p;
    it->second.second += 1;
  }

  PointCloud out;
  out.frame_tag = cloud.frame_tag;
  out.points.reserve(voxels.size());
  for (const auto& [k, slot] : voxels) {
    out.points.push_back(slot.first / static_cast<double>(slot.second));
  }
  return out;
}

std::vector<Normal3> estimate_normals(const PointCloud& cloud, double radius) {
  if (!(radius > 0.0)) throw SpecError("estimate_normals: radius must be > 0");
  if (cloud.size() < 3) throw InsufficientPoints("estimate_normals: cloud has < 3 points");

  NeighborGrid grid(cloud.points, radius);
  std::vector<Normal3> normals(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto nbrs = grid.radius_search(cloud.points[i], radius);
    if (nbrs.size() < 3) continue;  // stays invalid

    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (int j : nbrs) mean += cloud.points[j];
    mean /= static_cast<double>(nbrs.size());

    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (int j : nbrs) {
      const Eigen::Vector3d d = cloud.points[j] - mean;
      cov += d * d.transpose();
    }
    cov /= static_cast<double>(nbrs.size());

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
    Eigen::Vector3d n = eig.eigenvectors().col(0);
    if (n.norm() < 1e-12) continue;
    n.normalize();
    // Orient toward the sensor origin.
    if (n.dot(-cloud.points[i]) < 0.0) n = -n;
    normals[i].dir = n;
    normals[i].valid = true;
  }
  return normals;
}

PointCloud apply_transform(const PointCloud& cloud, const RigidTransform& T) {
  PointCloud out;
  out.frame_tag = cloud.frame_tag;
  out.points.reserve(cloud.size());
  for (const auto& p : cloud.points) out.points.push_back(T * p);
  return out;
}

}  // namespace quatro
