#pragma once

#include <optional>

#include "quatro/cote.hpp"
#include "quatro/features.hpp"
#include "quatro/geometry.hpp"
#include "quatro/gnc.hpp"
#include "quatro/pruning.hpp"

namespace quatro {

enum class SolverKind { kQuatro, kFullGnc, kRansac };

struct InsReading {
  double roll = 0.0;   // radians
  double pitch = 0.0;  // radians
};

struct PipelineConfig {
  // Outdoor 64-channel profile defaults.
  double voxel_size = 0.3;
  double r_normal = 0.5;
  double r_fpfh = 0.65;
  double sigma_default = 0.3;  // noise bound; defaults to the voxel size
  GncConfig gnc;
  RotationMode mode = RotationMode::kQuasiSo3;
  SolverKind solver = SolverKind::kQuatro;
  double compat_scale = 1.0;  // scale on (sigma_a + sigma_b) in the compatibility test
  bool cote_rotation_inliers_only = false;
  std::optional<InsReading> ins_src;
  std::optional<InsReading> ins_tgt;
  bool refine = false;
  double icp_max_corr_dist = 1.0;
  int icp_max_iters = 50;
  int ransac_iterations = 1000;
  double ransac_inlier_thresh = 0.3;
  std::uint64_t ransac_seed = 0;

  void validate() const;
  static PipelineConfig outdoor_profile();
  static PipelineConfig indoor_profile();
};

struct StageTimings {
  double preprocess_ms = 0.0;
  double pruning_ms = 0.0;
  double rotation_ms = 0.0;
  double translation_ms = 0.0;
  double optimization_ms = 0.0;  // rotation + translation
  double total_ms = 0.0;
};

struct RegistrationResult {
  RigidTransform transform;
  int num_raw_corr = 0;
  int num_pruned_corr = 0;
  int rotation_inliers = 0;
  bool degenerate = false;
  StageTimings timings;
};

/// Full pipeline: downsample, normals, FPFH, reciprocal matching, chain TIMs,
/// compatibility graph, heuristic max clique, GNC rotation, component-wise
/// translation. The result satisfies tgt ~= R * src + t.
RegistrationResult register_clouds(const PointCloud& src, const PointCloud& tgt,
                                   const PipelineConfig& config);

/// Same pipeline from the TIM stage onward, with correspondences supplied
/// by the caller (indices into the given clouds, no downsampling).
RegistrationResult register_with_correspondences(const PointCloud& src,
                                                 const PointCloud& tgt,
                                                 const CorrespondenceSet& corr,
                                                 const PipelineConfig& config);

/// Rotates the cloud by (R_y(pitch) * R_x(roll))^-1 so its xy-plane becomes
/// horizontal.
PointCloud apply_ins_alignment(const PointCloud& cloud, double roll, double pitch);

struct IcpResult {
  RigidTransform transform;
  double mse = 0.0;
  int iterations = 0;
  bool progressed = false;  // false when no associations were found
};

/// Point-to-point ICP refinement from an initial guess. Never returns a
/// transform with worse association MSE than the best iterate seen.
IcpResult refine_icp(const PointCloud& src, const PointCloud& tgt,
                     const RigidTransform& initial, double max_corr_dist,
                     int max_iters);

/// Seeded 3-point minimal-sample RANSAC baseline. Returns the best minimal
/// model by inlier count; identity with degenerate=true on total failure.
RegistrationResult register_ransac(const PointCloud& src, const PointCloud& tgt,
                                   const CorrespondenceSet& corr, int iterations,
                                   double inlier_thresh, std::uint64_t seed);

}  // namespace quatro
