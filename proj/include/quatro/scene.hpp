#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "quatro/features.hpp"
#include "quatro/geometry.hpp"
#include "quatro/metrics.hpp"
#include "quatro/pipeline.hpp"

namespace quatro {

/// Synthetic pseudo-urban scene: a ground plane plus vertical facades,
/// sampled within `extent` and optionally shifted by `center` to emulate a
/// distant viewpoint.
struct SceneSpec {
  int n_points = 2000;
  double extent = 20.0;       // side length of the sampled square, meters
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  double yaw = 0.0;           // ground-truth yaw, radians
  double roll = 0.0;          // ground-truth tilt, radians
  double pitch = 0.0;
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  double outlier_ratio = 0.0;   // fraction of correspondences rebound at random
  double quasi_ratio = 0.0;     // fraction rebound to vertically displaced copies
  double quasi_lift = 1.0;      // vertical ladder spacing of the displaced copies
  double noise_sigma = 0.0;     // per-axis Gaussian noise on target points, meters
  double overlap = 0.85;        // fraction of source points visible in the target
  int n_correspondences = 0;    // 0 = one per overlapping point
  std::optional<int> inlier_floor;  // forced count of surviving inlier pairs
  double sigma = 0.3;           // noise bound attached to every pair
  std::uint64_t seed = 0;

  void validate() const;

  /// Ground-truth rotation: tilt applied after yaw, i.e. R = R_y * R_x * R_z,
  /// so de-tilting both clouds leaves a pure yaw problem.
  RigidTransform ground_truth() const;
};

struct Scene {
  PointCloud src;
  PointCloud tgt;
  CorrespondenceSet corr;
  std::vector<bool> inlier_mask;  // per correspondence
  RigidTransform gt;
};

Scene generate_scene(const SceneSpec& spec);

SceneSpec scene_spec_from_map(const std::map<std::string, std::string>& kv);

enum class SweepVariable { kOutlierRatio, kYawMagnitude, kViewpointDistance, kInlierCount };

struct SweepSpec {
  SweepVariable variable = SweepVariable::kOutlierRatio;
  std::vector<double> values;
  int trials_per_value = 10;
  std::vector<SolverKind> solvers = {SolverKind::kQuatro};
};

SweepSpec sweep_spec_from_map(const std::map<std::string, std::string>& kv);

struct SweepRow {
  double value = 0.0;
  SolverKind solver = SolverKind::kQuatro;
  int trial = 0;
  std::uint64_t seed = 0;
  double t_err_m = 0.0;
  double r_err_deg = 0.0;
  bool success = false;
  bool degenerate = false;
};

struct SweepAggregate {
  double value = 0.0;
  SolverKind solver = SolverKind::kQuatro;
  EvalReport report;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<SweepAggregate> aggregates;
};

/// Runs every (value, solver, trial) combination on freshly generated scenes.
/// Trial seeds derive from (base seed, value index, trial index) only, so
/// each row is reproducible in isolation.
SweepResult run_sweep(const SweepSpec& sweep, const SceneSpec& base,
                      const PipelineConfig& config);

std::uint64_t sweep_trial_seed(std::uint64_t base_seed, int value_index, int trial);

/// Runs one solver on one scene and reports errors against the ground truth.
/// Solver failures (degenerate rotation) are recorded as identity estimates.
SweepRow run_trial(const Scene& scene, SolverKind solver, const PipelineConfig& config);

std::string solver_name(SolverKind s);

void write_sweep_csv(const std::string& path, const SweepResult& result,
                     bool include_timings = false);

}  // namespace quatro
