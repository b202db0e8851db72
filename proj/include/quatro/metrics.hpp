#pragma once

#include <Eigen/Core>
#include <vector>

#include "quatro/geometry.hpp"

namespace quatro {

struct PosePair {
  RigidTransform t_src;  // ground-truth world pose of the source frame
  RigidTransform t_tgt;  // ground-truth world pose of the target frame

  /// Relative pose mapping source-frame coordinates into the target frame,
  /// i.e. T_tgt^-1 * T_src.
  RigidTransform relative() const;
};

struct TrialRecord {
  double t_err_m = 0.0;    // Euclidean norm of the translation residual
  double r_err_deg = 0.0;  // geodesic rotation error
  bool success = false;
  bool degenerate = false;
};

struct EvalReport {
  double t_avg = 0.0;        // mean squared translation residual (m^2)
  double t_rmse = 0.0;       // sqrt(t_avg), for readability only
  double r_avg = 0.0;        // mean rotation error (deg)
  double success_rate = 0.0;
  int n = 0;
  std::vector<TrialRecord> records;
};

/// Squared Euclidean norm of the translation residual (m^2).
double translation_error(const Eigen::Vector3d& t_hat, const Eigen::Vector3d& t_gt);

/// Geodesic angle of R_hat^T * R_gt in degrees, trace argument clamped to [-1, 1].
double rotation_error(const Eigen::Matrix3d& r_hat, const Eigen::Matrix3d& r_gt);

inline constexpr double kSuccessTransThresh = 2.0;   // meters
inline constexpr double kSuccessRotThresh = 10.0;    // degrees

/// Inclusive thresholds: a trial at exactly (2 m, 10 deg) counts as success.
bool success(double t_err_m, double r_err_deg,
             double t_thresh = kSuccessTransThresh, double r_thresh = kSuccessRotThresh);

EvalReport aggregate(const std::vector<TrialRecord>& records);

}  // namespace quatro
