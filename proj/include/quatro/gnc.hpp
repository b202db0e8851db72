#pragma once

#include <Eigen/Core>
#include <vector>

#include "quatro/geometry.hpp"
#include "quatro/pruning.hpp"

namespace quatro {

struct GncConfig {
  double cbar = 0.15;        // truncation parameter
  double kappa = 1.4;        // continuation factor, > 1
  int max_iters = 100;
  double cost_tol = 1e-7;
  bool sigma_scaled_residuals = false;  // normalize rotation residuals by the TIM noise bound

  void validate() const;
};

struct GncState {
  int t = 0;
  double mu = 0.0;
  std::vector<double> weights;
  double cost = 0.0;
  bool converged = false;
};

struct RotationEstimate {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  RotationMode mode = RotationMode::kQuasiSo3;
  double yaw = 0.0;  // meaningful in quasi mode
  std::vector<double> final_weights;
  std::vector<int> inlier_tims;  // indices with weight > 0.5
  bool degenerate = false;       // fewer than 3 measurements kept nonzero weight
  int iterations = 0;
};

/// Squared residual of one measurement. Full mode uses all three components;
/// quasi mode uses only x and y, so purely vertical errors are invisible.
double residual(const Eigen::Vector3d& alpha, const Eigen::Vector3d& beta,
                const Eigen::Matrix3d& rotation, RotationMode mode);

/// Closed-form minimizer of the weighted planar residual sum over yaw.
double solve_yaw_weighted(const TimSet& tims, const std::vector<double>& weights);

/// Weighted Kabsch over the full measurements; requires >= 3 measurements
/// with nonzero weight and non-collinear geometry.
Eigen::Matrix3d solve_so3_weighted(const TimSet& tims, const std::vector<double>& weights);

/// Truncated closed-form weight update for the scaled surrogate loss.
std::vector<double> gnc_weight_update(const std::vector<double>& residuals, double mu,
                                      double cbar);

/// Continuation start value from residuals at identity. When every residual
/// is already within the truncation bound the schedule starts effectively
/// truncated (large sentinel).
double gnc_mu_init(const std::vector<double>& residuals, double cbar);

inline constexpr double kMuSentinel = 1e6;

RotationEstimate estimate_rotation_gnc(const TimSet& tims, const GncConfig& config,
                                       RotationMode mode);

}  // namespace quatro
