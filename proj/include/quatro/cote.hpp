#pragma once

#include <Eigen/Core>
#include <array>
#include <vector>

#include "quatro/features.hpp"
#include "quatro/geometry.hpp"

namespace quatro {

struct TranslationMeasurements {
  std::vector<Eigen::Vector3d> v;  // q_j - R * p_i per correspondence
  std::vector<double> sigma;

  std::size_t size() const { return v.size(); }
};

struct AxisEstimate {
  double t_hat = 0.0;
  std::vector<int> inliers;  // consensus members of the winning candidate
  double objective = 0.0;    // truncated cost at t_hat
};

struct TranslationEstimate {
  Eigen::Vector3d t = Eigen::Vector3d::Zero();
  std::array<AxisEstimate, 3> axes;
};

TranslationMeasurements build_measurements(const PointCloud& src, const PointCloud& tgt,
                                           const CorrespondenceSet& corr,
                                           const Eigen::Matrix3d& rotation);

/// Truncated-LS scan over the sorted interval endpoints v_i +/- sigma_i*cbar.
/// Each non-empty gap emits the sigma-weighted average of its consensus set;
/// the candidate with the lowest truncated objective wins, leftmost on ties.
AxisEstimate cote_axis(const std::vector<double>& values,
                       const std::vector<double>& sigma, double cbar);

TranslationEstimate estimate_translation(const TranslationMeasurements& meas,
                                         double cbar);

}  // namespace quatro
