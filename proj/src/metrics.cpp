#include "quatro/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace quatro {

RigidTransform PosePair::relative() const {
  const RigidTransform inv = t_tgt.inverse();
  RigidTransform rel;
  rel.rotation = inv.rotation * t_src.rotation;
  rel.translation = inv.rotation * t_src.translation + inv.translation;
  return rel;
}

double translation_error(const Eigen::Vector3d& t_hat, const Eigen::Vector3d& t_gt) {
  return (t_gt - t_hat).squaredNorm();
}

double rotation_error(const Eigen::Matrix3d& r_hat, const Eigen::Matrix3d& r_gt) {
  const double tr = (r_hat.transpose() * r_gt).trace();
  const double arg = std::clamp((tr - 1.0) / 2.0, -1.0, 1.0);
  return std::acos(arg) * 180.0 / std::numbers::pi;
}

bool success(double t_err_m, double r_err_deg, double t_thresh, double r_thresh) {
  return t_err_m <= t_thresh && r_err_deg <= r_thresh;
}

EvalReport aggregate(const std::vector<TrialRecord>& records) {
  if (records.empty()) throw EmptyReport();
  EvalReport rep;
  rep.n = static_cast<int>(records.size());
  rep.records = records;
  int successes = 0;
  for (const auto& r : records) {
    rep.t_avg += r.t_err_m * r.t_err_m;
    rep.r_avg += r.r_err_deg;
    if (r.success) ++successes;
  }
  rep.t_avg /= rep.n;
  rep.r_avg /= rep.n;
  rep.t_rmse = std::sqrt(rep.t_avg);
  rep.success_rate = static_cast<double>(successes) / rep.n;
  return rep;
}

}  // namespace quatro
