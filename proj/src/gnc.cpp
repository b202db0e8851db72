#include "quatro/gnc.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>

namespace quatro {

void GncConfig::validate() const {
  if (!(cbar > 0.0)) throw SpecError("GncConfig: cbar must be > 0");
  if (!(kappa > 1.0)) throw SpecError("GncConfig: kappa must be > 1");
  if (max_iters < 1) throw SpecError("GncConfig: max_iters must be >= 1");
  if (!(cost_tol > 0.0)) throw SpecError("GncConfig: cost_tol must be > 0");
}

double residual(const Eigen::Vector3d& alpha, const Eigen::Vector3d& beta,
                const Eigen::Matrix3d& rotation, RotationMode mode) {
  const Eigen::Vector3d e = beta - rotation * alpha;
  if (mode == RotationMode::kQuasiSo3) {
    return e.head<2>().squaredNorm();
  }
  return e.squaredNorm();
}

namespace {

std::vector<double> all_residuals(const TimSet& tims, const Eigen::Matrix3d& rotation,
                                  RotationMode mode, bool sigma_scaled) {
  std::vector<double> r(tims.size());
  for (std::size_t k = 0; k < tims.size(); ++k) {
    r[k] = residual(tims.alphas[k], tims.betas[k], rotation, mode);
    if (sigma_scaled && k < tims.sigmas.size() && tims.sigmas[k] > 0.0) {
      r[k] /= tims.sigmas[k] * tims.sigmas[k];
    }
  }
  return r;
}

}  // namespace

double solve_yaw_weighted(const TimSet& tims, const std::vector<double>& weights) {
  if (tims.size() != weights.size())
    throw SpecError("solve_yaw_weighted: weight count mismatch");
  double s = 0.0, c = 0.0;
  for (std::size_t k = 0; k < tims.size(); ++k) {
    const double w = weights[k];
    const double ax = tims.alphas[k].x(), ay = tims.alphas[k].y();
    const double bx = tims.betas[k].x(), by = tims.betas[k].y();
    s += w * (ax * by - ay * bx);
    c += w * (ax * bx + ay * by);
  }
  if (std::abs(s) < 1e-300 && std::abs(c) < 1e-300) {
    throw DegenerateRotation("solve_yaw_weighted: no weighted planar extent");
  }
  return std::atan2(s, c);
}

Eigen::Matrix3d solve_so3_weighted(const TimSet& tims, const std::vector<double>& weights) {
  if (tims.size() != weights.size())
    throw SpecError("solve_so3_weighted: weight count mismatch");
  int nonzero = 0;
  for (double w : weights) {
    if (w > 0.0) ++nonzero;
  }
  if (nonzero < 3)
    throw DegenerateRotation("solve_so3_weighted: fewer than 3 weighted measurements");

  Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
  for (std::size_t k = 0; k < tims.size(); ++k) {
    h += weights[k] * tims.alphas[k] * tims.betas[k].transpose();
  }
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Vector3d sv = svd.singularValues();
  // Collinear measurement directions leave the rotation underdetermined.
  if (sv(1) <= 1e-9 * std::max(sv(0), 1e-300)) {
    throw DegenerateRotation("solve_so3_weighted: rank-deficient correlation");
  }
  Eigen::Matrix3d r = svd.matrixV() * svd.matrixU().transpose();
  if (r.determinant() < 0.0) {
    Eigen::Matrix3d flip = Eigen::Matrix3d::Identity();
    flip(2, 2) = -1.0;
    r = svd.matrixV() * flip * svd.matrixU().transpose();
  }
  return r;
}

std::vector<double> gnc_weight_update(const std::vector<double>& residuals, double mu,
                                      double cbar) {
  const double c2 = cbar * cbar;
  const double lo = mu / (mu + 1.0) * c2;
  const double hi = (mu + 1.0) / mu * c2;
  std::vector<double> w(residuals.size());
  for (std::size_t k = 0; k < residuals.size(); ++k) {
    const double r = residuals[k];
    if (r >= hi) {
      w[k] = 0.0;
    } else if (r <= lo) {
      w[k] = 1.0;
    } else {
      w[k] = std::clamp(cbar * std::sqrt(mu * (mu + 1.0) / r) - mu, 0.0, 1.0);
    }
  }
  return w;
}

double gnc_mu_init(const std::vector<double>& residuals, double cbar) {
  const double c2 = cbar * cbar;
  double rmax = 0.0;
  for (double r : residuals) rmax = std::max(rmax, r);
  if (rmax <= c2) return kMuSentinel;  // all residuals already in the inlier band
  return c2 / (rmax - c2);
}

RotationEstimate estimate_rotation_gnc(const TimSet& tims, const GncConfig& config,
                                       RotationMode mode) {
  config.validate();
  const std::size_t k = tims.size();
  if (k == 0) throw DegenerateRotation("estimate_rotation_gnc: no measurements");
  if (mode == RotationMode::kFullSo3 && k < 3)
    throw DegenerateRotation("estimate_rotation_gnc: full SO(3) needs >= 3 measurements");

  RotationEstimate est;
  est.mode = mode;

  std::vector<double> w(k, 1.0);
  double mu =
      gnc_mu_init(all_residuals(tims, Eigen::Matrix3d::Identity(), mode,
                                config.sigma_scaled_residuals),
                  config.cbar);

  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  double yaw = 0.0;
  double prev_cost = std::numeric_limits<double>::infinity();
  bool converged = false;
  int t = 0;
  for (t = 1; t <= config.max_iters; ++t) {
    try {
      if (mode == RotationMode::kQuasiSo3) {
        yaw = solve_yaw_weighted(tims, w);
        rotation = rot_z(yaw);
      } else {
        rotation = solve_so3_weighted(tims, w);
      }
    } catch (const DegenerateRotation& e) {
      throw DegenerateRotation(e.what(),
                               mode == RotationMode::kQuasiSo3
                                   ? std::optional<double>(yaw)
                                   : std::nullopt);
    }

    const auto res = all_residuals(tims, rotation, mode, config.sigma_scaled_residuals);
    w = gnc_weight_update(res, mu, config.cbar);

    double cost = 0.0;
    for (std::size_t i = 0; i < k; ++i) cost += w[i] * res[i];
    if (std::abs(cost - prev_cost) < config.cost_tol) {
      converged = true;
      break;
    }
    prev_cost = cost;
    mu *= config.kappa;
  }

  int nonzero = 0;
  int strong = 0;
  for (std::size_t i = 0; i < k; ++i) {
    if (w[i] > 0.0) ++nonzero;
    if (w[i] > 0.5) est.inlier_tims.push_back(static_cast<int>(i));
  }
  strong = static_cast<int>(est.inlier_tims.size());

  if (nonzero == 0) {
    if (mode == RotationMode::kQuasiSo3) {
      throw DegenerateRotation("estimate_rotation_gnc: all weights collapsed", yaw);
    }
    throw DegenerateRotation("estimate_rotation_gnc: all weights collapsed");
  }
  if (mode == RotationMode::kFullSo3 && nonzero < 3) {
    throw DegenerateRotation("estimate_rotation_gnc: fewer than 3 surviving measurements");
  }

  est.rotation = rotation;
  est.yaw = yaw;
  est.final_weights = std::move(w);
  est.degenerate = strong < 3;
  est.iterations = std::min(t, config.max_iters);
  (void)converged;
  return est;
}

}  // namespace quatro
