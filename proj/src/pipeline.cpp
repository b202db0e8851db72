#include "quatro/pipeline.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <limits>
#include <random>

namespace quatro {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Kabsch fit on explicit point pairs, mapping src points onto tgt points.
bool fit_rigid(const std::vector<Eigen::Vector3d>& ps,
               const std::vector<Eigen::Vector3d>& qs, RigidTransform& out) {
  const int n = static_cast<int>(ps.size());
  if (n < 3) return false;
  Eigen::Vector3d pc = Eigen::Vector3d::Zero(), qc = Eigen::Vector3d::Zero();
  for (int i = 0; i < n; ++i) {
    pc += ps[i];
    qc += qs[i];
  }
  pc /= n;
  qc /= n;
  Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
  for (int i = 0; i < n; ++i) {
    h += (ps[i] - pc) * (qs[i] - qc).transpose();
  }
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Vector3d sv = svd.singularValues();
  if (sv(1) <= 1e-12 * std::max(sv(0), 1e-300)) return false;  // collinear sample
  Eigen::Matrix3d r = svd.matrixV() * svd.matrixU().transpose();
  if (r.determinant() < 0.0) {
    Eigen::Matrix3d flip = Eigen::Matrix3d::Identity();
    flip(2, 2) = -1.0;
    r = svd.matrixV() * flip * svd.matrixU().transpose();
  }
  out.rotation = r;
  out.translation = qc - r * pc;
  return true;
}

// Solver stages shared by both registration entry points; correspondences
// index into the given clouds.
RegistrationResult solve_from_correspondences(const PointCloud& src,
                                              const PointCloud& tgt,
                                              const CorrespondenceSet& corr,
                                              const PipelineConfig& config,
                                              RegistrationResult result) {
  result.num_raw_corr = static_cast<int>(corr.size());
  if (corr.empty()) throw EmptyCorrespondences("registration: no correspondences");

  if (config.solver == SolverKind::kRansac) {
    const auto t0 = Clock::now();
    auto res = register_ransac(src, tgt, corr, config.ransac_iterations,
                               config.ransac_inlier_thresh, config.ransac_seed);
    result.transform = res.transform;
    result.num_pruned_corr = res.num_pruned_corr;
    result.rotation_inliers = res.rotation_inliers;
    result.degenerate = res.degenerate;
    result.timings.optimization_ms = ms_since(t0);
    return result;
  }

  const RotationMode mode =
      config.solver == SolverKind::kFullGnc ? RotationMode::kFullSo3 : config.mode;

  // Pruning stage.
  const auto t_prune = Clock::now();
  PrunedSet pruned;
  if (corr.size() >= 2) {
    const auto graph = build_compat_graph(src, tgt, corr, config.compat_scale);
    const auto clique = mcis_heuristic(graph);
    pruned = filter_by_clique(src, tgt, corr, clique);
  } else {
    pruned.corr = corr;
  }
  result.num_pruned_corr = static_cast<int>(pruned.corr.size());
  result.timings.pruning_ms = ms_since(t_prune);

  // Rotation stage.
  const auto t_rot = Clock::now();
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  bool degenerate = false;
  std::vector<int> rotation_inlier_tims;
  if (pruned.tims.empty()) {
    // Single surviving pair: no rotational evidence. Quasi mode falls back
    // to identity yaw and still estimates translation; full mode cannot.
    if (mode == RotationMode::kFullSo3) {
      throw DegenerateRotation("rotation stage: single correspondence");
    }
    degenerate = true;
  } else {
    const auto est = estimate_rotation_gnc(pruned.tims, config.gnc, mode);
    rotation = est.rotation;
    degenerate = est.degenerate;
    rotation_inlier_tims = est.inlier_tims;
  }
  result.rotation_inliers = static_cast<int>(rotation_inlier_tims.size());
  result.timings.rotation_ms = ms_since(t_rot);

  // Translation stage.
  const auto t_trans = Clock::now();
  CorrespondenceSet trans_corr = pruned.corr;
  if (config.cote_rotation_inliers_only && !rotation_inlier_tims.empty()) {
    // A chain measurement k links pairs k and k+1; keep pairs touched by an
    // inlier measurement.
    std::vector<bool> keep(pruned.corr.size(), false);
    const int n = static_cast<int>(pruned.corr.size());
    for (int k : rotation_inlier_tims) {
      keep[k] = true;
      keep[(k + 1) % n] = true;
    }
    trans_corr.clear();
    for (int i = 0; i < n; ++i) {
      if (keep[i]) trans_corr.push_back(pruned.corr[i]);
    }
  }
  const auto meas = build_measurements(src, tgt, trans_corr, rotation);
  const auto trans = estimate_translation(meas, config.gnc.cbar);
  result.timings.translation_ms = ms_since(t_trans);
  result.timings.optimization_ms =
      result.timings.rotation_ms + result.timings.translation_ms;

  result.transform.rotation = rotation;
  result.transform.translation = trans.t;
  result.transform.mode = mode;
  result.transform.degenerate = degenerate;
  result.degenerate = degenerate;
  return result;
}

}  // namespace

void PipelineConfig::validate() const {
  if (!(voxel_size > 0.0) || !(r_normal > 0.0) || !(r_fpfh > 0.0)) {
    throw SpecError("PipelineConfig: radii and voxel size must be positive");
  }
  if (!(sigma_default > 0.0)) throw SpecError("PipelineConfig: sigma_default must be > 0");
  gnc.validate();
  if (r_fpfh <= r_normal) {
    std::cerr << "warning: r_fpfh (" << r_fpfh << ") <= r_normal (" << r_normal
              << "); descriptor radius should exceed the normal radius\n";
  }
}

PipelineConfig PipelineConfig::outdoor_profile() { return PipelineConfig{}; }

PipelineConfig PipelineConfig::indoor_profile() {
  PipelineConfig c;
  c.voxel_size = 0.1;
  c.r_normal = 0.3;
  c.r_fpfh = 0.45;
  c.sigma_default = 0.1;
  return c;
}

PointCloud apply_ins_alignment(const PointCloud& cloud, double roll, double pitch) {
  if (!std::isfinite(roll) || !std::isfinite(pitch)) {
    throw SpecError("apply_ins_alignment: non-finite angles");
  }
  RigidTransform t;
  t.rotation = (rot_y(pitch) * rot_x(roll)).transpose();
  return apply_transform(cloud, t);
}

RegistrationResult register_clouds(const PointCloud& src, const PointCloud& tgt,
                                   const PipelineConfig& config) {
  config.validate();
  if (src.empty() || tgt.empty()) throw EmptyCloud("register: empty input cloud");

  const auto t_total = Clock::now();

  // Optional INS gravity alignment of both clouds before any processing.
  Eigen::Matrix3d g_src = Eigen::Matrix3d::Identity();
  Eigen::Matrix3d g_tgt = Eigen::Matrix3d::Identity();
  PointCloud src_a = src, tgt_a = tgt;
  if (config.ins_src) {
    g_src = (rot_y(config.ins_src->pitch) * rot_x(config.ins_src->roll)).transpose();
    src_a = apply_ins_alignment(src, config.ins_src->roll, config.ins_src->pitch);
  }
  if (config.ins_tgt) {
    g_tgt = (rot_y(config.ins_tgt->pitch) * rot_x(config.ins_tgt->roll)).transpose();
    tgt_a = apply_ins_alignment(tgt, config.ins_tgt->roll, config.ins_tgt->pitch);
  }

  const auto t_pre = Clock::now();
  const PointCloud ds_src = voxel_downsample(src_a, config.voxel_size);
  const PointCloud ds_tgt = voxel_downsample(tgt_a, config.voxel_size);
  const auto n_src = estimate_normals(ds_src, config.r_normal);
  const auto n_tgt = estimate_normals(ds_tgt, config.r_normal);
  const auto d_src = compute_fpfh(ds_src, n_src, config.r_fpfh);
  const auto d_tgt = compute_fpfh(ds_tgt, n_tgt, config.r_fpfh);
  const auto corr = match_correspondences(d_src, d_tgt, config.sigma_default);

  RegistrationResult result;
  result.timings.preprocess_ms = ms_since(t_pre);

  result = solve_from_correspondences(ds_src, ds_tgt, corr, config, result);

  // Map the aligned-frame estimate back onto the original clouds:
  // tgt = G_tgt^-1 * (R' * G_src * src + t').
  RigidTransform t_final;
  t_final.rotation = g_tgt.transpose() * result.transform.rotation * g_src;
  t_final.translation = g_tgt.transpose() * result.transform.translation;
  t_final.mode = result.transform.mode;
  t_final.degenerate = result.transform.degenerate;
  result.transform = t_final;

  if (config.refine) {
    const auto icp = refine_icp(voxel_downsample(src, config.voxel_size),
                                voxel_downsample(tgt, config.voxel_size),
                                result.transform, config.icp_max_corr_dist,
                                config.icp_max_iters);
    if (icp.progressed) result.transform = icp.transform;
  }

  result.timings.total_ms = ms_since(t_total);
  return result;
}

RegistrationResult register_with_correspondences(const PointCloud& src,
                                                 const PointCloud& tgt,
                                                 const CorrespondenceSet& corr,
                                                 const PipelineConfig& config) {
  config.validate();
  if (src.empty() || tgt.empty()) throw EmptyCloud("register: empty input cloud");
  for (const auto& c : corr) {
    if (c.src < 0 || c.src >= static_cast<int>(src.size()) || c.tgt < 0 ||
        c.tgt >= static_cast<int>(tgt.size())) {
      throw IndexOutOfRange("register_with_correspondences: index out of range");
    }
    if (!(c.sigma > 0.0)) throw SpecError("register_with_correspondences: sigma <= 0");
  }

  const auto t_total = Clock::now();

  // Same INS handling as the feature pipeline; indices survive the rotation.
  Eigen::Matrix3d g_src = Eigen::Matrix3d::Identity();
  Eigen::Matrix3d g_tgt = Eigen::Matrix3d::Identity();
  PointCloud src_a = src, tgt_a = tgt;
  if (config.ins_src) {
    g_src = (rot_y(config.ins_src->pitch) * rot_x(config.ins_src->roll)).transpose();
    src_a = apply_ins_alignment(src, config.ins_src->roll, config.ins_src->pitch);
  }
  if (config.ins_tgt) {
    g_tgt = (rot_y(config.ins_tgt->pitch) * rot_x(config.ins_tgt->roll)).transpose();
    tgt_a = apply_ins_alignment(tgt, config.ins_tgt->roll, config.ins_tgt->pitch);
  }

  RegistrationResult result = solve_from_correspondences(src_a, tgt_a, corr, config, {});

  RigidTransform t_final;
  t_final.rotation = g_tgt.transpose() * result.transform.rotation * g_src;
  t_final.translation = g_tgt.transpose() * result.transform.translation;
  t_final.mode = result.transform.mode;
  t_final.degenerate = result.transform.degenerate;
  result.transform = t_final;

  result.timings.total_ms = ms_since(t_total);
  return result;
}

IcpResult refine_icp(const PointCloud& src, const PointCloud& tgt,
                     const RigidTransform& initial, double max_corr_dist,
                     int max_iters) {
  if (src.empty() || tgt.empty()) throw EmptyCloud("refine_icp: empty input cloud");
  if (!(max_corr_dist > 0.0)) throw SpecError("refine_icp: max_corr_dist must be > 0");

  NeighborGrid grid(tgt.points, max_corr_dist);

  IcpResult best;
  best.transform = initial;
  best.mse = std::numeric_limits<double>::infinity();

  RigidTransform current = initial;
  double prev_mse = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iters; ++it) {
    std::vector<Eigen::Vector3d> ps, qs;
    double sq_sum = 0.0;
    for (const auto& p : src.points) {
      const Eigen::Vector3d tp = current * p;
      const int j = grid.nearest(tp, max_corr_dist);
      if (j < 0) continue;
      ps.push_back(p);
      qs.push_back(tgt.points[j]);
      sq_sum += (tgt.points[j] - tp).squaredNorm();
    }
    if (ps.empty()) break;  // no associations under the gate

    const double mse = sq_sum / static_cast<double>(ps.size());
    if (mse < best.mse) {
      best.mse = mse;
      best.transform = current;
      best.progressed = true;
    }
    best.iterations = it + 1;
    if (std::abs(prev_mse - mse) < 1e-8) break;
    prev_mse = mse;

    RigidTransform next;
    if (!fit_rigid(ps, qs, next)) break;
    current = next;
  }

  if (!best.progressed) {
    best.transform = initial;
    best.transform.degenerate = true;
    best.mse = 0.0;
  }
  return best;
}

RegistrationResult register_ransac(const PointCloud& src, const PointCloud& tgt,
                                   const CorrespondenceSet& corr, int iterations,
                                   double inlier_thresh, std::uint64_t seed) {
  RegistrationResult result;
  result.num_raw_corr = static_cast<int>(corr.size());
  result.num_pruned_corr = result.num_raw_corr;
  if (corr.size() < 3) {
    result.transform = RigidTransform::Identity();
    result.transform.degenerate = true;
    result.degenerate = true;
    return result;
  }

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(corr.size()) - 1);

  RigidTransform best_model = RigidTransform::Identity();
  int best_inliers = 0;
  std::vector<Eigen::Vector3d> ps(3), qs(3);
  for (int it = 0; it < iterations; ++it) {
    int a = pick(rng), b = pick(rng), c = pick(rng);
    if (a == b || b == c || a == c) continue;
    ps[0] = src.points[corr[a].src];
    ps[1] = src.points[corr[b].src];
    ps[2] = src.points[corr[c].src];
    qs[0] = tgt.points[corr[a].tgt];
    qs[1] = tgt.points[corr[b].tgt];
    qs[2] = tgt.points[corr[c].tgt];
    RigidTransform model;
    if (!fit_rigid(ps, qs, model)) continue;

    int inliers = 0;
    for (const auto& cc : corr) {
      const Eigen::Vector3d r = tgt.points[cc.tgt] - (model * src.points[cc.src]);
      if (r.norm() <= inlier_thresh) ++inliers;
    }
    if (inliers > best_inliers) {
      best_inliers = inliers;
      best_model = model;
    }
  }

  if (best_inliers < 3) {
    // Total failure: identity, matching the usual baseline convention.
    result.transform = RigidTransform::Identity();
    result.transform.degenerate = true;
    result.degenerate = true;
    return result;
  }
  result.transform = best_model;
  result.rotation_inliers = best_inliers;
  return result;
}

}  // namespace quatro
