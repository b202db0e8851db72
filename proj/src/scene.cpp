#include "quatro/scene.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

namespace quatro {

void SceneSpec::validate() const {
  if (n_points < 4) throw SpecError("SceneSpec: n_points must be >= 4");
  if (!(extent > 0.0)) throw SpecError("SceneSpec: extent must be > 0");
  if (outlier_ratio < 0.0 || outlier_ratio >= 1.0)
    throw SpecError("SceneSpec: outlier_ratio must be in [0, 1)");
  if (quasi_ratio < 0.0 || quasi_ratio >= 1.0)
    throw SpecError("SceneSpec: quasi_ratio must be in [0, 1)");
  if (!(quasi_lift > 0.0)) throw SpecError("SceneSpec: quasi_lift must be > 0");
  if (!(overlap > 0.0 && overlap <= 1.0))
    throw SpecError("SceneSpec: overlap must be in (0, 1]");
  if (noise_sigma < 0.0) throw SpecError("SceneSpec: noise_sigma must be >= 0");
  if (!(sigma > 0.0)) throw SpecError("SceneSpec: sigma must be > 0");
  if (inlier_floor && *inlier_floor < 0) throw SpecError("SceneSpec: negative inlier_floor");
}

RigidTransform SceneSpec::ground_truth() const {
  RigidTransform t;
  t.rotation = rot_y(pitch) * rot_x(roll) * rot_z(yaw);
  t.translation = translation;
  t.mode = (roll == 0.0 && pitch == 0.0) ? RotationMode::kQuasiSo3
                                         : RotationMode::kFullSo3;
  return t;
}

Scene generate_scene(const SceneSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);

  const double half = spec.extent / 2.0;

  // Source: ground plane with gentle undulation plus vertical facades.
  Scene scene;
  auto& src = scene.src.points;
  const int n_ground = spec.n_points / 2;
  for (int i = 0; i < n_ground; ++i) {
    const double x = (uni(rng) * 2.0 - 1.0) * half;
    const double y = (uni(rng) * 2.0 - 1.0) * half;
    const double z = 0.15 * std::sin(0.7 * x) * std::sin(0.9 * y);
    src.emplace_back(x, y, z);
  }
  const int n_facade_pts = spec.n_points - n_ground;
  const int n_facades = 4 + static_cast<int>(rng() % 4);
  struct Facade {
    Eigen::Vector2d c;
    double angle, width, height;
  };
  std::vector<Facade> facades;
  for (int f = 0; f < n_facades; ++f) {
    Facade fa;
    fa.c = Eigen::Vector2d((uni(rng) * 2.0 - 1.0) * half, (uni(rng) * 2.0 - 1.0) * half);
    fa.angle = uni(rng) * std::numbers::pi;
    fa.width = 2.0 + uni(rng) * std::max(1.0, spec.extent / 3.0 - 2.0);
    fa.height = 2.0 + uni(rng) * 4.0;
    facades.push_back(fa);
  }
  for (int i = 0; i < n_facade_pts; ++i) {
    const auto& fa = facades[i % n_facades];
    const double s = (uni(rng) - 0.5) * fa.width;
    const double z = uni(rng) * fa.height;
    src.emplace_back(fa.c.x() + s * std::cos(fa.angle), fa.c.y() + s * std::sin(fa.angle),
                     z);
  }
  for (auto& p : src) p += spec.center;

  // Overlap: the target only sees the upper x-quantile of the source.
  std::vector<int> order(src.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return src[a].x() < src[b].x(); });
  const int n_keep = std::max(
      1, static_cast<int>(std::ceil(spec.overlap * static_cast<double>(src.size()))));
  std::vector<int> visible(order.end() - n_keep, order.end());
  std::sort(visible.begin(), visible.end());

  scene.gt = spec.ground_truth();
  std::normal_distribution<double> gauss(0.0, spec.noise_sigma);
  auto& tgt = scene.tgt.points;
  tgt.reserve(visible.size());
  for (int idx : visible) {
    Eigen::Vector3d q = scene.gt * src[idx];
    if (spec.noise_sigma > 0.0) {
      q += Eigen::Vector3d(gauss(rng), gauss(rng), gauss(rng));
    }
    tgt.push_back(q);
  }

  // Candidate correspondences, optionally subsampled.
  std::vector<std::pair<int, int>> cand;  // (src index, tgt index)
  cand.reserve(visible.size());
  for (int i = 0; i < static_cast<int>(visible.size()); ++i) {
    cand.emplace_back(visible[i], i);
  }
  std::shuffle(cand.begin(), cand.end(), rng);
  int n_corr = static_cast<int>(cand.size());
  if (spec.n_correspondences > 0) {
    n_corr = std::min(n_corr, spec.n_correspondences);
    cand.resize(n_corr);
  }

  // Decide which positions stay inliers. With an explicit floor the inliers
  // sit at the front of the list so their chain measurements are adjacent.
  std::vector<int> positions(n_corr);
  for (int i = 0; i < n_corr; ++i) positions[i] = i;
  std::vector<bool> inlier(n_corr, true);
  std::vector<int> outlier_positions;
  if (spec.inlier_floor) {
    if (*spec.inlier_floor > n_corr) {
      throw SpecError("SceneSpec: inlier_floor exceeds available correspondences");
    }
    for (int i = *spec.inlier_floor; i < n_corr; ++i) {
      inlier[i] = false;
      outlier_positions.push_back(i);
    }
  } else {
    const int n_out = static_cast<int>(std::llround(spec.outlier_ratio * n_corr));
    std::shuffle(positions.begin(), positions.end(), rng);
    for (int i = 0; i < n_out; ++i) {
      inlier[positions[i]] = false;
      outlier_positions.push_back(positions[i]);
    }
    std::sort(outlier_positions.begin(), outlier_positions.end());
  }

  // Outlier realization: a quasi share binds to a vertically lifted copy of
  // the true target point; the rest rebind to uniformly random targets.
  const int n_tgt_real = static_cast<int>(tgt.size());
  int n_quasi = std::min(static_cast<int>(std::llround(spec.quasi_ratio * n_corr)),
                         static_cast<int>(outlier_positions.size()));
  scene.corr.resize(n_corr);
  scene.inlier_mask.assign(n_corr, true);
  std::vector<int> quasi_tgt(n_corr, -1);
  int quasi_done = 0;
  for (int pos : outlier_positions) {
    scene.inlier_mask[pos] = false;
    if (quasi_done < n_quasi) {
      // Deterministic positive ladder keeps the lifted copies mutually
      // separated along z.
      const double delta = spec.quasi_lift * (quasi_done + 1) + uni(rng) * 0.2;
      Eigen::Vector3d q = tgt[cand[pos].second];
      q.z() += delta;
      tgt.push_back(q);
      quasi_tgt[pos] = static_cast<int>(tgt.size()) - 1;
      ++quasi_done;
    }
  }
  for (int i = 0; i < n_corr; ++i) {
    Correspondence c;
    c.src = cand[i].first;
    c.sigma = spec.sigma;
    if (scene.inlier_mask[i]) {
      c.tgt = cand[i].second;
    } else if (quasi_tgt[i] >= 0) {
      c.tgt = quasi_tgt[i];
    } else {
      int j = static_cast<int>(rng() % static_cast<std::uint64_t>(n_tgt_real));
      if (j == cand[i].second) j = (j + 1) % n_tgt_real;
      c.tgt = j;
    }
    scene.corr[i] = c;
  }
  return scene;
}

namespace {

double kv_double(const std::map<std::string, std::string>& kv, const std::string& key,
                 double fallback) {
  auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw ParseError("bad numeric value for key '" + key + "'");
  }
}

long kv_long(const std::map<std::string, std::string>& kv, const std::string& key,
             long fallback) {
  auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  try {
    return std::stol(it->second);
  } catch (const std::exception&) {
    throw ParseError("bad integer value for key '" + key + "'");
  }
}

constexpr double kDegToRad = std::numbers::pi / 180.0;

}  // namespace

SceneSpec scene_spec_from_map(const std::map<std::string, std::string>& kv) {
  SceneSpec s;
  s.n_points = static_cast<int>(kv_long(kv, "n_points", s.n_points));
  s.extent = kv_double(kv, "extent", s.extent);
  s.center = Eigen::Vector3d(kv_double(kv, "center_x", 0.0), kv_double(kv, "center_y", 0.0),
                             kv_double(kv, "center_z", 0.0));
  s.yaw = kv_double(kv, "yaw_deg", 0.0) * kDegToRad;
  s.roll = kv_double(kv, "roll_deg", 0.0) * kDegToRad;
  s.pitch = kv_double(kv, "pitch_deg", 0.0) * kDegToRad;
  s.translation = Eigen::Vector3d(kv_double(kv, "tx", 0.0), kv_double(kv, "ty", 0.0),
                                  kv_double(kv, "tz", 0.0));
  s.outlier_ratio = kv_double(kv, "outlier_ratio", s.outlier_ratio);
  s.quasi_ratio = kv_double(kv, "quasi_ratio", s.quasi_ratio);
  s.quasi_lift = kv_double(kv, "quasi_lift", s.quasi_lift);
  s.noise_sigma = kv_double(kv, "noise_sigma", s.noise_sigma);
  s.overlap = kv_double(kv, "overlap", s.overlap);
  s.n_correspondences =
      static_cast<int>(kv_long(kv, "n_correspondences", s.n_correspondences));
  if (kv.count("inlier_floor")) {
    s.inlier_floor = static_cast<int>(kv_long(kv, "inlier_floor", 0));
  }
  s.sigma = kv_double(kv, "sigma", s.sigma);
  s.seed = static_cast<std::uint64_t>(kv_long(kv, "seed", 0));
  s.validate();
  return s;
}

SweepSpec sweep_spec_from_map(const std::map<std::string, std::string>& kv) {
  SweepSpec s;
  auto it = kv.find("variable");
  if (it != kv.end()) {
    if (it->second == "outlier_ratio") s.variable = SweepVariable::kOutlierRatio;
    else if (it->second == "yaw_magnitude") s.variable = SweepVariable::kYawMagnitude;
    else if (it->second == "viewpoint_distance") s.variable = SweepVariable::kViewpointDistance;
    else if (it->second == "inlier_count") s.variable = SweepVariable::kInlierCount;
    else throw ParseError("unknown sweep variable: " + it->second);
  }
  if (auto vit = kv.find("values"); vit != kv.end()) {
    s.values.clear();
    std::stringstream ss(vit->second);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (!tok.empty()) s.values.push_back(std::stod(tok));
    }
  }
  s.trials_per_value = static_cast<int>(kv_long(kv, "trials", s.trials_per_value));
  if (auto sit = kv.find("solvers"); sit != kv.end()) {
    s.solvers.clear();
    std::stringstream ss(sit->second);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok == "quatro") s.solvers.push_back(SolverKind::kQuatro);
      else if (tok == "full_gnc" || tok == "gnc") s.solvers.push_back(SolverKind::kFullGnc);
      else if (tok == "ransac") s.solvers.push_back(SolverKind::kRansac);
      else if (!tok.empty()) throw ParseError("unknown solver: " + tok);
    }
  }
  if (s.values.empty()) throw SpecError("SweepSpec: no values");
  if (s.solvers.empty()) throw SpecError("SweepSpec: no solvers");
  if (s.trials_per_value < 1) throw SpecError("SweepSpec: trials must be >= 1");
  return s;
}

std::uint64_t sweep_trial_seed(std::uint64_t base_seed, int value_index, int trial) {
  const std::uint64_t mix =
      0x9E3779B97F4A7C15ull *
      (static_cast<std::uint64_t>(value_index) * 1000003ull +
       static_cast<std::uint64_t>(trial) + 1ull);
  return base_seed ^ mix;
}

std::string solver_name(SolverKind s) {
  switch (s) {
    case SolverKind::kQuatro: return "quatro";
    case SolverKind::kFullGnc: return "full_gnc";
    case SolverKind::kRansac: return "ransac";
  }
  return "unknown";
}

SweepRow run_trial(const Scene& scene, SolverKind solver, const PipelineConfig& config) {
  PipelineConfig cfg = config;
  cfg.solver = solver;
  if (solver == SolverKind::kFullGnc) cfg.mode = RotationMode::kFullSo3;

  SweepRow row;
  row.solver = solver;
  RigidTransform est = RigidTransform::Identity();
  try {
    const auto res = register_with_correspondences(scene.src, scene.tgt, scene.corr, cfg);
    est = res.transform;
    row.degenerate = res.degenerate;
  } catch (const DegenerateRotation&) {
    // Failure convention: identity estimate, flagged degenerate.
    row.degenerate = true;
  }
  row.t_err_m = (scene.gt.translation - est.translation).norm();
  row.r_err_deg = rotation_error(est.rotation, scene.gt.rotation);
  row.success = success(row.t_err_m, row.r_err_deg);
  return row;
}

SweepResult run_sweep(const SweepSpec& sweep, const SceneSpec& base,
                      const PipelineConfig& config) {
  SweepResult result;
  for (int vi = 0; vi < static_cast<int>(sweep.values.size()); ++vi) {
    const double value = sweep.values[vi];
    SceneSpec spec = base;
    switch (sweep.variable) {
      case SweepVariable::kOutlierRatio:
        spec.outlier_ratio = value;
        break;
      case SweepVariable::kYawMagnitude:
        spec.yaw = value * kDegToRad;  // sweep values in degrees
        break;
      case SweepVariable::kViewpointDistance:
        spec.translation = Eigen::Vector3d(value, 0.0, 0.0);
        break;
      case SweepVariable::kInlierCount:
        spec.inlier_floor = static_cast<int>(value);
        break;
    }
    for (SolverKind solver : sweep.solvers) {
      std::vector<TrialRecord> records;
      for (int trial = 0; trial < sweep.trials_per_value; ++trial) {
        spec.seed = sweep_trial_seed(base.seed, vi, trial);
        PipelineConfig cfg = config;
        cfg.ransac_seed = spec.seed;
        const Scene scene = generate_scene(spec);
        SweepRow row = run_trial(scene, solver, cfg);
        row.value = value;
        row.trial = trial;
        row.seed = spec.seed;
        result.rows.push_back(row);
        records.push_back({row.t_err_m, row.r_err_deg, row.success, row.degenerate});
      }
      result.aggregates.push_back({value, solver, aggregate(records)});
    }
  }
  return result;
}

void write_sweep_csv(const std::string& path, const SweepResult& result,
                     bool include_timings) {
  (void)include_timings;
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open for writing: " + path);
  out.precision(17);
  out << "value,solver,trial,seed,t_err_m,r_err_deg,success,degenerate\n";
  for (const auto& r : result.rows) {
    out << r.value << "," << solver_name(r.solver) << "," << r.trial << "," << r.seed
        << "," << r.t_err_m << "," << r.r_err_deg << "," << (r.success ? 1 : 0) << ","
        << (r.degenerate ? 1 : 0) << "\n";
  }
}

}  // namespace quatro
