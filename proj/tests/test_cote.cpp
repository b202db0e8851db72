#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "quatro/cote.hpp"

using namespace quatro;

namespace {

double truncated_objective(double t, const std::vector<double>& v,
                           const std::vector<double>& sigma, double cbar) {
  double c = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double r = (t - v[i]) * (t - v[i]) / (sigma[i] * sigma[i]);
    c += std::min(r, cbar * cbar);
  }
  return c;
}

// Oracle: dense grid scan of the truncated objective.
double grid_min_objective(const std::vector<double>& v, const std::vector<double>& sigma,
                          double cbar, int grid = 400001) {
  double lo = 1e300, hi = -1e300;
  for (std::size_t i = 0; i < v.size(); ++i) {
    lo = std::min(lo, v[i] - sigma[i] * cbar);
    hi = std::max(hi, v[i] + sigma[i] * cbar);
  }
  double best = 1e300;
  for (int i = 0; i < grid; ++i) {
    const double t = lo + (hi - lo) * i / (grid - 1);
    best = std::min(best, truncated_objective(t, v, sigma, cbar));
  }
  return best;
}

}  // namespace

TEST_CASE("cote_axis: unanimous cluster returns its weighted average") {
  const std::vector<double> v = {1.0, 1.02, 0.98};
  const std::vector<double> s = {0.3, 0.3, 0.3};
  const auto est = cote_axis(v, s, 0.15);
  CHECK(est.t_hat == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(est.inliers.size() == 3);
}

TEST_CASE("cote_axis: picks the larger consensus over an outlier") {
  const std::vector<double> v = {0.0, 0.01, -0.01, 50.0};
  const std::vector<double> s = {0.3, 0.3, 0.3, 0.3};
  const auto est = cote_axis(v, s, 0.15);
  CHECK(std::abs(est.t_hat) < 0.02);
  CHECK(est.inliers.size() == 3);
}

TEST_CASE("cote_axis: exact singleton ties resolve to the leftmost value") {
  // All values isolated: every candidate scores (N-1)*cbar^2 exactly.
  const std::vector<double> v = {2.0, 5.0, 9.0};
  const std::vector<double> s = {0.3, 0.3, 0.3};
  const auto est = cote_axis(v, s, 0.15);
  CHECK(est.t_hat == doctest::Approx(2.0));
  CHECK(est.inliers.size() == 1);
  CHECK(est.inliers[0] == 0);
}

TEST_CASE("cote_axis: objective matches a dense grid oracle") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> uv(-5.0, 5.0);
  std::uniform_real_distribution<double> us(0.1, 0.6);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 18);
    std::vector<double> v(n), s(n);
    for (int i = 0; i < n; ++i) {
      v[i] = uv(rng);
      s[i] = us(rng);
    }
    // Seed a plausible cluster so there is usually structure.
    if (n >= 4) {
      v[1] = v[0] + 0.01;
      v[2] = v[0] - 0.01;
    }
    const double cbar = 0.4;
    const auto est = cote_axis(v, s, cbar);
    const double got = truncated_objective(est.t_hat, v, s, cbar);
    CHECK(got == doctest::Approx(est.objective).epsilon(1e-9));
    CHECK(got <= grid_min_objective(v, s, cbar) + 1e-9);
  }
}

TEST_CASE("cote_axis: translation equivariance") {
  std::mt19937_64 rng(83);
  std::uniform_real_distribution<double> uv(-2.0, 2.0);
  std::vector<double> v(12), s(12, 0.3);
  for (auto& x : v) x = uv(rng);
  const auto base = cote_axis(v, s, 0.15);
  for (auto& x : v) x += 7.5;
  const auto shifted = cote_axis(v, s, 0.15);
  CHECK(shifted.t_hat == doctest::Approx(base.t_hat + 7.5).epsilon(1e-12));
  CHECK(shifted.inliers == base.inliers);
}

TEST_CASE("build_measurements: v_i = q - R p") {
  PointCloud src, tgt;
  src.points = {{1, 0, 0}, {0, 1, 0}};
  tgt.points = {{0, 1, 2}, {-1, 0, 2}};
  const Eigen::Matrix3d r = rot_z(M_PI / 2.0);
  CorrespondenceSet corr = {{0, 0, 0.3}, {1, 1, 0.2}};
  const auto meas = build_measurements(src, tgt, corr, r);
  REQUIRE(meas.size() == 2);
  CHECK((meas.v[0] - Eigen::Vector3d(0, 0, 2)).norm() < 1e-12);
  CHECK((meas.v[1] - Eigen::Vector3d(0, 0, 2)).norm() < 1e-12);
  CHECK(meas.sigma[1] == doctest::Approx(0.2));
}

TEST_CASE("estimate_translation: recovers a known offset under outliers") {
  std::mt19937_64 rng(91);
  std::uniform_real_distribution<double> uni(-10.0, 10.0);
  std::normal_distribution<double> gauss(0.0, 0.01);
  const Eigen::Vector3d t_gt(3.0, -1.5, 0.8);
  const Eigen::Matrix3d r_gt = rot_z(0.6);

  PointCloud src, tgt;
  CorrespondenceSet corr;
  for (int i = 0; i < 60; ++i) {
    const Eigen::Vector3d p(uni(rng), uni(rng), uni(rng));
    src.points.push_back(p);
    Eigen::Vector3d q = r_gt * p + t_gt;
    if (i % 4 == 0) q += Eigen::Vector3d(uni(rng), uni(rng), uni(rng));  // 25% outliers
    else q += Eigen::Vector3d(gauss(rng), gauss(rng), gauss(rng));
    tgt.points.push_back(q);
    corr.push_back({i, i, 0.1});
  }
  const auto meas = build_measurements(src, tgt, corr, r_gt);
  const auto est = estimate_translation(meas, 0.15);
  CHECK((est.t - t_gt).norm() < 0.02);
  for (int a = 0; a < 3; ++a) CHECK(est.axes[a].inliers.size() >= 40);
}

TEST_CASE("estimate_translation: per-axis independence") {
  // An outlier on z only must not disturb x or y.
  TranslationMeasurements meas;
  for (int i = 0; i < 10; ++i) {
    meas.v.emplace_back(1.0, 2.0, (i == 0) ? 40.0 : 3.0);
    meas.sigma.push_back(0.3);
  }
  const auto est = estimate_translation(meas, 0.15);
  CHECK(est.t.x() == doctest::Approx(1.0));
  CHECK(est.t.y() == doctest::Approx(2.0));
  CHECK(est.t.z() == doctest::Approx(3.0));
  CHECK(est.axes[2].inliers.size() == 9);
}
