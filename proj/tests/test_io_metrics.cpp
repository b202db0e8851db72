#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>

#include "quatro/config.hpp"
#include "quatro/io.hpp"
#include "quatro/metrics.hpp"

using namespace quatro;

TEST_CASE("kitti bin round-trip") {
  PointCloud cloud;
  cloud.points = {{1.5, -2.25, 0.125}, {0, 0, 0}, {100.5, 3.75, -8.5}};
  save_cloud("test_io.bin", cloud, CloudFormat::kKittiBin);
  const auto loaded = load_cloud("test_io.bin", CloudFormat::kKittiBin);
  REQUIRE(loaded.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(loaded.points[i].isApprox(cloud.points[i]));  // exact float32 values
  }
  std::remove("test_io.bin");
}

TEST_CASE("kitti bin: truncated record throws with byte offset") {
  {
    std::ofstream out("test_io_bad.bin", std::ios::binary);
    const char junk[10] = {};
    out.write(junk, sizeof(junk));
  }
  CHECK_THROWS_AS(load_cloud("test_io_bad.bin", CloudFormat::kKittiBin), ParseError);
  std::remove("test_io_bad.bin");

  {
    std::ofstream out("test_io_empty.bin", std::ios::binary);
  }
  CHECK_THROWS_AS(load_cloud("test_io_empty.bin", CloudFormat::kKittiBin), EmptyCloud);
  std::remove("test_io_empty.bin");
}

TEST_CASE("ply ascii round-trip preserves doubles") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> uni(-50.0, 50.0);
  PointCloud cloud;
  for (int i = 0; i < 100; ++i) cloud.points.emplace_back(uni(rng), uni(rng), uni(rng));
  save_cloud("test_io.ply", cloud, CloudFormat::kPlyAscii);
  const auto loaded = load_cloud_auto("test_io.ply");
  REQUIRE(loaded.size() == cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    CHECK((loaded.points[i] - cloud.points[i]).norm() < 1e-12);
  }
  std::remove("test_io.ply");
}

TEST_CASE("ply ascii: properties out of order are handled") {
  {
    std::ofstream out("test_io_reorder.ply");
    out << "ply\nformat ascii 1.0\nelement vertex 1\n"
        << "property float z\nproperty float x\nproperty float y\n"
        << "end_header\n3.0 1.0 2.0\n";
  }
  const auto loaded = load_cloud("test_io_reorder.ply", CloudFormat::kPlyAscii);
  REQUIRE(loaded.size() == 1);
  CHECK(loaded.points[0].isApprox(Point3(1.0, 2.0, 3.0)));
  std::remove("test_io_reorder.ply");
}

TEST_CASE("ply ascii: malformed header throws ParseError") {
  {
    std::ofstream out("test_io_badply.ply");
    out << "ply\nformat ascii 1.0\nelement vertex 2\nproperty float x\n"
        << "property float y\nproperty float z\nend_header\n1 2 3\n";
  }
  CHECK_THROWS_AS(load_cloud("test_io_badply.ply", CloudFormat::kPlyAscii), ParseError);
  std::remove("test_io_badply.ply");
}

TEST_CASE("pose file round-trip, KITTI 3x4 row-major") {
  RigidTransform t;
  t.rotation = rot_z(0.5) * rot_x(0.1);
  t.translation = Eigen::Vector3d(1.0, 2.0, 3.0);
  save_poses("test_io_poses.txt", {t, RigidTransform::Identity()});
  const auto poses = load_poses("test_io_poses.txt");
  REQUIRE(poses.size() == 2);
  CHECK((poses[0].rotation - t.rotation).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((poses[0].translation - t.translation).norm() < 1e-12);
  CHECK(poses[1].rotation.isIdentity(1e-12));
  std::remove("test_io_poses.txt");
}

TEST_CASE("rotation_error: exact on a 10 degree yaw") {
  const double err = rotation_error(rot_z(10.0 * M_PI / 180.0),
                                    Eigen::Matrix3d::Identity());
  CHECK(std::abs(err - 10.0) < 1e-9);
  CHECK(rotation_error(Eigen::Matrix3d::Identity(), Eigen::Matrix3d::Identity()) ==
        doctest::Approx(0.0));
  // Trace clamp: a numerically dirty identity must not produce NaN.
  Eigen::Matrix3d dirty = Eigen::Matrix3d::Identity() * (1.0 + 1e-15);
  CHECK(std::isfinite(rotation_error(dirty, Eigen::Matrix3d::Identity())));
}

TEST_CASE("translation_error is the squared norm") {
  CHECK(translation_error({1, 2, 2}, {0, 0, 0}) == doctest::Approx(9.0));
  CHECK(translation_error({1, 1, 1}, {1, 1, 1}) == doctest::Approx(0.0));
}

TEST_CASE("success: inclusive thresholds") {
  CHECK(success(2.0, 10.0));
  CHECK(success(0.0, 0.0));
  CHECK_FALSE(success(2.0001, 5.0));
  CHECK_FALSE(success(1.0, 10.0001));
}

TEST_CASE("aggregate: means and success rate") {
  std::vector<TrialRecord> recs;
  recs.push_back({1.0, 4.0, true, false});
  recs.push_back({3.0, 12.0, false, false});
  const auto rep = aggregate(recs);
  CHECK(rep.n == 2);
  // t_avg is the mean of squared residuals.
  CHECK(rep.t_avg == doctest::Approx((1.0 + 9.0) / 2.0));
  CHECK(rep.t_rmse == doctest::Approx(std::sqrt(5.0)));
  CHECK(rep.r_avg == doctest::Approx(8.0));
  CHECK(rep.success_rate == doctest::Approx(0.5));
  CHECK_THROWS_AS(aggregate({}), EmptyReport);
}

TEST_CASE("PosePair::relative") {
  PosePair pair;
  pair.t_src.rotation = rot_z(0.4);
  pair.t_src.translation = Eigen::Vector3d(1, 0, 0);
  pair.t_tgt.rotation = rot_z(0.1);
  pair.t_tgt.translation = Eigen::Vector3d(0, 2, 0);
  const auto rel = pair.relative();
  const Eigen::Matrix4d expect = pair.t_tgt.matrix().inverse() * pair.t_src.matrix();
  CHECK((rel.matrix() - expect).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("config: key-value parsing and overrides") {
  {
    std::ofstream out("test_cfg.txt");
    out << "# pipeline config\n"
        << "profile outdoor\n"
        << "cbar = 0.2\n"
        << "kappa 1.6\n"
        << "voxel_size 0.25\n"
        << "mode full\n";
  }
  const auto cfg = load_pipeline_config("test_cfg.txt");
  CHECK(cfg.gnc.cbar == doctest::Approx(0.2));
  CHECK(cfg.gnc.kappa == doctest::Approx(1.6));
  CHECK(cfg.voxel_size == doctest::Approx(0.25));
  CHECK(cfg.r_fpfh == doctest::Approx(0.65));  // untouched profile value
  CHECK(cfg.mode == RotationMode::kFullSo3);
  std::remove("test_cfg.txt");

  {
    std::ofstream out("test_cfg_bad.txt");
    out << "cbar not_a_number\n";
  }
  CHECK_THROWS_AS(load_pipeline_config("test_cfg_bad.txt"), ParseError);
  std::remove("test_cfg_bad.txt");
}
