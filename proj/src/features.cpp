#include "quatro/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

namespace quatro {

namespace {

// Darboux-frame pair features between two oriented points. Returns false
// for degenerate geometry (coincident points or normal parallel to the
// connecting line). Convention follows the usual simplified point feature
// histogram: the source is the point whose normal makes the smaller angle
// with the connecting line.
bool pair_features(const Point3& pi, const Eigen::Vector3d& ni, const Point3& pj,
                   const Eigen::Vector3d& nj, double& alpha, double& phi,
                   double& theta) {
  Eigen::Vector3d d = pj - pi;
  const double dist = d.norm();
  if (dist < 1e-12) return false;
  d /= dist;

  Eigen::Vector3d ns = ni;
  Eigen::Vector3d nt = nj;
  if (std::abs(nj.dot(d)) > std::abs(ni.dot(d))) {
    ns = nj;
    nt = ni;
    d = -d;
  }

  const Eigen::Vector3d& u = ns;
  Eigen::Vector3d v = d.cross(u);
  const double vn = v.norm();
  if (vn < 1e-12) return false;
  v /= vn;
  const Eigen::Vector3d w = u.cross(v);

  alpha = v.dot(nt);        // in [-1, 1]
  phi = u.dot(d);           // in [-1, 1]
  theta = std::atan2(w.dot(nt), u.dot(nt));  // in (-pi, pi]
  return true;
}

int bin_unit(double f) {
  int b = static_cast<int>(std::floor(static_cast<double>(kFpfhBins) * (f + 1.0) / 2.0));
  return std::clamp(b, 0, kFpfhBins - 1);
}

int bin_angle(double f) {
  int b = static_cast<int>(std::floor(static_cast<double>(kFpfhBins) * (f + std::numbers::pi) /
                                      (2.0 * std::numbers::pi)));
  return std::clamp(b, 0, kFpfhBins - 1);
}

void normalize_blocks(Eigen::Matrix<double, kFpfhDim, 1>& h) {
  for (int b = 0; b < 3; ++b) {
    const double s = h.segment<kFpfhBins>(b * kFpfhBins).sum();
    if (s > 0.0) h.segment<kFpfhBins>(b * kFpfhBins) *= 100.0 / s;
  }
}

}  // namespace

std::vector<FpfhDescriptor> compute_fpfh(const PointCloud& cloud,
                                         const std::vector<Normal3>& normals,
                                         double radius) {
  if (cloud.empty()) throw EmptyCloud("compute_fpfh: empty input cloud");
  if (normals.size() != cloud.size())
    throw SpecError("compute_fpfh: normals not aligned 1:1 with cloud");
  if (!(radius > 0.0)) throw SpecError("compute_fpfh: radius must be > 0");

  const int n = static_cast<int>(cloud.size());
  NeighborGrid grid(cloud.points, radius);

  // Pass 1: simplified per-point histograms.
  std::vector<Eigen::Matrix<double, kFpfhDim, 1>> spfh(
      n, Eigen::Matrix<double, kFpfhDim, 1>::Zero());
  std::vector<std::vector<int>> nbrs(n);
  for (int i = 0; i < n; ++i) {
    if (!normals[i].valid) continue;
    int count = 0;
    for (int j : grid.radius_search(cloud.points[i], radius)) {
      if (j == i || !normals[j].valid) continue;
      double a, p, t;
      if (!pair_features(cloud.points[i], normals[i].dir, cloud.points[j],
                         normals[j].dir, a, p, t))
        continue;
      spfh[i](bin_unit(a)) += 1.0;
      spfh[i](kFpfhBins + bin_unit(p)) += 1.0;
      spfh[i](2 * kFpfhBins + bin_angle(t)) += 1.0;
      nbrs[i].push_back(j);
      ++count;
    }
    if (count > 0) normalize_blocks(spfh[i]);
  }

  // Pass 2: 1/distance-weighted aggregation over neighbors.
  std::vector<FpfhDescriptor> out(n);
  for (int i = 0; i < n; ++i) {
    if (!normals[i].valid || nbrs[i].empty()) continue;
    Eigen::Matrix<double, kFpfhDim, 1> h = spfh[i];
    Eigen::Matrix<double, kFpfhDim, 1> acc = Eigen::Matrix<double, kFpfhDim, 1>::Zero();
    for (int j : nbrs[i]) {
      const double w = (cloud.points[j] - cloud.points[i]).norm();
      if (w < 1e-12) continue;
      acc += spfh[j] / w;
    }
    h += acc / static_cast<double>(nbrs[i].size());
    normalize_blocks(h);
    out[i].histogram = h;
    out[i].valid = true;
  }
  return out;
}

CorrespondenceSet match_correspondences(const std::vector<FpfhDescriptor>& desc_src,
                                        const std::vector<FpfhDescriptor>& desc_tgt,
                                        double default_sigma) {
  if (desc_src.empty() || desc_tgt.empty())
    throw EmptyCorrespondences("match_correspondences: empty descriptor sequence");

  auto nearest = [](const FpfhDescriptor& q, const std::vector<FpfhDescriptor>& set) {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int k = 0; k < static_cast<int>(set.size()); ++k) {
      if (!set[k].valid) continue;
      const double d = (set[k].histogram - q.histogram).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    return best;
  };

  // Target-side nearest sources, computed once.
  std::vector<int> nn_src_of_tgt(desc_tgt.size(), -1);
  for (int j = 0; j < static_cast<int>(desc_tgt.size()); ++j) {
    if (desc_tgt[j].valid) nn_src_of_tgt[j] = nearest(desc_tgt[j], desc_src);
  }

  CorrespondenceSet corr;
  for (int i = 0; i < static_cast<int>(desc_src.size()); ++i) {
    if (!desc_src[i].valid) continue;
    const int j = nearest(desc_src[i], desc_tgt);
    if (j >= 0 && nn_src_of_tgt[j] == i) corr.push_back({i, j, default_sigma});
  }
  if (corr.empty())
    throw EmptyCorrespondences("match_correspondences: no reciprocal pairs");
  return corr;
}

CorrespondenceSet load_correspondences(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open correspondence file: " + path);

  CorrespondenceSet corr;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    int i, j;
    double sigma;
    if (!(ss >> i)) continue;  // blank or comment-only line
    if (!(ss >> j >> sigma)) {
      throw ParseError("malformed correspondence at " + path + ":" +
                       std::to_string(lineno));
    }
    std::string rest;
    if (ss >> rest) {
      throw ParseError("trailing tokens at " + path + ":" + std::to_string(lineno));
    }
    if (!(sigma > 0.0)) {
      throw ParseError("non-positive sigma at " + path + ":" + std::to_string(lineno));
    }
    corr.push_back({i, j, sigma});
  }
  if (corr.empty()) throw EmptyCorrespondences("no correspondences in " + path);
  return corr;
}

void save_correspondences(const std::string& path, const CorrespondenceSet& corr) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open for writing: " + path);
  out << "# src_index tgt_index sigma\n";
  for (const auto& c : corr) out << c.src << " " << c.tgt << " " << c.sigma << "\n";
}

}  // namespace quatro
