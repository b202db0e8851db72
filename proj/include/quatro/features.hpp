#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "quatro/geometry.hpp"

namespace quatro {

inline constexpr int kFpfhBins = 11;
inline constexpr int kFpfhDim = 33;  // 3 angle features x 11 bins

struct FpfhDescriptor {
  Eigen::Matrix<double, kFpfhDim, 1> histogram =
      Eigen::Matrix<double, kFpfhDim, 1>::Zero();
  bool valid = false;
};

struct Correspondence {
  int src = 0;
  int tgt = 0;
  double sigma = 0.0;  // noise bound in meters
};

using CorrespondenceSet = std::vector<Correspondence>;

/// Two-pass FPFH over Darboux-frame angle features (alpha, phi, theta) of
/// neighbors within `radius`, followed by 1/distance-weighted aggregation.
/// Points without a valid normal or without any neighbor get a zero
/// descriptor flagged invalid.
std::vector<FpfhDescriptor> compute_fpfh(const PointCloud& cloud,
                                         const std::vector<Normal3>& normals,
                                         double radius);

/// Reciprocal nearest-neighbor test in descriptor space under L2. A pair
/// (i, j) is kept iff j is i's nearest target and i is j's nearest source.
/// Ties break toward the lowest index.
CorrespondenceSet match_correspondences(const std::vector<FpfhDescriptor>& desc_src,
                                        const std::vector<FpfhDescriptor>& desc_tgt,
                                        double default_sigma);

/// Reads whitespace-separated lines `src_index tgt_index sigma`; `#` starts
/// a comment. Index validity against actual clouds is checked at pipeline
/// bind time.
CorrespondenceSet load_correspondences(const std::string& path);

void save_correspondences(const std::string& path, const CorrespondenceSet& corr);

}  // namespace quatro
