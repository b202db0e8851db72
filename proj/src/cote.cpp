#include "quatro/cote.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace quatro {

TranslationMeasurements build_measurements(const PointCloud& src, const PointCloud& tgt,
                                           const CorrespondenceSet& corr,
                                           const Eigen::Matrix3d& rotation) {
  if (corr.empty()) throw EmptyCorrespondences("build_measurements: empty set");
  TranslationMeasurements meas;
  meas.v.reserve(corr.size());
  meas.sigma.reserve(corr.size());
  for (const auto& c : corr) {
    if (c.src < 0 || c.src >= static_cast<int>(src.size()) || c.tgt < 0 ||
        c.tgt >= static_cast<int>(tgt.size())) {
      throw IndexOutOfRange("build_measurements: correspondence out of range");
    }
    meas.v.push_back(tgt.points[c.tgt] - rotation * src.points[c.src]);
    meas.sigma.push_back(c.sigma);
  }
  return meas;
}

AxisEstimate cote_axis(const std::vector<double>& values,
                       const std::vector<double>& sigma, double cbar) {
  const int n = static_cast<int>(values.size());
  if (n == 0) throw SpecError("cote_axis: no values");
  if (sigma.size() != values.size()) throw SpecError("cote_axis: sigma count mismatch");

  std::vector<double> endpoints;
  endpoints.reserve(2 * n);
  for (int i = 0; i < n; ++i) {
    endpoints.push_back(values[i] - sigma[i] * cbar);
    endpoints.push_back(values[i] + sigma[i] * cbar);
  }
  std::sort(endpoints.begin(), endpoints.end());

  const double c2 = cbar * cbar;
  auto objective = [&](double t) {
    double obj = 0.0;
    for (int i = 0; i < n; ++i) {
      const double e = (t - values[i]) / sigma[i];
      obj += std::min(e * e, c2);
    }
    return obj;
  };

  AxisEstimate best;
  double best_obj = std::numeric_limits<double>::infinity();
  bool found = false;
  std::vector<int> members;
  for (int g = 0; g + 1 < 2 * n; ++g) {
    const double lo = endpoints[g], hi = endpoints[g + 1];
    if (!(hi > lo)) continue;  // coincident endpoints, empty gap
    const double phi = 0.5 * (lo + hi);

    members.clear();
    double num = 0.0, den = 0.0;
    for (int i = 0; i < n; ++i) {
      const double e = (phi - values[i]) / sigma[i];
      if (e * e <= c2) {
        members.push_back(i);
        const double inv = 1.0 / (sigma[i] * sigma[i]);
        num += values[i] * inv;
        den += inv;
      }
    }
    if (members.empty()) continue;

    const double cand = num / den;
    const double obj = objective(cand);
    // Strictly-better test with a small margin keeps the leftmost candidate
    // on exact ties.
    if (!found || obj < best_obj - 1e-12) {
      found = true;
      best_obj = obj;
      best.t_hat = cand;
      best.inliers = members;
      best.objective = obj;
    }
  }
  if (!found) {
    // Cannot happen with positive sigma: every value's own window is non-empty.
    throw SpecError("cote_axis: no candidate emitted");
  }
  return best;
}

TranslationEstimate estimate_translation(const TranslationMeasurements& meas,
                                         double cbar) {
  if (meas.size() == 0) throw EmptyCorrespondences("estimate_translation: no measurements");
  TranslationEstimate est;
  std::vector<double> vals(meas.size());
  for (int axis = 0; axis < 3; ++axis) {
    for (std::size_t i = 0; i < meas.size(); ++i) vals[i] = meas.v[i](axis);
    est.axes[axis] = cote_axis(vals, meas.sigma, cbar);
    est.t(axis) = est.axes[axis].t_hat;
  }
  return est;
}

}  // namespace quatro
