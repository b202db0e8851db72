#pragma once

#include <cstdint>
#include <vector>

#include "quatro/features.hpp"
#include "quatro/geometry.hpp"

namespace quatro {

/// Translation-invariant measurements built in chain form: K measurements
/// for K correspondences, the last one closing the chain back to the first
/// pair.
struct TimSet {
  std::vector<Eigen::Vector3d> alphas;  // source-side differences
  std::vector<Eigen::Vector3d> betas;   // target-side differences
  std::vector<double> sigmas;           // per-measurement noise bound (sum of pair bounds)

  std::size_t size() const { return alphas.size(); }
  bool empty() const { return alphas.empty(); }
};

/// Pairwise length-consistency graph over correspondences. One vertex per
/// correspondence; symmetric, no self loops. Adjacency stored as packed
/// bit rows.
struct CompatGraph {
  int n = 0;
  std::vector<std::vector<std::uint64_t>> rows;

  void resize(int num_vertices);
  void add_edge(int a, int b);
  bool adjacent(int a, int b) const;
  int degree(int v) const;
};

TimSet build_tims_chain(const PointCloud& src, const PointCloud& tgt,
                        const CorrespondenceSet& corr);

/// Edge (a, b) present iff | ||p_a - p_b|| - ||q_a - q_b|| | <= scale * (sigma_a + sigma_b).
CompatGraph build_compat_graph(const PointCloud& src, const PointCloud& tgt,
                               const CorrespondenceSet& corr, double scale = 1.0);

/// Greedy maximal clique: vertices ranked by degeneracy order, grown from
/// several top seeds by best-connected-neighbor extension. Always returns a
/// non-empty maximal clique (a lone vertex counts). Ties break toward the
/// lowest vertex index.
std::vector<int> mcis_heuristic(const CompatGraph& graph);

struct PrunedSet {
  CorrespondenceSet corr;
  TimSet tims;  // rebuilt in chain form over the survivors; empty for a singleton clique
};

PrunedSet filter_by_clique(const PointCloud& src, const PointCloud& tgt,
                           const CorrespondenceSet& corr, const std::vector<int>& clique);

}  // namespace quatro
