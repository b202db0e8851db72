#include "quatro/pruning.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace quatro {

void CompatGraph::resize(int num_vertices) {
  n = num_vertices;
  rows.assign(n, std::vector<std::uint64_t>((n + 63) / 64, 0));
}

void CompatGraph::add_edge(int a, int b) {
  if (a == b) return;
  rows[a][b / 64] |= (1ull << (b % 64));
  rows[b][a / 64] |= (1ull << (a % 64));
}

bool CompatGraph::adjacent(int a, int b) const {
  return (rows[a][b / 64] >> (b % 64)) & 1ull;
}

int CompatGraph::degree(int v) const {
  int d = 0;
  for (auto word : rows[v]) d += std::popcount(word);
  return d;
}

namespace {

void check_indices(const PointCloud& src, const PointCloud& tgt,
                   const CorrespondenceSet& corr) {
  for (const auto& c : corr) {
    if (c.src < 0 || c.src >= static_cast<int>(src.size()) || c.tgt < 0 ||
        c.tgt >= static_cast<int>(tgt.size())) {
      throw IndexOutOfRange("correspondence (" + std::to_string(c.src) + ", " +
                            std::to_string(c.tgt) + ") out of range");
    }
  }
}

}  // namespace

TimSet build_tims_chain(const PointCloud& src, const PointCloud& tgt,
                        const CorrespondenceSet& corr) {
  if (corr.size() < 2)
    throw InsufficientCorrespondences("build_tims_chain: need >= 2 correspondences");
  check_indices(src, tgt, corr);

  const int k = static_cast<int>(corr.size());
  TimSet tims;
  tims.alphas.reserve(k);
  tims.betas.reserve(k);
  tims.sigmas.reserve(k);
  for (int a = 0; a < k; ++a) {
    const int b = (a + 1) % k;  // the closing measurement subtracts pair K from pair 1
    tims.alphas.push_back(src.points[corr[b].src] - src.points[corr[a].src]);
    tims.betas.push_back(tgt.points[corr[b].tgt] - tgt.points[corr[a].tgt]);
    tims.sigmas.push_back(corr[a].sigma + corr[b].sigma);
  }
  return tims;
}

CompatGraph build_compat_graph(const PointCloud& src, const PointCloud& tgt,
                               const CorrespondenceSet& corr, double scale) {
  check_indices(src, tgt, corr);
  CompatGraph g;
  g.resize(static_cast<int>(corr.size()));
  for (int a = 0; a < g.n; ++a) {
    for (int b = a + 1; b < g.n; ++b) {
      const double dp = (src.points[corr[a].src] - src.points[corr[b].src]).norm();
      const double dq = (tgt.points[corr[a].tgt] - tgt.points[corr[b].tgt]).norm();
      if (std::abs(dp - dq) <= scale * (corr[a].sigma + corr[b].sigma)) {
        g.add_edge(a, b);
      }
    }
  }
  return g;
}

namespace {

// Degeneracy ordering by repeated minimum-degree removal; returns vertices
// in removal order (low core first).
std::vector<int> degeneracy_order(const CompatGraph& g) {
  const int n = g.n;
  std::vector<int> deg(n);
  std::vector<bool> removed(n, false);
  for (int v = 0; v < n; ++v) deg[v] = g.degree(v);

  std::vector<int> order;
  order.reserve(n);
  for (int step = 0; step < n; ++step) {
    int best = -1;
    for (int v = 0; v < n; ++v) {
      if (removed[v]) continue;
      if (best < 0 || deg[v] < deg[best]) best = v;
    }
    removed[best] = true;
    order.push_back(best);
    for (int u = 0; u < n; ++u) {
      if (!removed[u] && g.adjacent(best, u)) --deg[u];
    }
  }
  return order;
}

std::vector<int> grow_clique(const CompatGraph& g, int seed) {
  std::vector<int> clique = {seed};
  std::vector<int> cand;
  for (int v = 0; v < g.n; ++v) {
    if (v != seed && g.adjacent(seed, v)) cand.push_back(v);
  }
  while (!cand.empty()) {
    // Extend by the candidate with the most connections into the candidate set.
    int best = -1, best_links = -1;
    for (int v : cand) {
      int links = 0;
      for (int u : cand) {
        if (u != v && g.adjacent(v, u)) ++links;
      }
      if (links > best_links) {
        best_links = links;
        best = v;
      }
    }
    clique.push_back(best);
    std::vector<int> next;
    for (int v : cand) {
      if (v != best && g.adjacent(best, v)) next.push_back(v);
    }
    cand = std::move(next);
  }
  std::sort(clique.begin(), clique.end());
  return clique;
}

}  // namespace

std::vector<int> mcis_heuristic(const CompatGraph& graph) {
  if (graph.n < 1) throw SpecError("mcis_heuristic: graph has no vertices");

  auto order = degeneracy_order(graph);
  std::reverse(order.begin(), order.end());  // highest core first

  const int num_seeds = std::min(graph.n, 16);
  std::vector<int> best;
  for (int s = 0; s < num_seeds; ++s) {
    auto clique = grow_clique(graph, order[s]);
    if (clique.size() > best.size()) best = std::move(clique);
  }
  return best;
}

PrunedSet filter_by_clique(const PointCloud& src, const PointCloud& tgt,
                           const CorrespondenceSet& corr, const std::vector<int>& clique) {
  PrunedSet out;
  std::vector<int> sorted = clique;
  std::sort(sorted.begin(), sorted.end());
  for (int v : sorted) {
    if (v < 0 || v >= static_cast<int>(corr.size()))
      throw IndexOutOfRange("filter_by_clique: clique vertex out of range");
    out.corr.push_back(corr[v]);
  }
  if (out.corr.size() >= 2) {
    out.tims = build_tims_chain(src, tgt, out.corr);
  }
  return out;
}

}  // namespace quatro
