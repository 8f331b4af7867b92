#include "propsum/clustering.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "propsum/errors.h"

namespace propsum {
namespace {

void check_matrix(const SimilarityMatrix& matrix) {
  const std::size_t n = matrix.size();
  if (matrix.values.size() != n * n) {
    throw DimensionMismatch("similarity matrix has " + std::to_string(matrix.values.size()) +
                            " values for " + std::to_string(n) + " ids");
  }
}

double lance_williams(Linkage linkage, double d_ki, double d_kj, double d_ij, double n_i,
                      double n_j, double n_k) {
  switch (linkage) {
    case Linkage::kWard:
      return ((n_i + n_k) * d_ki + (n_j + n_k) * d_kj - n_k * d_ij) / (n_i + n_j + n_k);
    case Linkage::kAverage:
      return (n_i * d_ki + n_j * d_kj) / (n_i + n_j);
    case Linkage::kComplete:
      return std::max(d_ki, d_kj);
  }
  return 0.0;
}

}  // namespace

void ClusteringConfig::validate() const {
  bool ok = std::isinf(distance_threshold) && distance_threshold > 0
                ? true
                : distance_threshold >= 0.0 && distance_threshold <= 1.0;
  if (!ok) throw ConfigError("clustering.distance_threshold must be in [0,1] or infinity");
  if (min_cluster_size < 1) throw ConfigError("clustering.min_cluster_size must be >= 1");
}

void sort_members(std::vector<ScoredProposition>& members) {
  std::sort(members.begin(), members.end(),
            [](const ScoredProposition& a, const ScoredProposition& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.proposition.prop_id < b.proposition.prop_id;
            });
}

std::vector<MergeStep> merge_trace(const SimilarityMatrix& matrix, const ClusteringConfig& cfg) {
  check_matrix(matrix);
  const std::size_t n = matrix.size();
  // Slot i holds the cluster whose smallest index is i while active.
  std::vector<double> dist(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) dist[i * n + j] = 1.0 - matrix.at(i, j);
  }
  std::vector<bool> active(n, true);
  std::vector<std::size_t> sizes(n, 1);

  std::vector<MergeStep> trace;
  for (std::size_t step = 0; step + 1 < n; ++step) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = n;
    std::size_t bj = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!active[j]) continue;
        double d = dist[i * n + j];
        if (d < best) {
          best = d;
          bi = i;
          bj = j;
        }
      }
    }
    if (bi == n || !(best < cfg.distance_threshold)) break;

    const double n_i = static_cast<double>(sizes[bi]);
    const double n_j = static_cast<double>(sizes[bj]);
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == bi || k == bj) continue;
      double updated = lance_williams(cfg.linkage, dist[k * n + bi], dist[k * n + bj], best, n_i,
                                      n_j, static_cast<double>(sizes[k]));
      dist[k * n + bi] = dist[bi * n + k] = updated;
    }
    active[bj] = false;
    sizes[bi] += sizes[bj];
    trace.push_back({bi, bj, best, sizes[bi]});
  }
  return trace;
}

std::vector<Cluster> cluster_propositions(const SimilarityMatrix& matrix,
                                          std::span<const ScoredProposition> props,
                                          const ClusteringConfig& cfg) {
  check_matrix(matrix);
  const std::size_t n = props.size();
  if (matrix.size() != n) {
    throw DimensionMismatch("matrix has " + std::to_string(matrix.size()) + " rows for " +
                            std::to_string(n) + " propositions");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (matrix.prop_ids[i] != props[i].proposition.prop_id) {
      throw DimensionMismatch("matrix row " + std::to_string(i) + " is " + matrix.prop_ids[i] +
                              ", expected " + props[i].proposition.prop_id);
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return props[a].proposition.prop_id < props[b].proposition.prop_id;
  });
  SimilarityMatrix canonical;
  canonical.backend_id = matrix.backend_id;
  canonical.values.resize(n * n);
  for (std::size_t i = 0; i < n; ++i) canonical.prop_ids.push_back(matrix.prop_ids[order[i]]);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) canonical.at(i, j) = matrix.at(order[i], order[j]);
  }

  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const MergeStep& m : merge_trace(canonical, cfg)) {
    std::size_t a = find(m.left);
    std::size_t b = find(m.right);
    parent[std::max(a, b)] = std::min(a, b);
  }

  std::map<std::size_t, std::vector<std::size_t>> groups;  // root -> canonical indices
  for (std::size_t i = 0; i < n; ++i) groups[find(i)].push_back(i);

  std::vector<Cluster> clusters;
  clusters.reserve(groups.size());
  for (const auto& [root, indices] : groups) {
    Cluster cluster;
    cluster.cluster_id = "c" + std::to_string(clusters.size());
    for (std::size_t c : indices) cluster.members.push_back(props[order[c]]);
    sort_members(cluster.members);
    cluster.features.size = cluster.members.size();
    clusters.push_back(std::move(cluster));
  }
  return clusters;
}

}  // namespace propsum
