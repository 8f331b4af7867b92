#ifndef PROPSUM_CLUSTERING_H_
#define PROPSUM_CLUSTERING_H_

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "propsum/salience.h"
#include "propsum/similarity.h"

namespace propsum {

enum class Linkage { kWard, kAverage, kComplete };

struct ClusteringConfig {
  Linkage linkage = Linkage::kWard;
  // On distance = 1 - similarity. Infinity merges everything.
  double distance_threshold = 0.5;
  int min_cluster_size = 1;

  // Throws ConfigError.
  void validate() const;
};

inline constexpr double kMergeAll = std::numeric_limits<double>::infinity();

struct ClusterFeatures {
  double avg_rouge = 0.0;
  double avg_similarity = 0.0;
  double avg_salience = 0.0;
  int min_position = 0;
  std::size_t min_position_span_start = 0;  // refines min_position ties
  std::size_t size = 0;
  double max_salience = 0.0;
};

struct Cluster {
  std::string cluster_id;
  std::vector<ScoredProposition> members;  // (score desc, prop_id asc)
  ClusterFeatures features;
};

struct MergeStep {
  std::size_t left = 0;   // smallest matrix index in the left cluster
  std::size_t right = 0;  // smallest matrix index in the right cluster
  double distance = 0.0;
  std::size_t size = 0;   // size of the merged cluster
};

// Agglomerative merges over distance = 1 - similarity, updated with the
// Lance-Williams recurrence (Ward applied directly to the distances).
// Merging continues while the closest pair is strictly below the threshold.
// Equal distances go to the smallest (left, right) index pair.
// Throws DimensionMismatch for a malformed matrix.
std::vector<MergeStep> merge_trace(const SimilarityMatrix& matrix, const ClusteringConfig& cfg);

// Runs merge_trace on the matrix reordered by prop_id, so the result does
// not depend on input order. Clusters are returned ordered by their
// smallest member prop_id and named c0, c1, ...
// Throws DimensionMismatch when the matrix and props disagree.
std::vector<Cluster> cluster_propositions(const SimilarityMatrix& matrix,
                                          std::span<const ScoredProposition> props,
                                          const ClusteringConfig& cfg);

// Orders members by (score desc, prop_id asc).
void sort_members(std::vector<ScoredProposition>& members);

}  // namespace propsum

#endif  // PROPSUM_CLUSTERING_H_
