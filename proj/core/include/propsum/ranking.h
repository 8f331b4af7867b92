#ifndef PROPSUM_RANKING_H_
#define PROPSUM_RANKING_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "propsum/clustering.h"
#include "propsum/rouge.h"
#include "propsum/similarity.h"

namespace propsum {

enum class RankFeature { kNone, kAvgRouge, kAvgSimilarity, kAvgSalience, kMinPosition, kSize };

inline constexpr RankFeature kRankFeatures[] = {RankFeature::kAvgRouge, RankFeature::kAvgSimilarity,
                                                RankFeature::kAvgSalience,
                                                RankFeature::kMinPosition, RankFeature::kSize};

std::string_view rank_feature_name(RankFeature feature);
// Throws ConfigError for unknown names.
RankFeature parse_rank_feature(std::string_view name);

struct RankingConfig {
  RankFeature primary_feature = RankFeature::kSize;
  RankFeature secondary_feature = RankFeature::kMinPosition;
  int max_clusters = 10;
  // Avg. ROUGE as (R1 F1 + R2 F1) / 2 instead of R1 F1.
  bool avg_rouge_uses_r1_r2 = false;

  // Throws ConfigError.
  void validate() const;
};

// avg_rouge and avg_similarity average over unordered member pairs (0 for a
// singleton). min_position is the smallest sentence index of any member;
// min_position_span_start is the earliest span start among members at that
// sentence index.
ClusterFeatures compute_features(const Cluster& cluster, const SimilarityMatrix& matrix,
                                 const RougeConfig& cfg, bool avg_rouge_uses_r1_r2 = false);

// Sorts by primary then secondary feature (size descending, min_position
// ascending, score features descending), then max_salience descending, then
// cluster_id ascending; keeps the first max_clusters.
std::vector<Cluster> rank_clusters(std::vector<Cluster> clusters, const RankingConfig& cfg);

// Highest salience, ties to the smallest prop_id.
const ScoredProposition& select_cluster_representative(const Cluster& cluster);

}  // namespace propsum

#endif  // PROPSUM_RANKING_H_
