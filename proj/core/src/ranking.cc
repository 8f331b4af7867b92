#include "propsum/ranking.h"

#include <algorithm>
#include <limits>
#include <unordered_map>

#include "propsum/errors.h"

namespace propsum {
namespace {

// Negative when a ranks before b, positive when after, 0 on a tie.
int compare_feature(RankFeature feature, const ClusterFeatures& a, const ClusterFeatures& b) {
  auto descending = [](double x, double y) { return x > y ? -1 : (x < y ? 1 : 0); };
  switch (feature) {
    case RankFeature::kNone:
      return 0;
    case RankFeature::kSize:
      return a.size > b.size ? -1 : (a.size < b.size ? 1 : 0);
    case RankFeature::kMinPosition:
      if (a.min_position != b.min_position) return a.min_position < b.min_position ? -1 : 1;
      if (a.min_position_span_start != b.min_position_span_start) {
        return a.min_position_span_start < b.min_position_span_start ? -1 : 1;
      }
      return 0;
    case RankFeature::kAvgRouge:
      return descending(a.avg_rouge, b.avg_rouge);
    case RankFeature::kAvgSimilarity:
      return descending(a.avg_similarity, b.avg_similarity);
    case RankFeature::kAvgSalience:
      return descending(a.avg_salience, b.avg_salience);
  }
  return 0;
}

}  // namespace

std::string_view rank_feature_name(RankFeature feature) {
  switch (feature) {
    case RankFeature::kNone:
      return "none";
    case RankFeature::kAvgRouge:
      return "avg_rouge";
    case RankFeature::kAvgSimilarity:
      return "avg_similarity";
    case RankFeature::kAvgSalience:
      return "avg_salience";
    case RankFeature::kMinPosition:
      return "min_position";
    case RankFeature::kSize:
      return "size";
  }
  return "none";
}

RankFeature parse_rank_feature(std::string_view name) {
  for (RankFeature f : {RankFeature::kNone, RankFeature::kAvgRouge, RankFeature::kAvgSimilarity,
                        RankFeature::kAvgSalience, RankFeature::kMinPosition, RankFeature::kSize}) {
    if (rank_feature_name(f) == name) return f;
  }
  throw ConfigError("unknown ranking feature '" + std::string(name) + "'");
}

void RankingConfig::validate() const {
  if (primary_feature != RankFeature::kNone && primary_feature == secondary_feature) {
    throw ConfigError("ranking.primary_feature and secondary_feature must differ");
  }
  if (max_clusters < 1) throw ConfigError("ranking.max_clusters must be >= 1");
}

ClusterFeatures compute_features(const Cluster& cluster, const SimilarityMatrix& matrix,
                                 const RougeConfig& cfg, bool avg_rouge_uses_r1_r2) {
  ClusterFeatures f;
  const auto& members = cluster.members;
  f.size = members.size();
  if (members.empty()) return f;

  std::unordered_map<std::string, std::size_t> row;
  for (std::size_t i = 0; i < matrix.prop_ids.size(); ++i) row.emplace(matrix.prop_ids[i], i);

  f.min_position = std::numeric_limits<int>::max();
  f.min_position_span_start = std::numeric_limits<std::size_t>::max();
  double salience_sum = 0.0;
  f.max_salience = members.front().score;
  for (const ScoredProposition& m : members) {
    salience_sum += m.score;
    f.max_salience = std::max(f.max_salience, m.score);
    std::size_t start = m.proposition.spans.empty() ? 0 : m.proposition.spans.front().start;
    if (m.proposition.sent_index < f.min_position ||
        (m.proposition.sent_index == f.min_position && start < f.min_position_span_start)) {
      f.min_position = m.proposition.sent_index;
      f.min_position_span_start = start;
    }
  }
  f.avg_salience = salience_sum / static_cast<double>(members.size());

  if (members.size() < 2) return f;
  double rouge_sum = 0.0;
  double sim_sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < members.size(); ++i) {
    RougeScorer scorer(std::span<const std::string>(&members[i].proposition.text, 1), cfg);
    auto ri = row.find(members[i].proposition.prop_id);
    if (ri == row.end()) {
      throw DimensionMismatch("cluster member " + members[i].proposition.prop_id +
                              " missing from the similarity matrix");
    }
    for (std::size_t j = i + 1; j < members.size(); ++j) {
      auto rj = row.find(members[j].proposition.prop_id);
      if (rj == row.end()) {
        throw DimensionMismatch("cluster member " + members[j].proposition.prop_id +
                                " missing from the similarity matrix");
      }
      const std::string& text = members[j].proposition.text;
      double r = scorer.rouge_n(text, 1).f1;
      if (avg_rouge_uses_r1_r2) r = 0.5 * (r + scorer.rouge_n(text, 2).f1);
      rouge_sum += r;
      sim_sum += matrix.at(ri->second, rj->second);
      ++pairs;
    }
  }
  f.avg_rouge = rouge_sum / static_cast<double>(pairs);
  f.avg_similarity = sim_sum / static_cast<double>(pairs);
  return f;
}

std::vector<Cluster> rank_clusters(std::vector<Cluster> clusters, const RankingConfig& cfg) {
  std::sort(clusters.begin(), clusters.end(), [&](const Cluster& a, const Cluster& b) {
    if (int c = compare_feature(cfg.primary_feature, a.features, b.features)) return c < 0;
    if (int c = compare_feature(cfg.secondary_feature, a.features, b.features)) return c < 0;
    if (a.features.max_salience != b.features.max_salience) {
      return a.features.max_salience > b.features.max_salience;
    }
    return a.cluster_id < b.cluster_id;
  });
  if (clusters.size() > static_cast<std::size_t>(cfg.max_clusters)) {
    clusters.resize(static_cast<std::size_t>(cfg.max_clusters));
  }
  return clusters;
}

const ScoredProposition& select_cluster_representative(const Cluster& cluster) {
  if (cluster.members.empty()) throw EmptyInput("cluster " + cluster.cluster_id + " is empty");
  const ScoredProposition* best = &cluster.members.front();
  for (const ScoredProposition& m : cluster.members) {
    if (m.score > best->score ||
        (m.score == best->score && m.proposition.prop_id < best->proposition.prop_id)) {
      best = &m;
    }
  }
  return *best;
}

}  // namespace propsum
