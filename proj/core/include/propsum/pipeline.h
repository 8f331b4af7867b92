#ifndef PROPSUM_PIPELINE_H_
#define PROPSUM_PIPELINE_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "propsum/backends.h"
#include "propsum/clustering.h"
#include "propsum/corpus.h"
#include "propsum/fusion.h"
#include "propsum/ranking.h"
#include "propsum/rouge.h"
#include "propsum/salience.h"
#include "propsum/similarity.h"

namespace propsum {

enum class Unit { kProposition, kSentence };
enum class SummaryMode { kAbstractive, kExtractive };

struct PipelineConfig {
  Unit unit = Unit::kProposition;
  SummaryMode mode = SummaryMode::kAbstractive;
  double salience_tau = 0.5;
  ClusteringConfig clustering;
  RankingConfig ranking;
  RougeConfig rouge;
  std::map<std::string, std::string> backends = {{"extraction", "passthrough"},
                                                 {"salience", "lexical"},
                                                 {"similarity", "lexical"},
                                                 {"generator", "echo"}};
  nlohmann::json backend_options = nlohmann::json::object();
  std::uint64_t seed = 0;
  int token_budget = kDefaultTokenBudget;

  // Throws ConfigError.
  void validate() const;
};

// Field names mirror PipelineConfig. Missing keys keep their defaults;
// unknown keys are a ConfigError.
PipelineConfig config_from_json(const nlohmann::json& document);
nlohmann::json config_to_json(const PipelineConfig& cfg);
// First 16 hex digits of the SHA-256 of the canonical config JSON.
std::string config_hash(const PipelineConfig& cfg);

// Sets a dotted key ("rouge.max_words") in a config document. The value is
// parsed as JSON when possible, otherwise taken as a string.
void apply_config_override(nlohmann::json& document, const std::string& assignment);

// Backends for the config; unit = sentence forces the passthrough extractor.
Backends make_backends(const PipelineConfig& cfg, const BackendRegistry& registry,
                       const std::filesystem::path& base_dir);

struct AssemblyResult {
  std::vector<SummaryBullet> bullets;
  bool warning = false;
  std::string warning_message;
};

// Appends whole bullets while the running word total stays <= limit; the
// first bullet that would overflow ends assembly.
AssemblyResult assemble_summary(const std::vector<SummaryBullet>& bullets_in_rank_order,
                                int limit);

// One "- " prefixed line per bullet.
std::string summary_text(const std::vector<SummaryBullet>& bullets);
// Bullet texts joined by single spaces, as scored by ROUGE.
std::string summary_plain_text(const std::vector<SummaryBullet>& bullets);

struct RunArtifact {
  std::string topic_id;
  std::string config_hash;
  std::vector<Proposition> propositions;
  std::vector<ScoredProposition> scored;
  std::vector<ScoredProposition> salient;
  std::optional<SimilarityMatrix> matrix;
  std::vector<Cluster> clusters;  // every cluster, features filled
  std::vector<Cluster> ranked;    // top max_clusters, rank order
  std::vector<SummaryBullet> candidates;  // one per ranked cluster
  std::vector<SummaryBullet> bullets;     // assembled summary
  std::vector<std::string> warnings;
  // Wall-clock seconds per stage. Not part of the persisted artifact, which
  // must be byte-identical across runs.
  std::map<std::string, double> stage_timings;

  const Cluster* find_cluster(const std::string& cluster_id) const;
};

// extraction -> salience -> threshold -> similarity -> clustering -> ranking
// -> fusion (or extraction of representatives) -> assembly. Stage failures
// are rethrown as StageError. A failing generator degrades that cluster to
// its highest-salience member, recorded in warnings.
RunArtifact run_pipeline(const Topic& topic, const PipelineConfig& cfg, const Backends& backends);

struct AblationEntry {
  std::string name;
  std::vector<SummaryBullet> bullets;
  std::map<std::string, RougeScore> scores;
};

// Salience_sent, Salience_prop, Salience_prop + Clustering and the full
// abstractive pipeline for one topic.
std::vector<AblationEntry> run_ablation(const Topic& topic, const PipelineConfig& cfg,
                                        const BackendRegistry& registry,
                                        const std::filesystem::path& base_dir);

// Highest-scoring units in (score desc, prop_id asc) order, assembled under
// the word limit.
std::vector<SummaryBullet> salience_only_summary(const std::vector<ScoredProposition>& scored,
                                                 int limit);

}  // namespace propsum

#endif  // PROPSUM_PIPELINE_H_
