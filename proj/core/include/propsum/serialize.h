#ifndef PROPSUM_SERIALIZE_H_
#define PROPSUM_SERIALIZE_H_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "propsum/clustering.h"
#include "propsum/fusion.h"
#include "propsum/pipeline.h"
#include "propsum/propositions.h"
#include "propsum/salience.h"
#include "propsum/similarity.h"

namespace propsum {

// Readers throw SchemaViolation on missing or mistyped fields.
nlohmann::json proposition_to_json(const Proposition& p);
Proposition proposition_from_json(const nlohmann::json& j);

nlohmann::json scored_to_json(const ScoredProposition& s);
ScoredProposition scored_from_json(const nlohmann::json& j);

nlohmann::json cluster_to_json(const Cluster& c);
Cluster cluster_from_json(const nlohmann::json& j);

nlohmann::json bullet_to_json(const SummaryBullet& b);
SummaryBullet bullet_from_json(const nlohmann::json& j);

nlohmann::json matrix_to_json(const SimilarityMatrix& m);
SimilarityMatrix matrix_from_json(const nlohmann::json& j);

// Everything except stage_timings.
nlohmann::json artifact_to_json(const RunArtifact& artifact);
RunArtifact artifact_from_json(const nlohmann::json& j);

// One record per proposition, in the given order.
std::vector<nlohmann::json> salience_label_records(const SalienceLabelSet& labels,
                                                   std::span<const Proposition> props);
// Each instance carries its serialized context window under "context".
std::vector<nlohmann::json> training_set_records(const Topic& topic,
                                                 std::span<const Proposition> props,
                                                 const BalancedTrainingSet& set,
                                                 int token_budget = kDefaultTokenBudget,
                                                 const ContextDelimiters& delimiters = {});
// The clusters.jsonl record: topic_id, cluster_id, member_prop_ids, features.
nlohmann::json cluster_dump_record(const std::string& topic_id, const Cluster& c);
nlohmann::json fusion_example_to_json(const FusionExample& e);

// Writes go to a temporary sibling first and are renamed into place.
void write_text_file(const std::filesystem::path& path, const std::string& content);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);
void write_jsonl_file(const std::filesystem::path& path, std::span<const nlohmann::json> records);
// Throws MissingFile or SchemaViolation (with the 1-based line number).
nlohmann::json read_json_file(const std::filesystem::path& path);
std::vector<nlohmann::json> read_jsonl_file(const std::filesystem::path& path);

std::filesystem::path run_directory(const std::filesystem::path& runs_root,
                                    const std::string& config_hash, const std::string& topic_id);

// Writes every stage dump, summary.txt, evidence.json, artifact.json and
// timings.json under runs_root/<config_hash>/<topic_id>/ and returns that
// directory.
std::filesystem::path write_run_dir(const std::filesystem::path& runs_root,
                                    const RunArtifact& artifact, const PipelineConfig& cfg);

}  // namespace propsum

#endif  // PROPSUM_SERIALIZE_H_
