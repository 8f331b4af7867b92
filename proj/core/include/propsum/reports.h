#ifndef PROPSUM_REPORTS_H_
#define PROPSUM_REPORTS_H_

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "propsum/corpus.h"
#include "propsum/pipeline.h"
#include "propsum/rouge.h"

namespace propsum {

struct AbstractivenessReport {
  // n -> percentage (0-100) of summary n-grams found in the source documents.
  std::map<int, double> ngram_overlap;
  // Percentage of summary sentences found verbatim in the documents.
  double sentence_overlap = 0.0;
  std::size_t summary_sentences = 0;
};

// Summary sentences are its non-blank lines, with any leading "- " bullet
// marker removed. n-grams are unstemmed tokens, counted with multiplicity
// and taken within a sentence on both sides. Sentence matching compares
// whitespace-normalized text against each whitespace-normalized document.
AbstractivenessReport abstractiveness_report(std::string_view summary, const Topic& topic);
nlohmann::json abstractiveness_to_json(const AbstractivenessReport& report);

struct EvidenceRow {
  std::string prop_id;
  std::string text;
  std::string doc_id;
  int sent_index = 0;
  std::vector<CharSpan> spans;
  double score = 0.0;
  bool is_source = false;
};

struct EvidenceEntry {
  std::string bullet_text;
  BulletMode mode = BulletMode::kFused;
  std::string cluster_id;
  int rank = 0;
  std::vector<EvidenceRow> evidence;
};

struct EvidenceReport {
  std::string topic_id;
  std::vector<EvidenceEntry> entries;
};

// One entry per summary bullet listing every member of its cluster.
// Throws DataError if a bullet's cluster is missing from the artifact.
EvidenceReport evidence_report(const RunArtifact& artifact);
nlohmann::json evidence_to_json(const EvidenceReport& report);

// "rouge1", "rouge2", "rougeSU4" of the bullets joined by spaces.
// Throws EmptyReferences.
std::map<std::string, RougeScore> evaluate_summary(std::string_view summary,
                                                   std::span<const std::string> references,
                                                   const RougeConfig& cfg);
std::map<std::string, RougeScore> evaluate_run(const RunArtifact& artifact,
                                               std::span<const std::string> references,
                                               const RougeConfig& cfg);
nlohmann::json scores_to_json(const std::map<std::string, RougeScore>& scores);

}  // namespace propsum

#endif  // PROPSUM_REPORTS_H_
