#include "propsum/reports.h"

#include <sstream>
#include <unordered_set>

#include "propsum/errors.h"
#include "propsum/tokenizer.h"

namespace propsum {
namespace {

std::vector<std::string> summary_sentences(std::string_view summary) {
  std::vector<std::string> out;
  std::istringstream in{std::string(summary)};
  std::string line;
  while (std::getline(in, line)) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    line = line.substr(first);
    if (line.rfind("- ", 0) == 0) line = line.substr(2);
    out.push_back(line);
  }
  return out;
}

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::string normalize_whitespace(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (char c : text) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

std::string join_ngram(const std::vector<std::string>& tokens, std::size_t at, int n) {
  std::string key;
  for (int k = 0; k < n; ++k) {
    if (k > 0) key.push_back('\x1f');
    key += tokens[at + k];
  }
  return key;
}

void add_ngrams(const std::vector<std::string>& tokens, int n,
                std::unordered_set<std::string>& out) {
  if (tokens.size() < static_cast<std::size_t>(n)) return;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) out.insert(join_ngram(tokens, i, n));
}

nlohmann::json spans_to_json(const std::vector<CharSpan>& spans) {
  nlohmann::json out = nlohmann::json::array();
  for (const CharSpan& s : spans) out.push_back({s.start, s.end});
  return out;
}

}  // namespace

AbstractivenessReport abstractiveness_report(std::string_view summary, const Topic& topic) {
  constexpr int kMaxN = 3;
  std::unordered_set<std::string> source[kMaxN + 1];
  std::vector<std::string> documents;
  for (const Document& doc : topic.documents) {
    std::string joined;
    for (const Sentence& s : doc.sentences) {
      std::vector<std::string> tokens = tokenize(s.text);
      for (int n = 1; n <= kMaxN; ++n) add_ngrams(tokens, n, source[n]);
      if (!joined.empty()) joined.push_back(' ');
      joined += s.text;
    }
    documents.push_back(normalize_whitespace(joined));
  }

  AbstractivenessReport report;
  std::vector<std::string> sentences = summary_sentences(summary);
  report.summary_sentences = sentences.size();
  for (int n = 1; n <= kMaxN; ++n) {
    std::size_t total = 0, found = 0;
    for (const std::string& sentence : sentences) {
      std::vector<std::string> tokens = tokenize(sentence);
      if (tokens.size() < static_cast<std::size_t>(n)) continue;
      for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        ++total;
        found += source[n].count(join_ngram(tokens, i, n));
      }
    }
    report.ngram_overlap[n] = total == 0 ? 0.0 : 100.0 * static_cast<double>(found) / total;
  }

  std::size_t verbatim = 0;
  for (const std::string& sentence : sentences) {
    std::string needle = normalize_whitespace(sentence);
    if (needle.empty()) continue;
    for (const std::string& doc : documents) {
      if (doc.find(needle) != std::string::npos) {
        ++verbatim;
        break;
      }
    }
  }
  report.sentence_overlap =
      sentences.empty() ? 0.0 : 100.0 * static_cast<double>(verbatim) / sentences.size();
  return report;
}

nlohmann::json abstractiveness_to_json(const AbstractivenessReport& report) {
  nlohmann::json ngrams = nlohmann::json::object();
  for (const auto& [n, value] : report.ngram_overlap) ngrams[std::to_string(n)] = value;
  return {{"ngram_overlap", ngrams},
          {"sentence_overlap", report.sentence_overlap},
          {"summary_sentences", report.summary_sentences}};
}

EvidenceReport evidence_report(const RunArtifact& artifact) {
  EvidenceReport report;
  report.topic_id = artifact.topic_id;
  for (const SummaryBullet& bullet : artifact.bullets) {
    const Cluster* cluster = artifact.find_cluster(bullet.cluster_id);
    if (cluster == nullptr) {
      throw DataError("bullet " + std::to_string(bullet.rank) + " refers to unknown cluster '" +
                      bullet.cluster_id + "'");
    }
    EvidenceEntry entry;
    entry.bullet_text = bullet.text;
    entry.mode = bullet.mode;
    entry.cluster_id = bullet.cluster_id;
    entry.rank = bullet.rank;
    for (const ScoredProposition& m : cluster->members) {
      EvidenceRow row;
      row.prop_id = m.proposition.prop_id;
      row.text = m.proposition.text;
      row.doc_id = m.proposition.doc_id;
      row.sent_index = m.proposition.sent_index;
      row.spans = m.proposition.spans;
      row.score = m.score;
      row.is_source = !bullet.source_prop_id.empty() && bullet.source_prop_id == row.prop_id;
      entry.evidence.push_back(std::move(row));
    }
    report.entries.push_back(std::move(entry));
  }
  return report;
}

nlohmann::json evidence_to_json(const EvidenceReport& report) {
  nlohmann::json entries = nlohmann::json::array();
  for (const EvidenceEntry& e : report.entries) {
    nlohmann::json rows = nlohmann::json::array();
    for (const EvidenceRow& r : e.evidence) {
      rows.push_back({{"prop_id", r.prop_id},
                      {"text", r.text},
                      {"doc_id", r.doc_id},
                      {"sent_index", r.sent_index},
                      {"spans", spans_to_json(r.spans)},
                      {"score", r.score},
                      {"is_source", r.is_source}});
    }
    entries.push_back({{"bullet", e.bullet_text},
                       {"mode", std::string(bullet_mode_name(e.mode))},
                       {"cluster_id", e.cluster_id},
                       {"rank", e.rank},
                       {"evidence", rows}});
  }
  return {{"topic_id", report.topic_id}, {"entries", entries}};
}

std::map<std::string, RougeScore> evaluate_summary(std::string_view summary,
                                                   std::span<const std::string> references,
                                                   const RougeConfig& cfg) {
  RougeScorer scorer(references, cfg);
  return {{"rouge1", scorer.rouge_n(summary, 1)},
          {"rouge2", scorer.rouge_n(summary, 2)},
          {"rougeSU4", scorer.rouge_su(summary)}};
}

std::map<std::string, RougeScore> evaluate_run(const RunArtifact& artifact,
                                               std::span<const std::string> references,
                                               const RougeConfig& cfg) {
  return evaluate_summary(summary_plain_text(artifact.bullets), references, cfg);
}

nlohmann::json scores_to_json(const std::map<std::string, RougeScore>& scores) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [name, s] : scores) {
    out[name] = {{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}};
  }
  return out;
}

}  // namespace propsum
