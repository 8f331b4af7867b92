#include "propsum/serialize.h"

#include <fstream>
#include <sstream>

#include "propsum/errors.h"
#include "propsum/reports.h"

namespace propsum {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

template <typename T>
T field(const json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) throw SchemaViolation(0, name, "missing");
  try {
    return j.at(name).get<T>();
  } catch (const json::exception& e) {
    throw SchemaViolation(0, name, e.what());
  }
}

json spans_json(const std::vector<CharSpan>& spans) {
  json out = json::array();
  for (const CharSpan& s : spans) out.push_back({s.start, s.end});
  return out;
}

std::vector<CharSpan> spans_from(const json& j) {
  auto pairs = field<std::vector<std::vector<std::size_t>>>(j, "spans");
  std::vector<CharSpan> spans;
  for (const auto& p : pairs) {
    if (p.size() != 2) throw SchemaViolation(0, "spans", "each span must be [start, end]");
    spans.push_back({p[0], p[1]});
  }
  return spans;
}

json features_json(const ClusterFeatures& f) {
  return {{"avg_rouge", f.avg_rouge},
          {"avg_similarity", f.avg_similarity},
          {"avg_salience", f.avg_salience},
          {"min_position", f.min_position},
          {"min_position_span_start", f.min_position_span_start},
          {"size", f.size},
          {"max_salience", f.max_salience}};
}

ClusterFeatures features_from(const json& j) {
  ClusterFeatures f;
  f.avg_rouge = field<double>(j, "avg_rouge");
  f.avg_similarity = field<double>(j, "avg_similarity");
  f.avg_salience = field<double>(j, "avg_salience");
  f.min_position = field<int>(j, "min_position");
  f.min_position_span_start = field<std::size_t>(j, "min_position_span_start");
  f.size = field<std::size_t>(j, "size");
  f.max_salience = field<double>(j, "max_salience");
  return f;
}

template <typename T, typename F>
json array_of(const std::vector<T>& items, F&& convert) {
  json out = json::array();
  for (const T& item : items) out.push_back(convert(item));
  return out;
}

template <typename T, typename F>
std::vector<T> vector_from(const json& j, const char* name, F&& convert) {
  if (!j.contains(name) || !j.at(name).is_array()) {
    throw SchemaViolation(0, name, "expected an array");
  }
  std::vector<T> out;
  for (const json& item : j.at(name)) out.push_back(convert(item));
  return out;
}

}  // namespace

json proposition_to_json(const Proposition& p) {
  return {{"prop_id", p.prop_id},     {"topic_id", p.topic_id},
          {"doc_id", p.doc_id},       {"sent_index", p.sent_index},
          {"ordinal", p.ordinal},     {"spans", spans_json(p.spans)},
          {"text", p.text}};
}

Proposition proposition_from_json(const json& j) {
  Proposition p;
  p.prop_id = field<std::string>(j, "prop_id");
  p.topic_id = field<std::string>(j, "topic_id");
  p.doc_id = field<std::string>(j, "doc_id");
  p.sent_index = field<int>(j, "sent_index");
  p.ordinal = field<int>(j, "ordinal");
  p.spans = spans_from(j);
  p.text = field<std::string>(j, "text");
  return p;
}

json scored_to_json(const ScoredProposition& s) {
  json j = proposition_to_json(s.proposition);
  j["score"] = s.score;
  return j;
}

ScoredProposition scored_from_json(const json& j) {
  return {proposition_from_json(j), field<double>(j, "score")};
}

json cluster_to_json(const Cluster& c) {
  return {{"cluster_id", c.cluster_id},
          {"members", array_of(c.members, scored_to_json)},
          {"features", features_json(c.features)}};
}

Cluster cluster_from_json(const json& j) {
  Cluster c;
  c.cluster_id = field<std::string>(j, "cluster_id");
  c.members = vector_from<ScoredProposition>(j, "members", scored_from_json);
  if (!j.contains("features")) throw SchemaViolation(0, "features", "missing");
  c.features = features_from(j.at("features"));
  return c;
}

json bullet_to_json(const SummaryBullet& b) {
  return {{"text", b.text},
          {"mode", std::string(bullet_mode_name(b.mode))},
          {"cluster_id", b.cluster_id},
          {"rank", b.rank},
          {"word_count", b.word_count},
          {"source_prop_id", b.source_prop_id}};
}

SummaryBullet bullet_from_json(const json& j) {
  SummaryBullet b;
  b.text = field<std::string>(j, "text");
  std::string mode = field<std::string>(j, "mode");
  if (mode == "fused") {
    b.mode = BulletMode::kFused;
  } else if (mode == "extracted") {
    b.mode = BulletMode::kExtracted;
  } else {
    throw SchemaViolation(0, "mode", "expected \"fused\" or \"extracted\"");
  }
  b.cluster_id = field<std::string>(j, "cluster_id");
  b.rank = field<int>(j, "rank");
  b.word_count = field<std::size_t>(j, "word_count");
  b.source_prop_id = field<std::string>(j, "source_prop_id");
  return b;
}

json matrix_to_json(const SimilarityMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.size(); ++i) {
    json row = json::array();
    for (std::size_t k = 0; k < m.size(); ++k) row.push_back(m.at(i, k));
    rows.push_back(std::move(row));
  }
  return {{"backend_id", m.backend_id}, {"prop_ids", m.prop_ids}, {"values", rows}};
}

SimilarityMatrix matrix_from_json(const json& j) {
  SimilarityMatrix m;
  m.backend_id = field<std::string>(j, "backend_id");
  m.prop_ids = field<std::vector<std::string>>(j, "prop_ids");
  auto rows = field<std::vector<std::vector<double>>>(j, "values");
  if (rows.size() != m.size()) throw SchemaViolation(0, "values", "row count mismatch");
  for (const auto& row : rows) {
    if (row.size() != m.size()) throw SchemaViolation(0, "values", "column count mismatch");
    m.values.insert(m.values.end(), row.begin(), row.end());
  }
  return m;
}

json artifact_to_json(const RunArtifact& a) {
  return {{"topic_id", a.topic_id},
          {"config_hash", a.config_hash},
          {"propositions", array_of(a.propositions, proposition_to_json)},
          {"scored", array_of(a.scored, scored_to_json)},
          {"salient", array_of(a.salient, scored_to_json)},
          {"matrix", a.matrix ? matrix_to_json(*a.matrix) : json(nullptr)},
          {"clusters", array_of(a.clusters, cluster_to_json)},
          {"ranked", array_of(a.ranked, cluster_to_json)},
          {"candidates", array_of(a.candidates, bullet_to_json)},
          {"bullets", array_of(a.bullets, bullet_to_json)},
          {"warnings", a.warnings}};
}

RunArtifact artifact_from_json(const json& j) {
  RunArtifact a;
  a.topic_id = field<std::string>(j, "topic_id");
  a.config_hash = field<std::string>(j, "config_hash");
  a.propositions = vector_from<Proposition>(j, "propositions", proposition_from_json);
  a.scored = vector_from<ScoredProposition>(j, "scored", scored_from_json);
  a.salient = vector_from<ScoredProposition>(j, "salient", scored_from_json);
  if (j.contains("matrix") && !j.at("matrix").is_null()) a.matrix = matrix_from_json(j.at("matrix"));
  a.clusters = vector_from<Cluster>(j, "clusters", cluster_from_json);
  a.ranked = vector_from<Cluster>(j, "ranked", cluster_from_json);
  a.candidates = vector_from<SummaryBullet>(j, "candidates", bullet_from_json);
  a.bullets = vector_from<SummaryBullet>(j, "bullets", bullet_from_json);
  a.warnings = field<std::vector<std::string>>(j, "warnings");
  return a;
}

std::vector<json> salience_label_records(const SalienceLabelSet& labels,
                                         std::span<const Proposition> props) {
  std::map<std::string, int> greedy_rank;
  for (std::size_t i = 0; i < labels.selection_order.size(); ++i) {
    greedy_rank[labels.selection_order[i]] = static_cast<int>(i) + 1;
  }
  std::vector<json> out;
  for (const Proposition& p : props) {
    auto it = greedy_rank.find(p.prop_id);
    out.push_back({{"topic_id", labels.topic_id},
                   {"prop_id", p.prop_id},
                   {"text", p.text},
                   {"label", labels.positives.count(p.prop_id) ? 1 : 0},
                   {"greedy_rank", it == greedy_rank.end() ? json(nullptr) : json(it->second)}});
  }
  return out;
}

std::vector<json> training_set_records(const Topic& topic, std::span<const Proposition> props,
                                       const BalancedTrainingSet& set, int token_budget,
                                       const ContextDelimiters& delimiters) {
  std::map<std::string, const Proposition*> by_id;
  for (const Proposition& p : props) by_id[p.prop_id] = &p;
  std::map<std::string, std::string> contexts;
  std::vector<json> out;
  for (const LabeledInstance& inst : set.instances) {
    auto it = by_id.find(inst.prop_id);
    if (it == by_id.end()) throw DataError("training instance for unknown proposition " + inst.prop_id);
    auto [ctx, inserted] = contexts.try_emplace(inst.prop_id);
    if (inserted) {
      ctx->second = serialize_context_window(
          build_context_window(*it->second, topic, token_budget), delimiters);
    }
    out.push_back({{"topic_id", topic.topic_id},
                   {"prop_id", inst.prop_id},
                   {"label", inst.label},
                   {"context", ctx->second}});
  }
  return out;
}

json cluster_dump_record(const std::string& topic_id, const Cluster& c) {
  std::vector<std::string> ids;
  for (const ScoredProposition& m : c.members) ids.push_back(m.proposition.prop_id);
  return {{"topic_id", topic_id},
          {"cluster_id", c.cluster_id},
          {"member_prop_ids", ids},
          {"features", features_json(c.features)}};
}

json fusion_example_to_json(const FusionExample& e) {
  return {{"topic_id", e.topic_id},
          {"cluster_id", e.cluster_id},
          {"input", serialize_fusion_input(e.input_props)},
          {"input_props", e.input_props},
          {"target", e.target_text},
          {"target_prop_id", e.target_prop_id}};
}

void write_text_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw DataError("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

void write_json_file(const fs::path& path, const json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

void write_jsonl_file(const fs::path& path, std::span<const json> records) {
  std::string content;
  for (const json& r : records) content += r.dump() + "\n";
  write_text_file(path, content);
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFile(path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaViolation(1, "<document>", std::string(path.string()) + ": " + e.what());
  }
}

std::vector<json> read_jsonl_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFile(path.string());
  std::vector<json> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::parse_error& e) {
      throw SchemaViolation(number, "<record>", path.string() + ": " + e.what());
    }
  }
  return out;
}

fs::path run_directory(const fs::path& runs_root, const std::string& config_hash,
                       const std::string& topic_id) {
  return runs_root / config_hash / topic_id;
}

fs::path write_run_dir(const fs::path& runs_root, const RunArtifact& a, const PipelineConfig& cfg) {
  fs::path dir = run_directory(runs_root, a.config_hash, a.topic_id);
  fs::create_directories(dir);

  write_json_file(dir / "config.json", config_to_json(cfg));

  std::vector<json> records;
  for (const Proposition& p : a.propositions) records.push_back(proposition_to_json(p));
  write_jsonl_file(dir / "propositions.jsonl", records);

  records.clear();
  for (const ScoredProposition& s : a.scored) records.push_back(scored_to_json(s));
  write_jsonl_file(dir / "salience.jsonl", records);

  records.clear();
  for (const ScoredProposition& s : a.salient) records.push_back(scored_to_json(s));
  write_jsonl_file(dir / "salient.jsonl", records);

  write_json_file(dir / "simmatrix.json", a.matrix ? matrix_to_json(*a.matrix) : json(nullptr));
  records.clear();
  for (const Cluster& c : a.clusters) records.push_back(cluster_dump_record(a.topic_id, c));
  write_jsonl_file(dir / "clusters.jsonl", records);

  records.clear();
  for (std::size_t r = 0; r < a.ranked.size(); ++r) {
    records.push_back({{"rank", r + 1},
                       {"cluster_id", a.ranked[r].cluster_id},
                       {"features", features_json(a.ranked[r].features)}});
  }
  write_jsonl_file(dir / "ranking.jsonl", records);

  records.clear();
  for (const SummaryBullet& b : a.candidates) records.push_back(bullet_to_json(b));
  write_jsonl_file(dir / "candidates.jsonl", records);

  write_text_file(dir / "summary.txt", summary_text(a.bullets));
  write_json_file(dir / "evidence.json", evidence_to_json(evidence_report(a)));
  write_json_file(dir / "artifact.json", artifact_to_json(a));
  write_json_file(dir / "timings.json", json(a.stage_timings));
  return dir;
}

}  // namespace propsum
