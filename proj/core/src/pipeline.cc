#include "propsum/pipeline.h"

#include <chrono>
#include <cmath>
#include <limits>

#include <spdlog/spdlog.h>

#include "propsum/errors.h"
#include "propsum/hashing.h"
#include "propsum/reports.h"

namespace propsum {
namespace {

using nlohmann::json;

template <typename Enum>
struct EnumName {
  Enum value;
  const char* name;
};

constexpr EnumName<Unit> kUnits[] = {{Unit::kProposition, "proposition"},
                                     {Unit::kSentence, "sentence"}};
constexpr EnumName<SummaryMode> kModes[] = {{SummaryMode::kAbstractive, "abstractive"},
                                            {SummaryMode::kExtractive, "extractive"}};
constexpr EnumName<Linkage> kLinkages[] = {
    {Linkage::kWard, "ward"}, {Linkage::kAverage, "average"}, {Linkage::kComplete, "complete"}};
constexpr EnumName<MultiRefMode> kMultiRef[] = {{MultiRefMode::kAverage, "average"},
                                                {MultiRefMode::kMax, "max"}};

template <typename Enum, std::size_t N>
Enum parse_enum(const json& value, const EnumName<Enum> (&names)[N], const std::string& key) {
  if (!value.is_string()) throw ConfigError(key + " must be a string");
  std::string s = value.get<std::string>();
  for (const auto& entry : names) {
    if (s == entry.name) return entry.value;
  }
  throw ConfigError("invalid value '" + s + "' for " + key);
}

template <typename Enum, std::size_t N>
const char* enum_name(Enum value, const EnumName<Enum> (&names)[N]) {
  for (const auto& entry : names) {
    if (entry.value == value) return entry.name;
  }
  return "";
}

void check_keys(const json& object, std::initializer_list<const char*> allowed,
                const std::string& where) {
  if (!object.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : object.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError("unknown config key '" + where + key + "'");
  }
}

template <typename T>
T get(const json& object, const char* key, T fallback, const std::string& where) {
  if (!object.contains(key)) return fallback;
  try {
    return object.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + where + key + "' has the wrong type");
  }
}

double parse_threshold(const json& value) {
  if (value.is_string()) {
    std::string s = value.get<std::string>();
    if (s == "inf" || s == "infinity") return kMergeAll;
    throw ConfigError("clustering.distance_threshold must be a number or \"inf\"");
  }
  if (!value.is_number()) throw ConfigError("clustering.distance_threshold must be a number");
  return value.get<double>();
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

StageError::Kind kind_of(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return StageError::Kind::kConfig;
  if (dynamic_cast<const DataError*>(&e)) return StageError::Kind::kData;
  if (dynamic_cast<const BackendError*>(&e)) return StageError::Kind::kBackend;
  if (auto* s = dynamic_cast<const StageError*>(&e)) return s->kind();
  return StageError::Kind::kOther;
}

template <typename F>
auto run_stage(const char* stage, const std::string& topic_id,
               std::map<std::string, double>& timings, F&& body) {
  auto start = std::chrono::steady_clock::now();
  try {
    if constexpr (std::is_void_v<decltype(body())>) {
      body();
      timings[stage] = seconds_since(start);
    } else {
      auto result = body();
      timings[stage] = seconds_since(start);
      return result;
    }
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(kind_of(e), stage, topic_id, e.what());
  }
}

}  // namespace

void PipelineConfig::validate() const {
  if (!(salience_tau >= 0.0 && salience_tau <= 1.0)) {
    throw ConfigError("salience_tau must be in [0,1]");
  }
  if (token_budget <= 0) throw ConfigError("token_budget must be > 0");
  clustering.validate();
  ranking.validate();
  rouge.validate();
  for (const char* role : {"extraction", "salience", "similarity", "generator"}) {
    if (!backends.count(role)) throw ConfigError(std::string("backends.") + role + " is not set");
  }
}

PipelineConfig config_from_json(const json& doc) {
  PipelineConfig cfg;
  check_keys(doc,
             {"unit", "mode", "salience_tau", "clustering", "ranking", "rouge", "backends",
              "backend_options", "seed", "token_budget"},
             "");
  if (doc.contains("unit")) cfg.unit = parse_enum(doc.at("unit"), kUnits, "unit");
  if (doc.contains("mode")) cfg.mode = parse_enum(doc.at("mode"), kModes, "mode");
  cfg.salience_tau = get(doc, "salience_tau", cfg.salience_tau, "");
  cfg.seed = get(doc, "seed", cfg.seed, "");
  cfg.token_budget = get(doc, "token_budget", cfg.token_budget, "");

  if (doc.contains("clustering")) {
    const json& c = doc.at("clustering");
    check_keys(c, {"linkage", "distance_threshold", "min_cluster_size"}, "clustering.");
    if (c.contains("linkage")) {
      cfg.clustering.linkage = parse_enum(c.at("linkage"), kLinkages, "clustering.linkage");
    }
    if (c.contains("distance_threshold")) {
      cfg.clustering.distance_threshold = parse_threshold(c.at("distance_threshold"));
    }
    cfg.clustering.min_cluster_size =
        get(c, "min_cluster_size", cfg.clustering.min_cluster_size, "clustering.");
  }
  if (doc.contains("ranking")) {
    const json& r = doc.at("ranking");
    check_keys(r, {"primary_feature", "secondary_feature", "max_clusters", "avg_rouge_uses_r1_r2"},
               "ranking.");
    if (r.contains("primary_feature")) {
      cfg.ranking.primary_feature =
          parse_rank_feature(get<std::string>(r, "primary_feature", "", "ranking."));
    }
    if (r.contains("secondary_feature")) {
      cfg.ranking.secondary_feature =
          r.at("secondary_feature").is_null()
              ? RankFeature::kNone
              : parse_rank_feature(get<std::string>(r, "secondary_feature", "", "ranking."));
    }
    cfg.ranking.max_clusters = get(r, "max_clusters", cfg.ranking.max_clusters, "ranking.");
    cfg.ranking.avg_rouge_uses_r1_r2 =
        get(r, "avg_rouge_uses_r1_r2", cfg.ranking.avg_rouge_uses_r1_r2, "ranking.");
  }
  if (doc.contains("rouge")) {
    const json& r = doc.at("rouge");
    check_keys(r,
               {"max_words", "stem", "remove_stopwords", "multi_ref", "skip_distance",
                "include_unigrams_in_su"},
               "rouge.");
    cfg.rouge.max_words = get(r, "max_words", cfg.rouge.max_words, "rouge.");
    cfg.rouge.stem = get(r, "stem", cfg.rouge.stem, "rouge.");
    cfg.rouge.remove_stopwords = get(r, "remove_stopwords", cfg.rouge.remove_stopwords, "rouge.");
    if (r.contains("multi_ref")) {
      cfg.rouge.multi_ref = parse_enum(r.at("multi_ref"), kMultiRef, "rouge.multi_ref");
    }
    cfg.rouge.skip_distance = get(r, "skip_distance", cfg.rouge.skip_distance, "rouge.");
    cfg.rouge.include_unigrams_in_su =
        get(r, "include_unigrams_in_su", cfg.rouge.include_unigrams_in_su, "rouge.");
  }
  if (doc.contains("backends")) {
    const json& b = doc.at("backends");
    check_keys(b, {"extraction", "salience", "similarity", "generator"}, "backends.");
    for (const auto& [role, id] : b.items()) {
      if (!id.is_string()) throw ConfigError("backends." + role + " must be a string");
      cfg.backends[role] = id.get<std::string>();
    }
  }
  if (doc.contains("backend_options")) {
    if (!doc.at("backend_options").is_object()) {
      throw ConfigError("backend_options must be an object");
    }
    cfg.backend_options = doc.at("backend_options");
  }
  cfg.validate();
  return cfg;
}

json config_to_json(const PipelineConfig& cfg) {
  json threshold = std::isinf(cfg.clustering.distance_threshold)
                       ? json("inf")
                       : json(cfg.clustering.distance_threshold);
  return {
      {"unit", enum_name(cfg.unit, kUnits)},
      {"mode", enum_name(cfg.mode, kModes)},
      {"salience_tau", cfg.salience_tau},
      {"clustering",
       {{"linkage", enum_name(cfg.clustering.linkage, kLinkages)},
        {"distance_threshold", threshold},
        {"min_cluster_size", cfg.clustering.min_cluster_size}}},
      {"ranking",
       {{"primary_feature", rank_feature_name(cfg.ranking.primary_feature)},
        {"secondary_feature", rank_feature_name(cfg.ranking.secondary_feature)},
        {"max_clusters", cfg.ranking.max_clusters},
        {"avg_rouge_uses_r1_r2", cfg.ranking.avg_rouge_uses_r1_r2}}},
      {"rouge",
       {{"max_words", cfg.rouge.max_words},
        {"stem", cfg.rouge.stem},
        {"remove_stopwords", cfg.rouge.remove_stopwords},
        {"multi_ref", enum_name(cfg.rouge.multi_ref, kMultiRef)},
        {"skip_distance", cfg.rouge.skip_distance},
        {"include_unigrams_in_su", cfg.rouge.include_unigrams_in_su}}},
      {"backends", cfg.backends},
      {"backend_options", cfg.backend_options},
      {"seed", cfg.seed},
      {"token_budget", cfg.token_budget},
  };
}

std::string config_hash(const PipelineConfig& cfg) {
  return sha256_hex(config_to_json(cfg).dump()).substr(0, 16);
}

void apply_config_override(json& document, const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + assignment + "' must look like key=value");
  }
  std::string key = assignment.substr(0, eq);
  std::string raw = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;
  }
  json* node = &document;
  std::size_t pos = 0;
  while (true) {
    std::size_t dot = key.find('.', pos);
    std::string part = key.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
    if (part.empty()) throw ConfigError("override key '" + key + "' is malformed");
    if (!node->is_object()) *node = json::object();
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    pos = dot + 1;
  }
}

Backends make_backends(const PipelineConfig& cfg, const BackendRegistry& registry,
                       const std::filesystem::path& base_dir) {
  auto ids = cfg.backends;
  if (cfg.unit == Unit::kSentence) ids["extraction"] = "passthrough";
  return registry.create(ids, cfg.backend_options, base_dir);
}

AssemblyResult assemble_summary(const std::vector<SummaryBullet>& bullets_in_rank_order,
                                int limit) {
  AssemblyResult result;
  std::size_t total = 0;
  for (const SummaryBullet& bullet : bullets_in_rank_order) {
    if (total + bullet.word_count > static_cast<std::size_t>(std::max(limit, 0))) break;
    total += bullet.word_count;
    result.bullets.push_back(bullet);
  }
  if (result.bullets.empty() && !bullets_in_rank_order.empty()) {
    result.warning = true;
    result.warning_message = "first bullet (" + std::to_string(bullets_in_rank_order.front().word_count) +
                             " words) exceeds the " + std::to_string(limit) +
                             "-word limit; summary is empty";
  }
  return result;
}

std::string summary_text(const std::vector<SummaryBullet>& bullets) {
  std::string out;
  for (const SummaryBullet& b : bullets) out += "- " + b.text + "\n";
  return out;
}

std::string summary_plain_text(const std::vector<SummaryBullet>& bullets) {
  std::string out;
  for (std::size_t i = 0; i < bullets.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out += bullets[i].text;
  }
  return out;
}

const Cluster* RunArtifact::find_cluster(const std::string& cluster_id) const {
  for (const Cluster& c : clusters) {
    if (c.cluster_id == cluster_id) return &c;
  }
  return nullptr;
}

RunArtifact run_pipeline(const Topic& topic, const PipelineConfig& cfg, const Backends& backends) {
  RunArtifact artifact;
  artifact.topic_id = topic.topic_id;
  artifact.config_hash = config_hash(cfg);
  auto& timings = artifact.stage_timings;
  auto warn = [&](std::string message) {
    spdlog::warn("[{}] {}", topic.topic_id, message);
    artifact.warnings.push_back(std::move(message));
  };

  artifact.propositions = run_stage("extraction", topic.topic_id, timings, [&] {
    return extract_propositions(topic, *backends.extraction);
  });
  artifact.scored = run_stage("salience", topic.topic_id, timings, [&] {
    return score_propositions(artifact.propositions, topic, *backends.salience, cfg.token_budget);
  });
  artifact.salient = run_stage("filter", topic.topic_id, timings, [&] {
    return filter_by_threshold(artifact.scored, cfg.salience_tau);
  });
  if (artifact.salient.empty()) {
    warn("no proposition reached salience threshold " + std::to_string(cfg.salience_tau) +
         "; summary is empty");
    return artifact;
  }

  artifact.matrix = run_stage("similarity", topic.topic_id, timings, [&] {
    return pairwise_similarity(artifact.salient, *backends.similarity, backends.similarity_cache);
  });
  artifact.clusters = run_stage("clustering", topic.topic_id, timings, [&] {
    return cluster_propositions(*artifact.matrix, artifact.salient, cfg.clustering);
  });

  artifact.ranked = run_stage("ranking", topic.topic_id, timings, [&] {
    for (Cluster& c : artifact.clusters) {
      c.features = compute_features(c, *artifact.matrix, cfg.rouge, cfg.ranking.avg_rouge_uses_r1_r2);
    }
    std::vector<Cluster> eligible;
    for (const Cluster& c : artifact.clusters) {
      if (c.members.size() >= static_cast<std::size_t>(cfg.clustering.min_cluster_size)) {
        eligible.push_back(c);
      }
    }
    return rank_clusters(std::move(eligible), cfg.ranking);
  });

  artifact.candidates = run_stage("fusion", topic.topic_id, timings, [&] {
    std::vector<SummaryBullet> bullets;
    for (std::size_t r = 0; r < artifact.ranked.size(); ++r) {
      const Cluster& cluster = artifact.ranked[r];
      int rank = static_cast<int>(r) + 1;
      try {
        SummaryBullet fused = fuse_cluster(cluster, rank, *backends.generator);
        if (cfg.mode == SummaryMode::kAbstractive) {
          bullets.push_back(std::move(fused));
        } else {
          bullets.push_back(
              select_extractive_representative(cluster, rank, fused.text, cfg.rouge.stem));
        }
      } catch (const BackendError& e) {
        warn("generator failed on cluster " + cluster.cluster_id +
             "; using its highest-salience proposition: " + e.what());
        bullets.push_back(representative_bullet(cluster, rank));
      }
    }
    return bullets;
  });

  run_stage("assembly", topic.topic_id, timings, [&] {
    AssemblyResult assembled = assemble_summary(artifact.candidates, cfg.rouge.max_words);
    if (assembled.warning) warn(assembled.warning_message);
    artifact.bullets = std::move(assembled.bullets);
  });
  return artifact;
}

std::vector<SummaryBullet> salience_only_summary(const std::vector<ScoredProposition>& scored,
                                                 int limit) {
  std::vector<ScoredProposition> ordered = scored;
  sort_members(ordered);
  std::vector<SummaryBullet> bullets;
  int rank = 1;
  for (const ScoredProposition& s : ordered) {
    SummaryBullet b;
    b.text = s.proposition.text;
    b.mode = BulletMode::kExtracted;
    b.rank = rank++;
    b.word_count = word_count(b.text);
    b.source_prop_id = s.proposition.prop_id;
    bullets.push_back(std::move(b));
  }
  return assemble_summary(bullets, limit).bullets;
}

std::vector<AblationEntry> run_ablation(const Topic& topic, const PipelineConfig& cfg,
                                        const BackendRegistry& registry,
                                        const std::filesystem::path& base_dir) {
  const std::vector<std::string> references = topic.reference_texts();
  std::vector<AblationEntry> ladder;
  auto add = [&](std::string name, std::vector<SummaryBullet> bullets) {
    AblationEntry entry;
    entry.name = std::move(name);
    entry.scores = evaluate_summary(summary_plain_text(bullets), references, cfg.rouge);
    entry.bullets = std::move(bullets);
    ladder.push_back(std::move(entry));
  };

  PipelineConfig sentence_cfg = cfg;
  sentence_cfg.unit = Unit::kSentence;
  Backends sentence_backends = make_backends(sentence_cfg, registry, base_dir);
  auto sentences = score_propositions(extract_propositions(topic, *sentence_backends.extraction),
                                      topic, *sentence_backends.salience, cfg.token_budget);
  add("salience_sent", salience_only_summary(sentences, cfg.rouge.max_words));

  PipelineConfig prop_cfg = cfg;
  prop_cfg.unit = Unit::kProposition;
  Backends prop_backends = make_backends(prop_cfg, registry, base_dir);
  RunArtifact full = run_pipeline(topic, prop_cfg, prop_backends);
  add("salience_prop", salience_only_summary(full.scored, cfg.rouge.max_words));

  std::vector<SummaryBullet> reps;
  for (std::size_t r = 0; r < full.ranked.size(); ++r) {
    reps.push_back(representative_bullet(full.ranked[r], static_cast<int>(r) + 1));
  }
  add("salience_prop_clustering", assemble_summary(reps, cfg.rouge.max_words).bullets);

  PipelineConfig abstractive_cfg = prop_cfg;
  abstractive_cfg.mode = SummaryMode::kAbstractive;
  if (cfg.mode == SummaryMode::kAbstractive) {
    add("full_abstractive", full.bullets);
  } else {
    add("full_abstractive", run_pipeline(topic, abstractive_cfg, prop_backends).bullets);
  }
  return ladder;
}

}  // namespace propsum
