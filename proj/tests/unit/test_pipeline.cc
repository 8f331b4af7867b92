#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "propsum/errors.h"
#include "propsum/oracles.h"
#include "propsum/pipeline.h"
#include "propsum/reports.h"
#include "propsum/serialize.h"
#include "synthetic.h"
#include "test_support.h"

using namespace propsum;
using doctest::Approx;
using testsupport::make_prop;
using testsupport::make_scored;

namespace {

SummaryBullet bullet_of(std::size_t words, std::string id = "c") {
  SummaryBullet b;
  for (std::size_t i = 0; i < words; ++i) b.text += (i ? " w" : "w") + std::to_string(i);
  b.word_count = words;
  b.cluster_id = std::move(id);
  return b;
}

Backends default_backends(const PipelineConfig& cfg) {
  return make_backends(cfg, BackendRegistry::with_defaults(), std::filesystem::current_path());
}

class ThrowingGenerator : public GeneratorBackend {
 public:
  std::string backend_id() const override { return "throwing"; }
  std::string generate(const std::string&) const override { throw std::runtime_error("model offline"); }
};

class ThrowingExtractor : public ExtractionBackend {
 public:
  std::string backend_id() const override { return "throwing"; }
  std::vector<SpanTuple> extract(const SentenceContext&) const override {
    throw BackendFailure("extractor crashed");
  }
};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("config defaults round-trip through JSON") {
  PipelineConfig cfg;
  auto j = config_to_json(cfg);
  auto back = config_from_json(j);
  CHECK(config_to_json(back) == j);
  CHECK(config_hash(back) == config_hash(cfg));
  CHECK(config_hash(cfg).size() == 16);
  CHECK(cfg.rouge.max_words == 100);
  CHECK(cfg.ranking.max_clusters == 10);
  CHECK(cfg.salience_tau == 0.5);
}

TEST_CASE("config parsing") {
  auto cfg = config_from_json(nlohmann::json::parse(R"({
      "mode": "extractive", "salience_tau": 0.3,
      "clustering": {"linkage": "average", "distance_threshold": "inf"},
      "ranking": {"primary_feature": "avg_rouge", "secondary_feature": null},
      "rouge": {"multi_ref": "max"}, "seed": 7})"));
  CHECK(cfg.mode == SummaryMode::kExtractive);
  CHECK(cfg.salience_tau == 0.3);
  CHECK(cfg.clustering.linkage == Linkage::kAverage);
  CHECK(std::isinf(cfg.clustering.distance_threshold));
  CHECK(cfg.ranking.primary_feature == RankFeature::kAvgRouge);
  CHECK(cfg.ranking.secondary_feature == RankFeature::kNone);
  CHECK(cfg.seed == 7);
  CHECK(config_from_json(config_to_json(cfg)).clustering.distance_threshold == cfg.clustering.distance_threshold);

  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"bogus": 1})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"rouge": {"bogus": 1}})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"salience_tau": "high"})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"salience_tau": 1.5})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"unit": "paragraph"})")), ConfigError);
}

TEST_CASE("config hash tracks content") {
  PipelineConfig a, b;
  b.salience_tau = 0.6;
  CHECK(config_hash(a) != config_hash(b));
  b.salience_tau = 0.5;
  CHECK(config_hash(a) == config_hash(b));
}

TEST_CASE("dotted overrides") {
  nlohmann::json doc = nlohmann::json::object();
  apply_config_override(doc, "rouge.max_words=50");
  apply_config_override(doc, "mode=extractive");
  apply_config_override(doc, "clustering.linkage=\"complete\"");
  auto cfg = config_from_json(doc);
  CHECK(cfg.rouge.max_words == 50);
  CHECK(cfg.mode == SummaryMode::kExtractive);
  CHECK(cfg.clustering.linkage == Linkage::kComplete);
  CHECK_THROWS_AS(apply_config_override(doc, "no_equals_sign"), ConfigError);
}

TEST_CASE("assembly keeps whole bullets under the limit") {
  auto r = assemble_summary({bullet_of(40), bullet_of(35), bullet_of(30)}, 100);
  CHECK(r.bullets.size() == 2);
  CHECK_FALSE(r.warning);

  auto big = assemble_summary({bullet_of(120), bullet_of(5)}, 100);
  CHECK(big.bullets.empty());
  CHECK(big.warning);
  CHECK(big.warning_message.find("120") != std::string::npos);

  CHECK(assemble_summary({bullet_of(100)}, 100).bullets.size() == 1);
  CHECK(assemble_summary({}, 100).bullets.empty());
  CHECK_FALSE(assemble_summary({}, 100).warning);
}

TEST_CASE("property: assembly is the longest prefix within the limit") {
  std::mt19937 rng(61);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<SummaryBullet> bullets;
    for (std::size_t i = 0, n = rng() % 8; i < n; ++i) bullets.push_back(bullet_of(1 + rng() % 40));
    int limit = static_cast<int>(rng() % 120);
    auto r = assemble_summary(bullets, limit);
    std::size_t total = 0, k = 0;
    while (k < bullets.size() && total + bullets[k].word_count <= static_cast<std::size_t>(limit)) {
      total += bullets[k++].word_count;
    }
    CHECK(r.bullets.size() == k);
    std::size_t got = 0;
    for (const auto& b : r.bullets) got += b.word_count;
    CHECK(got <= static_cast<std::size_t>(limit));
  }
}

TEST_CASE("summary text formats") {
  std::vector<SummaryBullet> b{bullet_of(2), bullet_of(1)};
  CHECK(summary_text(b) == "- w0 w1\n- w0\n");
  CHECK(summary_plain_text(b) == "w0 w1 w0");
  CHECK(summary_text({}).empty());
}

TEST_CASE("a fact repeated in four documents leads the summary") {
  PipelineConfig cfg;
  auto topic = testsupport::repeated_fact_topic();
  auto artifact = run_pipeline(topic, cfg, default_backends(cfg));
  REQUIRE_FALSE(artifact.bullets.empty());
  CHECK(artifact.bullets[0].text == "Rescuers pulled three hikers from the collapsed mine shaft.");
  CHECK(artifact.bullets[0].rank == 1);
  REQUIRE_FALSE(artifact.ranked.empty());
  CHECK(artifact.ranked[0].members.size() == 4);
  CHECK(artifact.stage_timings.count("clustering") == 1);
}

TEST_CASE("an unreachable salience threshold gives an empty summary and a warning") {
  PipelineConfig cfg;
  cfg.salience_tau = 1.0;
  auto artifact = run_pipeline(testsupport::repeated_fact_topic(), cfg, default_backends(cfg));
  CHECK(artifact.bullets.empty());
  REQUIRE(artifact.warnings.size() == 1);
  CHECK(artifact.warnings[0].find("salience threshold") != std::string::npos);
}

TEST_CASE("sentence units match whole sentences") {
  PipelineConfig cfg;
  cfg.unit = Unit::kSentence;
  auto topic = testsupport::repeated_fact_topic();
  auto artifact = run_pipeline(topic, cfg, default_backends(cfg));
  CHECK(artifact.propositions.size() == topic.sentence_count());
  for (const auto& p : artifact.propositions) {
    CHECK(p.text == topic.find_document(p.doc_id)->sentences[p.sent_index].text);
  }
}

TEST_CASE("stage failures carry the stage name") {
  PipelineConfig cfg;
  auto backends = default_backends(cfg);
  backends.extraction = std::make_shared<ThrowingExtractor>();
  try {
    run_pipeline(testsupport::repeated_fact_topic(), cfg, backends);
    FAIL("expected a StageError");
  } catch (const StageError& e) {
    CHECK(e.stage() == "extraction");
    CHECK(e.topic_id() == "repeated");
    CHECK(e.kind() == StageError::Kind::kBackend);
  }
}

TEST_CASE("a failing generator degrades to the representative member") {
  PipelineConfig cfg;
  auto backends = default_backends(cfg);
  backends.generator = std::make_shared<ThrowingGenerator>();
  auto artifact = run_pipeline(testsupport::repeated_fact_topic(), cfg, backends);
  REQUIRE_FALSE(artifact.bullets.empty());
  CHECK(artifact.bullets[0].mode == BulletMode::kExtracted);
  CHECK(artifact.bullets[0].text == "Rescuers pulled three hikers from the collapsed mine shaft.");
  CHECK_FALSE(artifact.warnings.empty());
}

TEST_CASE("proposition oracle") {
  RougeConfig cfg;
  auto single = testsupport::make_topic("t", {{"d0", {"the cat sat"}, {}}}, {"the cat sat"});
  std::vector<Proposition> one{make_prop("the cat sat")};
  CHECK(oracle_greedy_units(single, one, cfg).size() == 1);
  CHECK_THROWS_AS(oracle_greedy_units(single, {}, cfg), NoUnits);

  auto planted = testsupport::make_topic("t", {{"d0", {"x"}, {}}},
                                         {"red apples fell . blue rivers flow . green grass grows"});
  std::vector<Proposition> units{make_prop("red apples fell", "d0", 0), make_prop("stock prices rose", "d0", 1),
                                 make_prop("blue rivers flow", "d0", 2), make_prop("cold winds blew", "d0", 3),
                                 make_prop("green grass grows", "d0", 4)};
  std::set<std::string> picked;
  for (const auto& p : oracle_greedy_units(planted, units, cfg)) picked.insert(p.text);
  CHECK(picked == std::set<std::string>{"red apples fell", "blue rivers flow", "green grass grows"});
}

TEST_CASE("proposition oracle is at least the sentence oracle") {
  RougeConfig cfg;
  auto topic = testsupport::make_topic(
      "t", {{"d0", {"the army seized the capital and the president fled abroad"}, {}}},
      {"the president fled abroad"});
  std::vector<Proposition> sentences{make_prop(topic.documents[0].sentences[0].text)};
  std::vector<Proposition> props{make_prop("the army seized the capital", "d0", 0, 0),
                                 make_prop("the president fled abroad", "d0", 0, 1)};
  auto refs = topic.reference_texts();
  auto score = [&](const std::vector<Proposition>& sel) {
    std::vector<std::string> texts;
    for (const auto& p : sel) texts.push_back(p.text);
    return testsupport::brute_objective(texts, refs);
  };
  CHECK(score(oracle_greedy_units(topic, props, cfg)) >= score(oracle_greedy_units(topic, sentences, cfg)));
}

TEST_CASE("cluster representative oracle") {
  RougeConfig cfg;
  std::vector<std::string> refs{"the cat sat"};
  Cluster useful;
  useful.cluster_id = "c0";
  useful.members = {make_scored("dogs bark", 0.9, "d0"), make_scored("the cat sat", 0.1, "d1")};
  Cluster useless;
  useless.cluster_id = "c1";
  useless.members = {make_scored("rain fell", 0.5, "d2")};
  std::vector<Cluster> ranked{useful, useless};
  auto reps = oracle_cluster_representatives(ranked, refs, cfg);
  REQUIRE(reps.size() == 2);  // zero-gain clusters still contribute
  CHECK(reps[0].text == "the cat sat");
  CHECK(reps[1].text == "rain fell");

  RougeConfig tight;
  tight.max_words = 3;
  CHECK(oracle_cluster_representatives(ranked, refs, tight).size() == 1);
  CHECK(oracle_cluster_representatives({}, refs, cfg).empty());
}

TEST_CASE("cluster ranking oracle selects only helpful representatives") {
  RougeConfig cfg;
  std::vector<std::string> refs{"the cat sat on the mat"};
  Cluster a, b, c;
  a.cluster_id = "c0";
  a.members = {make_scored("the cat sat", 0.9, "d0"), make_scored("dogs bark", 0.1, "d1")};
  b.cluster_id = "c1";
  b.members = {make_scored("rain fell", 0.8, "d2")};
  c.cluster_id = "c2";
  c.members = {make_scored("on the mat", 0.7, "d3")};
  std::vector<Cluster> clusters{a, b, c};
  std::set<std::string> picked;
  for (const auto& p : oracle_cluster_ranking(clusters, refs, cfg)) picked.insert(p.text);
  CHECK(picked == std::set<std::string>{"the cat sat", "on the mat"});
  CHECK(oracle_cluster_ranking({}, refs, cfg).empty());
}

TEST_CASE("abstractiveness of copied and disjoint summaries") {
  auto topic = testsupport::make_topic(
      "t", {{"d0", {"The storm flooded the old harbor.", "Ferries were cancelled."}, {}}}, {"x"});
  auto copy = abstractiveness_report("- The storm flooded the old harbor.\n- Ferries were cancelled.\n", topic);
  for (int n = 1; n <= 3; ++n) CHECK(copy.ngram_overlap.at(n) == Approx(100.0));
  CHECK(copy.sentence_overlap == Approx(100.0));
  CHECK(copy.summary_sentences == 2);

  auto disjoint = abstractiveness_report("- Quantum widgets sparkle brightly.\n", topic);
  for (int n = 1; n <= 3; ++n) CHECK(disjoint.ngram_overlap.at(n) == 0.0);
  CHECK(disjoint.sentence_overlap == 0.0);

  auto half = abstractiveness_report("storm flooded pink elephants", topic);
  CHECK(half.ngram_overlap.at(1) == Approx(50.0));
  CHECK(half.ngram_overlap.at(2) == Approx(100.0 / 3));

  auto j = abstractiveness_to_json(copy);
  CHECK(j["ngram_overlap"]["1"] == 100.0);
}

TEST_CASE("evidence lists every cluster member") {
  PipelineConfig cfg;
  auto artifact = run_pipeline(testsupport::repeated_fact_topic(), cfg, default_backends(cfg));
  auto report = evidence_report(artifact);
  REQUIRE(report.entries.size() == artifact.bullets.size());
  CHECK(report.entries[0].evidence.size() == 4);
  for (const auto& row : report.entries[0].evidence) {
    CHECK(row.text == "Rescuers pulled three hikers from the collapsed mine shaft.");
  }
  auto j = evidence_to_json(report);
  CHECK(j["entries"][0]["evidence"].size() == 4);

  PipelineConfig extractive = cfg;
  extractive.mode = SummaryMode::kExtractive;
  auto ext = run_pipeline(testsupport::repeated_fact_topic(), extractive, default_backends(extractive));
  auto ext_report = evidence_report(ext);
  std::size_t sources = 0;
  for (const auto& row : ext_report.entries[0].evidence) sources += row.is_source ? 1 : 0;
  CHECK(sources == 1);

  PipelineConfig unreachable = cfg;
  unreachable.salience_tau = 1.0;
  auto empty = run_pipeline(testsupport::repeated_fact_topic(), unreachable, default_backends(unreachable));
  CHECK(evidence_report(empty).entries.empty());

  RunArtifact broken = artifact;
  broken.clusters.clear();
  CHECK_THROWS_AS(evidence_report(broken), DataError);
}

TEST_CASE("evaluation of a run") {
  RougeConfig cfg;
  std::vector<std::string> refs{"the cat sat"};
  auto same = evaluate_summary("the cat sat", refs, cfg);
  CHECK(same.at("rouge1").f1 == Approx(1.0));
  CHECK(same.at("rouge2").f1 == Approx(1.0));
  CHECK(same.at("rougeSU4").f1 == Approx(1.0));
  RunArtifact empty;
  CHECK(evaluate_run(empty, refs, cfg).at("rouge1").f1 == 0.0);
  CHECK_THROWS_AS(evaluate_summary("x", {}, cfg), EmptyReferences);
  CHECK(scores_to_json(same)["rouge1"]["f1"] == 1.0);
}

TEST_CASE("artifact JSON round-trip") {
  PipelineConfig cfg;
  auto artifact = run_pipeline(testsupport::repeated_fact_topic(), cfg, default_backends(cfg));
  auto j = artifact_to_json(artifact);
  CHECK(artifact_to_json(artifact_from_json(j)) == j);
  CHECK_FALSE(j.contains("stage_timings"));
}

TEST_CASE("run directories are written deterministically") {
  PipelineConfig cfg;
  auto root = testsupport::fresh_dir("rundir");
  auto topic = testsupport::repeated_fact_topic();
  auto dir = write_run_dir(root / "a", run_pipeline(topic, cfg, default_backends(cfg)), cfg);
  auto again = write_run_dir(root / "b", run_pipeline(topic, cfg, default_backends(cfg)), cfg);
  CHECK(dir == run_directory(root / "a", config_hash(cfg), "repeated"));
  for (const char* name : {"config.json", "propositions.jsonl", "salience.jsonl", "simmatrix.json",
                           "clusters.jsonl", "ranking.jsonl", "summary.txt", "evidence.json",
                           "artifact.json"}) {
    INFO(name);
    REQUIRE(std::filesystem::exists(dir / name));
    CHECK(slurp(dir / name) == slurp(again / name));
  }
  CHECK(std::filesystem::exists(dir / "timings.json"));
  auto clusters = read_jsonl_file(dir / "clusters.jsonl");
  REQUIRE_FALSE(clusters.empty());
  CHECK(clusters[0].contains("member_prop_ids"));
}

TEST_CASE("ablation ladder") {
  PipelineConfig cfg;
  auto ladder = run_ablation(testsupport::repeated_fact_topic(), cfg, BackendRegistry::with_defaults(),
                             std::filesystem::current_path());
  REQUIRE(ladder.size() == 4);
  CHECK(ladder[0].name == "salience_sent");
  CHECK(ladder[1].name == "salience_prop");
  CHECK(ladder[2].name == "salience_prop_clustering");
  CHECK(ladder[3].name == "full_abstractive");
  for (const auto& entry : ladder) {
    CHECK(entry.scores.count("rouge1") == 1);
    std::size_t words = 0;
    for (const auto& b : entry.bullets) words += b.word_count;
    CHECK(words <= 100);
  }
}
