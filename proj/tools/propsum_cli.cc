#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "propsum/backends.h"
#include "propsum/corpus.h"
#include "propsum/errors.h"
#include "propsum/fusion.h"
#include "propsum/oracles.h"
#include "propsum/pipeline.h"
#include "propsum/reports.h"
#include "propsum/salience.h"
#include "propsum/serialize.h"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace propsum;

namespace {

enum ExitCode { kOk = 0, kUnexpected = 1, kConfig = 2, kData = 3, kBackend = 4 };

struct CommonOptions {
  std::string corpus;
  std::string config_file;
  std::vector<std::string> overrides;
  std::vector<std::string> topics;
  int jobs = 1;
};

struct Context {
  PipelineConfig cfg;
  fs::path base_dir;
  BackendRegistry registry = BackendRegistry::with_defaults();
  std::vector<Topic> topics;
};

Context load_context(const CommonOptions& opts, bool need_corpus = true) {
  Context ctx;
  json doc = json::object();
  if (!opts.config_file.empty()) {
    std::ifstream in(opts.config_file);
    if (!in) throw ConfigError("cannot open config file " + opts.config_file);
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError("config file " + opts.config_file + " is not valid JSON: " + e.what());
    }
    ctx.base_dir = fs::absolute(opts.config_file).parent_path();
  } else {
    ctx.base_dir = fs::current_path();
  }
  for (const std::string& assignment : opts.overrides) apply_config_override(doc, assignment);
  ctx.cfg = config_from_json(doc);
  for (const auto& [role, id] : ctx.cfg.backends) {
    if (!ctx.registry.has(role, id)) {
      throw ConfigError("backend '" + id + "' is not registered for role " + role);
    }
  }

  if (need_corpus) {
    if (opts.corpus.empty()) throw ConfigError("--corpus is required");
    std::vector<Topic> all = load_corpus(opts.corpus);
    if (opts.topics.empty()) {
      ctx.topics = std::move(all);
    } else {
      for (const std::string& id : opts.topics) {
        auto it = std::find_if(all.begin(), all.end(),
                               [&](const Topic& t) { return t.topic_id == id; });
        if (it == all.end()) throw DataError("topic '" + id + "' not in corpus");
        ctx.topics.push_back(*it);
      }
    }
  }
  return ctx;
}

// Runs fn(i) for every topic index on up to `jobs` threads and rethrows the
// first failure (lowest index) once all workers are done.
template <typename F>
void for_each_topic(std::size_t count, int jobs, F&& fn) {
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  int threads = std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(count, 1)));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

json mean_scores(const std::vector<std::map<std::string, RougeScore>>& all) {
  std::map<std::string, RougeScore> sum;
  for (const auto& scores : all) {
    for (const auto& [name, s] : scores) {
      sum[name].precision += s.precision;
      sum[name].recall += s.recall;
      sum[name].f1 += s.f1;
    }
  }
  if (!all.empty()) {
    for (auto& [name, s] : sum) {
      s.precision /= all.size();
      s.recall /= all.size();
      s.f1 /= all.size();
    }
  }
  return scores_to_json(sum);
}

void emit(const json& report, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << report.dump(2) << "\n";
  } else {
    write_json_file(out_path, report);
    spdlog::info("wrote {}", out_path);
  }
}

std::string plain_text(const std::vector<Proposition>& units) {
  std::string out;
  for (const Proposition& u : units) {
    if (!out.empty()) out.push_back(' ');
    out += u.text;
  }
  return out;
}

json selection_json(const std::vector<Proposition>& units) {
  json out = json::array();
  for (const Proposition& u : units) out.push_back({{"prop_id", u.prop_id}, {"text", u.text}});
  return out;
}

std::vector<Proposition> extract_units(const Topic& topic, const Context& ctx, Unit unit) {
  PipelineConfig cfg = ctx.cfg;
  cfg.unit = unit;
  Backends backends = make_backends(cfg, ctx.registry, ctx.base_dir);
  return extract_propositions(topic, *backends.extraction);
}

std::vector<Proposition> run_oracle(const std::string& kind, const Topic& topic,
                                    const Context& ctx) {
  const std::vector<std::string> refs = topic.reference_texts();
  if (kind == "prop") return oracle_greedy_units(topic, extract_units(topic, ctx, Unit::kProposition), ctx.cfg.rouge);
  if (kind == "sent") return oracle_greedy_units(topic, extract_units(topic, ctx, Unit::kSentence), ctx.cfg.rouge);
  Backends backends = make_backends(ctx.cfg, ctx.registry, ctx.base_dir);
  RunArtifact artifact = run_pipeline(topic, ctx.cfg, backends);
  if (kind == "cluster-rep") return oracle_cluster_representatives(artifact.ranked, refs, ctx.cfg.rouge);
  return oracle_cluster_ranking(artifact.clusters, refs, ctx.cfg.rouge);
}

int cmd_run(const CommonOptions& opts, const std::string& out_root) {
  Context ctx = load_context(opts);
  Backends backends = make_backends(ctx.cfg, ctx.registry, ctx.base_dir);
  for_each_topic(ctx.topics.size(), opts.jobs, [&](std::size_t i) {
    RunArtifact artifact = run_pipeline(ctx.topics[i], ctx.cfg, backends);
    fs::path dir = write_run_dir(out_root, artifact, ctx.cfg);
    spdlog::info("{}: {} bullets -> {}", artifact.topic_id, artifact.bullets.size(), dir.string());
  });
  std::cout << (fs::path(out_root) / config_hash(ctx.cfg)).string() << "\n";
  return kOk;
}

int cmd_derive_salience(const CommonOptions& opts, const std::string& out_dir) {
  Context ctx = load_context(opts);
  Backends backends = make_backends(ctx.cfg, ctx.registry, ctx.base_dir);
  std::vector<std::vector<json>> labels(ctx.topics.size()), train(ctx.topics.size());
  for_each_topic(ctx.topics.size(), opts.jobs, [&](std::size_t i) {
    const Topic& topic = ctx.topics[i];
    std::vector<Proposition> props = extract_propositions(topic, *backends.extraction);
    SalienceLabelSet set = derive_salience_labels(topic, props, ctx.cfg.rouge);
    BalancedTrainingSet balanced = balance_training_set(set, ctx.cfg.seed);
    if (balanced.warning) spdlog::warn("{}: {}", topic.topic_id, balanced.warning_message);
    labels[i] = salience_label_records(set, props);
    train[i] = training_set_records(topic, props, balanced, ctx.cfg.token_budget);
    spdlog::info("{}: {} positives, {} negatives, {} kept negatives", topic.topic_id,
                 set.positives.size(), set.negatives.size(), balanced.kept_negatives);
  });
  std::vector<json> all_labels, all_train;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    all_labels.insert(all_labels.end(), labels[i].begin(), labels[i].end());
    all_train.insert(all_train.end(), train[i].begin(), train[i].end());
  }
  write_jsonl_file(fs::path(out_dir) / "salience_labels.jsonl", all_labels);
  write_jsonl_file(fs::path(out_dir) / "salience_train.jsonl", all_train);
  return kOk;
}

int cmd_derive_fusion(const CommonOptions& opts, const std::string& out_dir) {
  Context ctx = load_context(opts);
  Backends backends = make_backends(ctx.cfg, ctx.registry, ctx.base_dir);
  std::vector<std::vector<json>> per_topic(ctx.topics.size());
  for_each_topic(ctx.topics.size(), opts.jobs, [&](std::size_t i) {
    const Topic& topic = ctx.topics[i];
    RunArtifact artifact = run_pipeline(topic, ctx.cfg, backends);
    std::vector<Proposition> ref_props = extract_reference_propositions(topic, *backends.extraction);
    std::vector<std::string> warnings;
    auto examples = derive_fusion_targets(artifact.clusters, ref_props, *backends.similarity, &warnings);
    for (const std::string& w : warnings) spdlog::warn("{}: {}", topic.topic_id, w);
    for (FusionExample& e : examples) {
      e.topic_id = topic.topic_id;
      per_topic[i].push_back(fusion_example_to_json(e));
    }
  });
  std::vector<json> all;
  for (auto& records : per_topic) all.insert(all.end(), records.begin(), records.end());
  write_jsonl_file(fs::path(out_dir) / "fusion_train.jsonl", all);
  return kOk;
}

int cmd_oracle(const CommonOptions& opts, const std::string& kind, const std::string& out) {
  Context ctx = load_context(opts);
  std::vector<json> rows(ctx.topics.size());
  std::vector<std::map<std::string, RougeScore>> scores(ctx.topics.size());
  for_each_topic(ctx.topics.size(), opts.jobs, [&](std::size_t i) {
    const Topic& topic = ctx.topics[i];
    std::vector<Proposition> selected = run_oracle(kind, topic, ctx);
    scores[i] = evaluate_summary(plain_text(selected), topic.reference_texts(), ctx.cfg.rouge);
    rows[i] = {{"topic_id", topic.topic_id},
               {"selected", selection_json(selected)},
               {"scores", scores_to_json(scores[i])}};
  });
  emit({{"kind", kind}, {"topics", rows}, {"mean", mean_scores(scores)}}, out);
  return kOk;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFile(path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Bullet lines with the "- " marker removed, joined by spaces.
std::string summary_for_scoring(const std::string& summary) {
  std::istringstream in(summary);
  std::string line, out;
  while (std::getline(in, line)) {
    if (line.rfind("- ", 0) == 0) line = line.substr(2);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (!out.empty()) out.push_back(' ');
    out += line;
  }
  return out;
}

int cmd_eval(const CommonOptions& opts, const std::string& run_dir, const std::string& out) {
  Context ctx = load_context(opts);
  std::vector<json> rows(ctx.topics.size());
  std::vector<std::map<std::string, RougeScore>> scores(ctx.topics.size());
  std::map<std::string, double> abstractiveness;
  std::vector<AbstractivenessReport> reports(ctx.topics.size());
  for_each_topic(ctx.topics.size(), opts.jobs, [&](std::size_t i) {
    const Topic& topic = ctx.topics[i];
    std::string summary = read_text(fs::path(run_dir) / topic.topic_id / "summary.txt");
    scores[i] = evaluate_summary(summary_for_scoring(summary), topic.reference_texts(), ctx.cfg.rouge);
    reports[i] = abstractiveness_report(summary, topic);
    rows[i] = {{"topic_id", topic.topic_id},
               {"scores", scores_to_json(scores[i])},
               {"abstractiveness", abstractiveness_to_json(reports[i])}};
  });
  AbstractivenessReport mean;
  for (const AbstractivenessReport& r : reports) {
    for (const auto& [n, v] : r.ngram_overlap) mean.ngram_overlap[n] += v / reports.size();
    mean.sentence_overlap += r.sentence_overlap / reports.size();
    mean.summary_sentences += r.summary_sentences;
  }
  emit({{"topics", rows},
        {"mean", mean_scores(scores)},
        {"mean_abstractiveness", abstractiveness_to_json(mean)}},
       out);
  return kOk;
}

int cmd_ablate(const CommonOptions& opts, const std::string& out) {
  Context ctx = load_context(opts);
  std::vector<json> rows(ctx.topics.size());
  std::vector<std::map<std::string, std::map<std::string, RougeScore>>> per_topic(ctx.topics.size());
  for_each_topic(ctx.topics.size(), opts.jobs, [&](std::size_t i) {
    const Topic& topic = ctx.topics[i];
    json variants = json::object();
    for (AblationEntry& entry : run_ablation(topic, ctx.cfg, ctx.registry, ctx.base_dir)) {
      per_topic[i][entry.name] = entry.scores;
      variants[entry.name] = {{"summary", summary_text(entry.bullets)},
                              {"scores", scores_to_json(entry.scores)}};
    }
    for (const char* kind : {"sent", "prop", "cluster-rep", "ranking"}) {
      std::string name = std::string("oracle_") + kind;
      std::vector<Proposition> selected = run_oracle(kind, topic, ctx);
      per_topic[i][name] = evaluate_summary(plain_text(selected), topic.reference_texts(), ctx.cfg.rouge);
      variants[name] = {{"selected", selection_json(selected)},
                        {"scores", scores_to_json(per_topic[i][name])}};
    }
    rows[i] = {{"topic_id", topic.topic_id}, {"variants", variants}};
  });
  json mean = json::object();
  if (!per_topic.empty()) {
    for (const auto& [name, unused] : per_topic.front()) {
      std::vector<std::map<std::string, RougeScore>> column;
      for (auto& t : per_topic) column.push_back(t[name]);
      mean[name] = mean_scores(column);
    }
  }
  emit({{"topics", rows}, {"mean", mean}}, out);
  return kOk;
}

int cmd_report_evidence(const std::string& artifact_path, const std::string& out) {
  RunArtifact artifact = artifact_from_json(read_json_file(artifact_path));
  emit(evidence_to_json(evidence_report(artifact)), out);
  return kOk;
}

int cmd_tune(const CommonOptions& opts, const std::string& param, const std::string& out) {
  Context ctx = load_context(opts);
  Backends backends = make_backends(ctx.cfg, ctx.registry, ctx.base_dir);
  json grid = json::array();
  std::optional<double> best_value;
  double best_objective = 0.0;
  for (int step = 1; step <= 9; ++step) {
    double value = step / 10.0;
    PipelineConfig cfg = ctx.cfg;
    if (param == "tau") {
      cfg.salience_tau = value;
    } else {
      cfg.clustering.distance_threshold = value;
    }
    std::vector<std::map<std::string, RougeScore>> scores(ctx.topics.size());
    for_each_topic(ctx.topics.size(), opts.jobs, [&](std::size_t i) {
      RunArtifact artifact = run_pipeline(ctx.topics[i], cfg, backends);
      scores[i] = evaluate_run(artifact, ctx.topics[i].reference_texts(), cfg.rouge);
    });
    double objective = 0.0;
    for (auto& s : scores) objective += s["rouge1"].f1 + s["rouge2"].f1;
    if (!scores.empty()) objective /= scores.size();
    grid.push_back({{"value", value}, {"objective", objective}, {"mean", mean_scores(scores)}});
    if (!best_value || objective > best_objective + 1e-12) {
      best_value = value;
      best_objective = objective;
    }
  }
  emit({{"param", param}, {"grid", grid}, {"best", *best_value}, {"best_objective", best_objective}},
       out);
  return kOk;
}

int exit_code_for(StageError::Kind kind) {
  switch (kind) {
    case StageError::Kind::kConfig: return kConfig;
    case StageError::Kind::kData: return kData;
    case StageError::Kind::kBackend: return kBackend;
    default: return kUnexpected;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"propsum: proposition-level multi-document summarization"};
  app.require_subcommand(1);
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off");

  CommonOptions common;
  auto add_common = [&](CLI::App* sub, bool corpus = true) {
    if (corpus) {
      sub->add_option("--corpus", common.corpus, "topics.jsonl or a directory holding it")->required();
      sub->add_option("--topic", common.topics, "restrict to these topic ids");
      sub->add_option("-j,--jobs", common.jobs, "topics processed in parallel")->check(CLI::PositiveNumber);
    }
    sub->add_option("-c,--config", common.config_file, "JSON config file");
    sub->add_option("--set", common.overrides, "override a config key, e.g. rouge.max_words=100");
  };

  std::string out_root = "runs";
  auto* run = app.add_subcommand("run", "run the full pipeline and write run directories");
  add_common(run);
  run->add_option("-o,--out", out_root, "root of the runs/ tree");

  std::string out_dir = ".";
  auto* salience = app.add_subcommand("derive-salience-labels",
                                      "greedy salience labels and the balanced training set");
  add_common(salience);
  salience->add_option("-o,--out", out_dir, "output directory");

  auto* fusion = app.add_subcommand("derive-fusion-data", "cluster to reference-proposition pairs");
  add_common(fusion);
  fusion->add_option("-o,--out", out_dir, "output directory");

  std::string kind, out_file;
  auto* oracle = app.add_subcommand("oracle", "extractive upper bounds");
  add_common(oracle);
  oracle->add_option("--kind", kind)->required()->check(
      CLI::IsMember({"prop", "sent", "cluster-rep", "ranking"}));
  oracle->add_option("-o,--out", out_file, "write the report here instead of stdout");

  std::string run_dir;
  auto* eval = app.add_subcommand("eval", "ROUGE and abstractiveness of written summaries");
  add_common(eval);
  eval->add_option("--run-dir", run_dir, "runs/<config_hash> directory")->required();
  eval->add_option("-o,--out", out_file);

  auto* ablate = app.add_subcommand("ablate", "ablation ladder and oracles per topic");
  add_common(ablate);
  ablate->add_option("-o,--out", out_file);

  std::string artifact_path;
  auto* evidence = app.add_subcommand("report-evidence", "bullet to source-proposition report");
  evidence->add_option("--artifact", artifact_path, "artifact.json of a run")->required();
  evidence->add_option("-o,--out", out_file);

  std::string param;
  auto* tune = app.add_subcommand("tune", "grid search over 0.1..0.9 by mean ROUGE-1 + ROUGE-2 F1");
  add_common(tune);
  tune->add_option("--param", param)->required()->check(CLI::IsMember({"tau", "cluster-threshold"}));
  tune->add_option("-o,--out", out_file);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  auto logger = spdlog::stderr_color_mt("propsum");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (*run) return cmd_run(common, out_root);
    if (*salience) return cmd_derive_salience(common, out_dir);
    if (*fusion) return cmd_derive_fusion(common, out_dir);
    if (*oracle) return cmd_oracle(common, kind, out_file);
    if (*eval) return cmd_eval(common, run_dir, out_file);
    if (*ablate) return cmd_ablate(common, out_file);
    if (*evidence) return cmd_report_evidence(artifact_path, out_file);
    if (*tune) return cmd_tune(common, param, out_file);
  } catch (const StageError& e) {
    spdlog::error("{}", e.what());
    return exit_code_for(e.kind());
  } catch (const ConfigError& e) {
    spdlog::error("config error: {}", e.what());
    return kConfig;
  } catch (const DataError& e) {
    spdlog::error("data error: {}", e.what());
    return kData;
  } catch (const BackendError& e) {
    spdlog::error("backend error: {}", e.what());
    return kBackend;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kUnexpected;
  }
  return kUnexpected;
}
