#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "propsum/clustering.h"
#include "propsum/greedy.h"
#include "propsum/pipeline.h"
#include "propsum/rouge.h"
#include "propsum/similarity.h"
#include "synthetic.h"
#include "test_support.h"

using namespace propsum;

namespace {

std::string random_text(std::mt19937& rng, std::size_t words) {
  std::string s;
  for (std::size_t i = 0; i < words; ++i) s += (i ? " w" : "w") + std::to_string(rng() % 300);
  return s;
}

std::vector<ScoredProposition> random_props(std::size_t n) {
  std::mt19937 rng(9);
  std::vector<ScoredProposition> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(testsupport::make_scored(random_text(rng, 6 + rng() % 10), 0.5, "d" + std::to_string(i)));
  }
  return out;
}

void BM_RougeSU4(benchmark::State& state) {
  std::mt19937 rng(1);
  std::vector<std::string> refs{random_text(rng, 250), random_text(rng, 250), random_text(rng, 250),
                                random_text(rng, 250)};
  RougeScorer scorer(refs, RougeConfig{});
  std::string cand = random_text(rng, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(scorer.rouge_su(cand));
}
BENCHMARK(BM_RougeSU4)->Arg(50)->Arg(100);

void BM_GreedyOracle(benchmark::State& state) {
  std::mt19937 rng(2);
  std::vector<std::string> refs{random_text(rng, 100), random_text(rng, 100)};
  std::vector<std::string> cands;
  for (int i = 0; i < state.range(0); ++i) cands.push_back(random_text(rng, 8 + rng() % 12));
  RougeScorer scorer(refs, RougeConfig{});
  for (auto _ : state) benchmark::DoNotOptimize(greedy_select(cands, scorer, 100));
}
BENCHMARK(BM_GreedyOracle)->Arg(50)->Arg(200);

void BM_LexicalSimilarity(benchmark::State& state) {
  auto props = random_props(static_cast<std::size_t>(state.range(0)));
  LexicalSimilarityBackend backend;
  for (auto _ : state) benchmark::DoNotOptimize(pairwise_similarity(props, backend, std::nullopt));
}
BENCHMARK(BM_LexicalSimilarity)->Arg(50)->Arg(200);

void BM_WardClustering(benchmark::State& state) {
  auto props = random_props(static_cast<std::size_t>(state.range(0)));
  auto matrix = pairwise_similarity(props, LexicalSimilarityBackend{}, std::nullopt);
  for (auto _ : state) benchmark::DoNotOptimize(cluster_propositions(matrix, props, {}));
}
BENCHMARK(BM_WardClustering)->Arg(50)->Arg(200)->Arg(500);

void BM_PipelinePlantedTopic(benchmark::State& state) {
  auto topic = testsupport::planted_topic().topic;
  PipelineConfig cfg;
  cfg.salience_tau = 0.0;
  auto backends = make_backends(cfg, BackendRegistry::with_defaults(), ".");
  for (auto _ : state) benchmark::DoNotOptimize(run_pipeline(topic, cfg, backends));
}
BENCHMARK(BM_PipelinePlantedTopic);

}  // namespace
BENCHMARK_MAIN();
