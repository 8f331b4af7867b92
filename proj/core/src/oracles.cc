#include "propsum/oracles.h"

#include "propsum/errors.h"
#include "propsum/greedy.h"
#include "propsum/ranking.h"

namespace propsum {

std::vector<Proposition> oracle_greedy_units(const Topic& topic,
                                             std::span<const Proposition> units,
                                             const RougeConfig& cfg) {
  if (units.empty()) throw NoUnits();
  std::vector<std::string> texts;
  texts.reserve(units.size());
  for (const Proposition& u : units) texts.push_back(u.text);
  RougeScorer scorer(topic.reference_texts(), cfg);
  GreedyResult result = greedy_select(texts, scorer, cfg.max_words);
  std::vector<Proposition> selected;
  for (std::size_t i : result.selected) selected.push_back(units[i]);
  return selected;
}

std::vector<Proposition> oracle_cluster_representatives(std::span<const Cluster> ranked_clusters,
                                                        std::span<const std::string> references,
                                                        const RougeConfig& cfg) {
  RougeScorer scorer(references, cfg);
  std::vector<Proposition> selected;
  std::vector<std::string> tokens;
  for (const Cluster& cluster : ranked_clusters) {
    if (tokens.size() >= static_cast<std::size_t>(cfg.max_words)) break;
    if (cluster.members.empty()) continue;
    const Proposition* best = nullptr;
    double best_value = 0.0;
    std::vector<std::string> best_tokens;
    for (const ScoredProposition& m : cluster.members) {
      std::vector<std::string> member_tokens = tokenize(m.proposition.text);
      std::vector<std::string> trial = tokens;
      trial.insert(trial.end(), member_tokens.begin(), member_tokens.end());
      double value = scorer.oracle_objective_tokens(trial);
      if (best == nullptr || value > best_value) {
        best = &m.proposition;
        best_value = value;
        best_tokens = std::move(member_tokens);
      }
    }
    selected.push_back(*best);
    tokens.insert(tokens.end(), best_tokens.begin(), best_tokens.end());
  }
  return selected;
}

std::vector<Proposition> oracle_cluster_ranking(std::span<const Cluster> clusters,
                                                std::span<const std::string> references,
                                                const RougeConfig& cfg) {
  if (clusters.empty()) return {};
  std::vector<Proposition> representatives;
  std::vector<std::string> texts;
  for (const Cluster& cluster : clusters) {
    if (cluster.members.empty()) continue;
    representatives.push_back(select_cluster_representative(cluster).proposition);
    texts.push_back(representatives.back().text);
  }
  RougeScorer scorer(references, cfg);
  GreedyResult result = greedy_select(texts, scorer, cfg.max_words);
  std::vector<Proposition> selected;
  for (std::size_t i : result.selected) selected.push_back(representatives[i]);
  return selected;
}

}  // namespace propsum
