#ifndef PROPSUM_ORACLES_H_
#define PROPSUM_ORACLES_H_

#include <span>
#include <string>
#include <vector>

#include "propsum/clustering.h"
#include "propsum/corpus.h"
#include "propsum/propositions.h"
#include "propsum/rouge.h"

namespace propsum {

// Extractive upper bound over units of one granularity (propositions or
// whole sentences): greedy ROUGE-1 F1 + ROUGE-2 F1 selection, capped at
// cfg.max_words. Returns units in selection order. Throws NoUnits.
std::vector<Proposition> oracle_greedy_units(const Topic& topic,
                                             std::span<const Proposition> units,
                                             const RougeConfig& cfg);

// Walks clusters in rank order and takes, from each, the member that
// maximizes the objective of the selection so far plus that member, even
// when the gain is zero. Stops once the selection reaches cfg.max_words.
std::vector<Proposition> oracle_cluster_representatives(std::span<const Cluster> ranked_clusters,
                                                        std::span<const std::string> references,
                                                        const RougeConfig& cfg);

// Fixes each cluster's highest-salience member, then greedily selects among
// those representatives (stop on no gain or at the word limit).
std::vector<Proposition> oracle_cluster_ranking(std::span<const Cluster> clusters,
                                                std::span<const std::string> references,
                                                const RougeConfig& cfg);

}  // namespace propsum

#endif  // PROPSUM_ORACLES_H_
