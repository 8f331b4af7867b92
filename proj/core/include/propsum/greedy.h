#ifndef PROPSUM_GREEDY_H_
#define PROPSUM_GREEDY_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "propsum/rouge.h"

namespace propsum {

inline constexpr double kGreedyTolerance = 1e-9;

struct GreedyStep {
  std::size_t chosen = 0;  // index into the candidate list
  double objective = 0.0;  // objective after adding `chosen`
  double gain = 0.0;
};

struct GreedyResult {
  std::vector<std::size_t> selected;  // selection order
  std::vector<GreedyStep> steps;
  double objective = 0.0;
};

// Greedy maximization of ROUGE-1 F1 + ROUGE-2 F1 over the candidates joined
// in selection order. Each step adds the candidate with the largest
// objective (earliest index on ties). Stops when no candidate improves the
// objective by more than `tolerance`, or once the selection holds at least
// `word_limit` words.
GreedyResult greedy_select(std::span<const std::string> candidate_texts,
                           const RougeScorer& scorer, int word_limit,
                           double tolerance = kGreedyTolerance);

}  // namespace propsum

#endif  // PROPSUM_GREEDY_H_
