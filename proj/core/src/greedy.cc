#include "propsum/greedy.h"

#include <vector>

namespace propsum {

GreedyResult greedy_select(std::span<const std::string> candidate_texts,
                           const RougeScorer& scorer, int word_limit, double tolerance) {
  std::vector<std::vector<std::string>> candidate_tokens;
  candidate_tokens.reserve(candidate_texts.size());
  for (const std::string& text : candidate_texts) candidate_tokens.push_back(tokenize(text));

  GreedyResult result;
  std::vector<bool> used(candidate_texts.size(), false);
  std::vector<std::string> selection;  // raw tokens of the joined selection

  while (selection.size() < static_cast<std::size_t>(word_limit)) {
    double best_value = 0.0;
    std::size_t best = candidate_texts.size();
    std::vector<std::string> trial;
    for (std::size_t i = 0; i < candidate_texts.size(); ++i) {
      if (used[i]) continue;
      trial = selection;
      trial.insert(trial.end(), candidate_tokens[i].begin(), candidate_tokens[i].end());
      double value = scorer.oracle_objective_tokens(trial);
      if (best == candidate_texts.size() || value > best_value) {
        best_value = value;
        best = i;
      }
    }
    if (best == candidate_texts.size() || best_value <= result.objective + tolerance) break;

    used[best] = true;
    selection.insert(selection.end(), candidate_tokens[best].begin(),
                     candidate_tokens[best].end());
    result.steps.push_back({best, best_value, best_value - result.objective});
    result.selected.push_back(best);
    result.objective = best_value;
  }
  return result;
}

}  // namespace propsum
