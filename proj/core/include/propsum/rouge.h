#ifndef PROPSUM_ROUGE_H_
#define PROPSUM_ROUGE_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "propsum/tokenizer.h"

namespace propsum {

enum class MultiRefMode { kAverage, kMax };

struct RougeConfig {
  int max_words = 100;
  bool stem = true;
  bool remove_stopwords = false;
  MultiRefMode multi_ref = MultiRefMode::kAverage;
  int skip_distance = 4;
  bool include_unigrams_in_su = true;

  // Throws ConfigError.
  void validate() const;
  TokenizerOptions tokenizer_options() const { return {stem, remove_stopwords}; }
};

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  static RougeScore from_counts(std::size_t overlap, std::size_t candidate_total,
                                std::size_t reference_total);
};

using UnitCounts = std::unordered_map<std::string, int>;

// Contiguous n-gram multiset. Keys join tokens with '\x1f'.
UnitCounts ngram_counts(std::span<const std::string> tokens, int n);

// Skip-bigrams (i < j, j - i - 1 <= skip_distance), optionally with all
// unigrams added to the same multiset.
UnitCounts skip_bigram_counts(std::span<const std::string> tokens,
                              int skip_distance, bool include_unigrams);

// Clipped overlap: sum over keys of min(candidate, reference).
std::size_t clipped_overlap(const UnitCounts& candidate, const UnitCounts& reference);

std::size_t total_units(const UnitCounts& counts);

// Tokens as the scorer sees them: truncated to cfg.max_words words (when
// `truncate`), then stopword-filtered and stemmed per cfg.
std::vector<std::string> scoring_tokens(std::string_view text, const RougeConfig& cfg,
                                        bool truncate);

// References tokenized and counted once, for repeated scoring of many
// candidates (greedy selection, oracles, tuning).
class RougeScorer {
 public:
  // Throws EmptyReferences when `references` is empty.
  RougeScorer(std::span<const std::string> references, const RougeConfig& cfg);

  const RougeConfig& config() const { return cfg_; }

  // Candidate tokens must be raw tokenize() output (unstemmed, unfiltered);
  // truncation, filtering and stemming are applied here.
  RougeScore rouge_n_tokens(std::span<const std::string> raw_tokens, int n) const;
  RougeScore rouge_su_tokens(std::span<const std::string> raw_tokens) const;
  double oracle_objective_tokens(std::span<const std::string> raw_tokens) const;

  RougeScore rouge_n(std::string_view candidate, int n) const;
  RougeScore rouge_su(std::string_view candidate) const;

 private:
  std::vector<std::string> prepare(std::span<const std::string> raw_tokens) const;
  RougeScore combine(const std::vector<RougeScore>& per_reference) const;
  const std::vector<UnitCounts>& counts_for(int n) const;

  RougeConfig cfg_;
  std::vector<std::vector<std::string>> reference_tokens_;
  std::vector<UnitCounts> unigram_counts_;
  std::vector<UnitCounts> bigram_counts_;
  std::vector<UnitCounts> su_counts_;
};

RougeScore rouge_n(std::string_view candidate, std::span<const std::string> references,
                   int n, const RougeConfig& cfg);

RougeScore rouge_su4(std::string_view candidate, std::span<const std::string> references,
                     const RougeConfig& cfg);

// ROUGE-1 F1 + ROUGE-2 F1 of the selected texts joined by single spaces.
double combined_oracle_objective(std::span<const std::string> selected_texts,
                                 std::span<const std::string> references,
                                 const RougeConfig& cfg);

}  // namespace propsum

#endif  // PROPSUM_ROUGE_H_
