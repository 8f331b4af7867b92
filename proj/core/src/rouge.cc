#include "propsum/rouge.h"

#include <algorithm>

#include "propsum/errors.h"
#include "propsum/porter_stemmer.h"

namespace propsum {
namespace {

constexpr char kJoin = '\x1f';

std::string join_key(std::span<const std::string> tokens) {
  std::string key;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) key.push_back(kJoin);
    key += tokens[i];
  }
  return key;
}

}  // namespace

void RougeConfig::validate() const {
  if (max_words <= 0) throw ConfigError("rouge.max_words must be > 0");
  if (skip_distance < 0) throw ConfigError("rouge.skip_distance must be >= 0");
}

RougeScore RougeScore::from_counts(std::size_t overlap, std::size_t candidate_total,
                                   std::size_t reference_total) {
  RougeScore score;
  if (candidate_total == 0 || reference_total == 0) return score;
  score.precision = static_cast<double>(overlap) / static_cast<double>(candidate_total);
  score.recall = static_cast<double>(overlap) / static_cast<double>(reference_total);
  if (score.precision + score.recall > 0.0) {
    score.f1 = 2.0 * score.precision * score.recall / (score.precision + score.recall);
  }
  return score;
}

UnitCounts ngram_counts(std::span<const std::string> tokens, int n) {
  UnitCounts counts;
  if (n <= 0 || tokens.size() < static_cast<std::size_t>(n)) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++counts[join_key(tokens.subspan(i, n))];
  }
  return counts;
}

UnitCounts skip_bigram_counts(std::span<const std::string> tokens, int skip_distance,
                              bool include_unigrams) {
  UnitCounts counts;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (include_unigrams) ++counts[tokens[i]];
    std::size_t last = std::min(tokens.size() - 1, i + 1 + static_cast<std::size_t>(skip_distance));
    for (std::size_t j = i + 1; j <= last; ++j) {
      ++counts[tokens[i] + kJoin + tokens[j]];
    }
  }
  return counts;
}

std::size_t clipped_overlap(const UnitCounts& candidate, const UnitCounts& reference) {
  const UnitCounts& smaller = candidate.size() <= reference.size() ? candidate : reference;
  const UnitCounts& larger = candidate.size() <= reference.size() ? reference : candidate;
  std::size_t overlap = 0;
  for (const auto& [key, count] : smaller) {
    auto it = larger.find(key);
    if (it != larger.end()) overlap += static_cast<std::size_t>(std::min(count, it->second));
  }
  return overlap;
}

std::size_t total_units(const UnitCounts& counts) {
  std::size_t total = 0;
  for (const auto& [key, count] : counts) total += static_cast<std::size_t>(count);
  return total;
}

std::vector<std::string> scoring_tokens(std::string_view text, const RougeConfig& cfg,
                                        bool truncate) {
  std::vector<std::string> raw = tokenize(text);
  if (truncate && raw.size() > static_cast<std::size_t>(cfg.max_words)) {
    raw.resize(static_cast<std::size_t>(cfg.max_words));
  }
  std::vector<std::string> out;
  out.reserve(raw.size());
  for (std::string& token : raw) {
    if (cfg.remove_stopwords && is_stopword(token)) continue;
    out.push_back(cfg.stem ? porter_stem(token) : std::move(token));
  }
  return out;
}

RougeScorer::RougeScorer(std::span<const std::string> references, const RougeConfig& cfg)
    : cfg_(cfg) {
  if (references.empty()) throw EmptyReferences();
  cfg_.validate();
  for (const std::string& reference : references) {
    reference_tokens_.push_back(scoring_tokens(reference, cfg_, /*truncate=*/false));
    const auto& tokens = reference_tokens_.back();
    unigram_counts_.push_back(ngram_counts(tokens, 1));
    bigram_counts_.push_back(ngram_counts(tokens, 2));
    su_counts_.push_back(
        skip_bigram_counts(tokens, cfg_.skip_distance, cfg_.include_unigrams_in_su));
  }
}

std::vector<std::string> RougeScorer::prepare(std::span<const std::string> raw_tokens) const {
  std::size_t limit = std::min(raw_tokens.size(), static_cast<std::size_t>(cfg_.max_words));
  std::vector<std::string> out;
  out.reserve(limit);
  for (std::size_t i = 0; i < limit; ++i) {
    if (cfg_.remove_stopwords && is_stopword(raw_tokens[i])) continue;
    out.push_back(cfg_.stem ? porter_stem(raw_tokens[i]) : raw_tokens[i]);
  }
  return out;
}

RougeScore RougeScorer::combine(const std::vector<RougeScore>& per_reference) const {
  if (cfg_.multi_ref == MultiRefMode::kMax) {
    RougeScore best = per_reference.front();
    for (const RougeScore& s : per_reference) {
      if (s.f1 > best.f1) best = s;
    }
    return best;
  }
  RougeScore mean;
  for (const RougeScore& s : per_reference) {
    mean.precision += s.precision;
    mean.recall += s.recall;
    mean.f1 += s.f1;
  }
  double k = static_cast<double>(per_reference.size());
  mean.precision /= k;
  mean.recall /= k;
  mean.f1 /= k;
  return mean;
}

RougeScore RougeScorer::rouge_n_tokens(std::span<const std::string> raw_tokens, int n) const {
  if (n < 1) throw ConfigError("rouge n must be >= 1");
  std::vector<std::string> tokens = prepare(raw_tokens);
  UnitCounts candidate = ngram_counts(tokens, n);
  std::size_t candidate_total = total_units(candidate);
  std::vector<RougeScore> scores;
  scores.reserve(reference_tokens_.size());
  for (std::size_t r = 0; r < reference_tokens_.size(); ++r) {
    if (n == 1 || n == 2) {
      const UnitCounts& ref = n == 1 ? unigram_counts_[r] : bigram_counts_[r];
      scores.push_back(RougeScore::from_counts(clipped_overlap(candidate, ref),
                                               candidate_total, total_units(ref)));
    } else {
      UnitCounts ref = ngram_counts(reference_tokens_[r], n);
      scores.push_back(RougeScore::from_counts(clipped_overlap(candidate, ref),
                                               candidate_total, total_units(ref)));
    }
  }
  return combine(scores);
}

RougeScore RougeScorer::rouge_su_tokens(std::span<const std::string> raw_tokens) const {
  std::vector<std::string> tokens = prepare(raw_tokens);
  UnitCounts candidate =
      skip_bigram_counts(tokens, cfg_.skip_distance, cfg_.include_unigrams_in_su);
  std::size_t candidate_total = total_units(candidate);
  std::vector<RougeScore> scores;
  scores.reserve(su_counts_.size());
  for (const UnitCounts& ref : su_counts_) {
    scores.push_back(RougeScore::from_counts(clipped_overlap(candidate, ref), candidate_total,
                                             total_units(ref)));
  }
  return combine(scores);
}

double RougeScorer::oracle_objective_tokens(std::span<const std::string> raw_tokens) const {
  return rouge_n_tokens(raw_tokens, 1).f1 + rouge_n_tokens(raw_tokens, 2).f1;
}

RougeScore RougeScorer::rouge_n(std::string_view candidate, int n) const {
  return rouge_n_tokens(tokenize(candidate), n);
}

RougeScore RougeScorer::rouge_su(std::string_view candidate) const {
  return rouge_su_tokens(tokenize(candidate));
}

RougeScore rouge_n(std::string_view candidate, std::span<const std::string> references, int n,
                   const RougeConfig& cfg) {
  return RougeScorer(references, cfg).rouge_n(candidate, n);
}

RougeScore rouge_su4(std::string_view candidate, std::span<const std::string> references,
                     const RougeConfig& cfg) {
  return RougeScorer(references, cfg).rouge_su(candidate);
}

double combined_oracle_objective(std::span<const std::string> selected_texts,
                                 std::span<const std::string> references,
                                 const RougeConfig& cfg) {
  RougeScorer scorer(references, cfg);
  std::string joined;
  for (std::size_t i = 0; i < selected_texts.size(); ++i) {
    if (i > 0) joined.push_back(' ');
    joined += selected_texts[i];
  }
  return scorer.rouge_n(joined, 1).f1 + scorer.rouge_n(joined, 2).f1;
}

}  // namespace propsum
