#ifndef PROPSUM_SALIENCE_H_
#define PROPSUM_SALIENCE_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "propsum/corpus.h"
#include "propsum/propositions.h"
#include "propsum/rouge.h"

namespace propsum {

struct SalienceLabelSet {
  std::string topic_id;
  std::set<std::string> positives;
  std::set<std::string> negatives;
  std::vector<std::string> selection_order;  // positives in greedy order
};

// Gold labels: greedy ROUGE-1 F1 + ROUGE-2 F1 selection against all of the
// topic's references jointly, capped at cfg.max_words. Candidates are taken
// in the given order, which is also the tie-break order.
// Throws NoPropositions.
SalienceLabelSet derive_salience_labels(const Topic& topic,
                                        std::span<const Proposition> propositions,
                                        const RougeConfig& cfg);

struct LabeledInstance {
  std::string prop_id;
  int label = 0;
  friend bool operator==(const LabeledInstance&, const LabeledInstance&) = default;
};

struct BalancedTrainingSet {
  std::vector<LabeledInstance> instances;
  std::size_t kept_negatives = 0;
  bool warning = false;
  std::string warning_message;
};

inline constexpr double kNegativeKeepProbability = 0.4;

// Drops each negative with probability 1 - keep_probability, then
// oversamples the smaller class round-robin until the classes are equal, then
// shuffles. Uses only raw mt19937_64 output so results are identical across
// standard libraries.
BalancedTrainingSet balance_training_set(const SalienceLabelSet& labels, std::uint64_t seed,
                                         double keep_probability = kNegativeKeepProbability);

struct ScoredProposition {
  Proposition proposition;
  double score = 0.0;
};

inline constexpr int kContextSentencesPerDocument = 20;
inline constexpr int kDefaultTokenBudget = 4096;

struct ContextWindow {
  Proposition candidate;
  std::string candidate_sentence;
  std::vector<std::string> own_doc_sentences;  // prefix of the candidate's document
  std::vector<std::pair<std::string, std::vector<std::string>>> other_docs;  // date order
  int token_budget = kDefaultTokenBudget;
};

// Own document truncated to its first 20 sentences (further cut to fit the
// budget). The rest of the budget is split evenly across the other
// documents, each filled with whole leading sentences up to its share; the
// remainder is then handed out one sentence at a time in date order.
ContextWindow build_context_window(const Proposition& candidate, const Topic& topic,
                                   int budget = kDefaultTokenBudget);

// Word count of everything the window would serialize.
std::size_t window_token_count(const ContextWindow& window);

struct ContextDelimiters {
  std::string prop_open = "<prop>";
  std::string prop_close = "</prop>";
  std::string doc_sep = "<doc-sep>";
  std::string sent_sep = "<sent-sep>";
};

// Own document first, then the other documents. Each span part of the
// candidate is wrapped in prop_open/prop_close inside its sentence. When the
// candidate sentence lies beyond the own-document prefix, the marked
// sentence is appended as the last own-document sentence.
std::string serialize_context_window(const ContextWindow& window,
                                     const ContextDelimiters& delimiters = {});

class SalienceBackend {
 public:
  virtual ~SalienceBackend() = default;
  virtual std::string backend_id() const = 0;
  // One score in [0,1] per window, same order.
  virtual std::vector<double> score_batch(const Topic& topic,
                                          std::span<const ContextWindow> windows) const = 0;
};

// Repetition-as-salience baseline that needs no model:
//
//   score = min(1, 0.5 * df / D + 0.5 * cos(prop, centroid))
//
// Content tokens are stemmed, stopword-free tokens. D is the number of
// documents; df counts documents containing at least half of the
// proposition's distinct content tokens. cos is the cosine between the
// proposition's tf-idf vector and the topic centroid (topic-wide term
// frequency times idf), with idf(t) = 1 + ln((1 + D) / (1 + df(t))).
// Propositions without content tokens score 0.
class LexicalSalienceBackend final : public SalienceBackend {
 public:
  std::string backend_id() const override { return "lexical"; }
  std::vector<double> score_batch(const Topic& topic,
                                  std::span<const ContextWindow> windows) const override;
};

// Precomputed scores from an external model, one {"prop_id", "score"} JSON
// object per line.
class ScoreFileSalienceBackend final : public SalienceBackend {
 public:
  static ScoreFileSalienceBackend from_file(const std::filesystem::path& file);
  void set(std::string prop_id, double score) { scores_[std::move(prop_id)] = score; }

  std::string backend_id() const override { return "score-file"; }
  std::vector<double> score_batch(const Topic& topic,
                                  std::span<const ContextWindow> windows) const override;

 private:
  std::map<std::string, double> scores_;
};

inline constexpr std::size_t kSalienceBatchSize = 64;

// Throws BackendFailure (with the failing batch index) when the backend
// throws, returns the wrong number of scores, or a score outside [0,1].
std::vector<ScoredProposition> score_propositions(std::span<const Proposition> props,
                                                  const Topic& topic,
                                                  const SalienceBackend& backend,
                                                  int budget = kDefaultTokenBudget,
                                                  std::size_t batch_size = kSalienceBatchSize);

// Keeps score >= tau, order preserved.
std::vector<ScoredProposition> filter_by_threshold(std::span<const ScoredProposition> scored,
                                                   double tau);

}  // namespace propsum

#endif  // PROPSUM_SALIENCE_H_
