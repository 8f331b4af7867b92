#ifndef PROPSUM_SIMILARITY_H_
#define PROPSUM_SIMILARITY_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "propsum/salience.h"

namespace propsum {

using TextPair = std::pair<std::string, std::string>;

class SimilarityBackend {
 public:
  virtual ~SimilarityBackend() = default;
  virtual std::string backend_id() const = 0;
  // One score in [0,1] per pair, same order. Need not be symmetric.
  virtual std::vector<double> score_pairs(std::span<const TextPair> pairs) const = 0;
};

// Jaccard overlap of the stemmed, stopword-free token sets. Two texts with no
// content tokens score 1 when identical and 0 otherwise.
class LexicalSimilarityBackend final : public SimilarityBackend {
 public:
  std::string backend_id() const override { return "lexical"; }
  std::vector<double> score_pairs(std::span<const TextPair> pairs) const override;
};

double content_jaccard(std::string_view a, std::string_view b);

struct SimilarityMatrix {
  std::vector<std::string> prop_ids;
  std::vector<double> values;  // row-major, size() x size()
  std::string backend_id;

  std::size_t size() const { return prop_ids.size(); }
  double at(std::size_t i, std::size_t j) const { return values[i * prop_ids.size() + j]; }
  double& at(std::size_t i, std::size_t j) { return values[i * prop_ids.size() + j]; }
};

// SHA-256 over (backend_id, sorted texts); independent of argument order.
std::string cache_key(std::string_view text_a, std::string_view text_b,
                      std::string_view backend_id);

struct SimilarityCacheStats {
  std::size_t hits = 0;
  std::size_t misses = 0;
  std::size_t backend_calls = 0;  // directed pairs sent to the backend
  bool corrupted = false;
  bool partial_trailing_record = false;
};

// Append-only key -> score file (simcache.jsonl). Each record goes out in a
// single O_APPEND write so concurrent writers never interleave a line.
class SimilarityCache {
 public:
  explicit SimilarityCache(std::filesystem::path file);

  // A truncated final line is skipped (and the file rewritten without it).
  // Any other malformed line marks the file corrupted: it is moved aside to
  // <file>.corrupt and the cache starts empty.
  void load(SimilarityCacheStats* stats = nullptr);

  std::optional<double> find(const std::string& key) const;
  void append(const std::string& key, double score);
  std::size_t size() const { return entries_.size(); }

 private:
  std::filesystem::path file_;
  std::unordered_map<std::string, double> entries_;
};

// value(i, j) = mean(backend(a, b), backend(b, a)) for i != j; the diagonal
// is 1. Pairs already in the cache are not sent to the backend; new scores
// are appended to it. Throws EmptyInput for no propositions and
// BackendFailure for backend errors or scores outside [0,1].
SimilarityMatrix pairwise_similarity(std::span<const ScoredProposition> props,
                                     const SimilarityBackend& backend,
                                     const std::optional<std::filesystem::path>& cache_file,
                                     SimilarityCacheStats* stats = nullptr);

}  // namespace propsum

#endif  // PROPSUM_SIMILARITY_H_
