#ifndef PROPSUM_PROPOSITIONS_H_
#define PROPSUM_PROPOSITIONS_H_

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "propsum/corpus.h"
#include "propsum/tokenizer.h"

namespace propsum {

// A possibly discontinuous predicate-argument span inside one sentence.
struct Proposition {
  std::string prop_id;  // topic_id/doc_id/sent_index/ordinal
  std::string topic_id;
  std::string doc_id;
  int sent_index = 0;
  int ordinal = 0;
  std::vector<CharSpan> spans;
  std::string text;

  bool is_contiguous() const { return spans.size() == 1; }
};

std::string make_prop_id(std::string_view topic_id, std::string_view doc_id, int sent_index,
                         int ordinal);

// Throws InvalidSpans unless spans are non-empty, each non-empty, strictly
// increasing, non-overlapping and within the text.
void validate_spans(std::string_view sentence_text, std::span<const CharSpan> spans);

// Span substrings in order, each trimmed of surrounding whitespace, joined by
// single spaces.
std::string render_proposition(std::string_view sentence_text, std::span<const CharSpan> spans);

struct SentenceContext {
  std::string_view topic_id;
  std::string_view doc_id;
  int sent_index = 0;
  std::string_view text;
};

using SpanTuple = std::vector<CharSpan>;

class ExtractionBackend {
 public:
  virtual ~ExtractionBackend() = default;
  virtual std::string backend_id() const = 0;
  // Must be deterministic. An empty result is allowed.
  virtual std::vector<SpanTuple> extract(const SentenceContext& sentence) const = 0;
};

// One proposition per sentence covering the whole sentence.
class PassthroughExtractor final : public ExtractionBackend {
 public:
  std::string backend_id() const override { return "passthrough"; }
  std::vector<SpanTuple> extract(const SentenceContext& sentence) const override;
};

// Gold tuples read from a propositions.jsonl fixture, returned in file order.
class FixtureExtractor final : public ExtractionBackend {
 public:
  FixtureExtractor() = default;
  // Throws MissingFile or SchemaViolation.
  static FixtureExtractor from_file(const std::filesystem::path& file);

  void add(std::string topic_id, std::string doc_id, int sent_index, SpanTuple spans);

  std::string backend_id() const override { return "fixture"; }
  std::vector<SpanTuple> extract(const SentenceContext& sentence) const override;

 private:
  std::map<std::tuple<std::string, std::string, int>, std::vector<SpanTuple>, std::less<>>
      tuples_;
};

// Runs the backend over every sentence in (document order, sentence index)
// order; ordinals follow the backend's output order. Backend exceptions are
// rethrown as BackendFailure carrying doc_id and sentence index.
std::vector<Proposition> extract_propositions(const Topic& topic,
                                              const ExtractionBackend& backend);

// Reference summaries are treated as pseudo-documents with doc_id
// "ref:<ref_id>" and one sentence per non-blank line.
std::string reference_doc_id(std::string_view ref_id);
std::vector<Sentence> reference_sentences(const ReferenceSummary& reference);
std::vector<Proposition> extract_reference_propositions(const Topic& topic,
                                                        const ExtractionBackend& backend);

}  // namespace propsum

#endif  // PROPSUM_PROPOSITIONS_H_
