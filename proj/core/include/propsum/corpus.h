#ifndef PROPSUM_CORPUS_H_
#define PROPSUM_CORPUS_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "propsum/tokenizer.h"

namespace propsum {

struct Sentence {
  int index = 0;
  std::string text;
  std::vector<CharSpan> token_offsets;
};

struct Document {
  std::string doc_id;
  std::optional<std::string> date;  // YYYY-MM-DD
  std::vector<Sentence> sentences;
};

struct ReferenceSummary {
  std::string ref_id;
  std::string text;
};

struct Topic {
  std::string topic_id;
  std::vector<Document> documents;  // (date, doc_id) ascending, null dates last
  std::vector<ReferenceSummary> references;

  // nullptr when absent.
  const Document* find_document(std::string_view doc_id) const;
  // Position of the document in `documents`; throws UnknownDocument.
  std::size_t document_position(std::string_view doc_id) const;
  std::vector<std::string> reference_texts() const;
  std::size_t sentence_count() const;
};

// Builds a sentence with its token offsets filled in.
Sentence make_sentence(int index, std::string text);

// Sorts documents by (date, doc_id); undated documents go last.
void normalize_document_order(Topic& topic);

// Parses one topics.jsonl record; `line` is used in SchemaViolation errors.
Topic topic_from_json(const nlohmann::json& record, std::size_t line);
nlohmann::json topic_to_json(const Topic& topic);

// `path` is either a topics.jsonl file or a directory containing one.
// Throws MissingFile, SchemaViolation, DuplicateId.
std::vector<Topic> load_corpus(const std::filesystem::path& path);
void write_corpus(const std::filesystem::path& file, const std::vector<Topic>& topics);

// Throws UnknownDocument or IndexOutOfRange.
const Sentence& sentence_at(const Topic& topic, std::string_view doc_id, int index);

}  // namespace propsum

#endif  // PROPSUM_CORPUS_H_
