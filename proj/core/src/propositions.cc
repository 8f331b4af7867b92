#include "propsum/propositions.h"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "propsum/errors.h"

namespace propsum {
namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

void extract_sentences(const Topic& topic, std::string_view doc_id,
                       const std::vector<Sentence>& sentences, const ExtractionBackend& backend,
                       std::vector<Proposition>& out) {
  for (const Sentence& sentence : sentences) {
    std::vector<SpanTuple> tuples;
    try {
      tuples = backend.extract({topic.topic_id, doc_id, sentence.index, sentence.text});
      for (const SpanTuple& spans : tuples) validate_spans(sentence.text, spans);
    } catch (const std::exception& e) {
      throw BackendFailure("extraction backend '" + backend.backend_id() + "' failed on " +
                           std::string(doc_id) + " sentence " + std::to_string(sentence.index) +
                           ": " + e.what());
    }
    int ordinal = 0;
    for (SpanTuple& spans : tuples) {
      Proposition prop;
      prop.topic_id = topic.topic_id;
      prop.doc_id = std::string(doc_id);
      prop.sent_index = sentence.index;
      prop.ordinal = ordinal;
      prop.prop_id = make_prop_id(topic.topic_id, doc_id, sentence.index, ordinal);
      prop.text = render_proposition(sentence.text, spans);
      prop.spans = std::move(spans);
      out.push_back(std::move(prop));
      ++ordinal;
    }
  }
}

}  // namespace

std::string make_prop_id(std::string_view topic_id, std::string_view doc_id, int sent_index,
                         int ordinal) {
  std::string id;
  id.append(topic_id).append("/").append(doc_id);
  id.append("/").append(std::to_string(sent_index));
  id.append("/").append(std::to_string(ordinal));
  return id;
}

void validate_spans(std::string_view sentence_text, std::span<const CharSpan> spans) {
  if (spans.empty()) throw InvalidSpans("proposition has no spans");
  std::size_t previous_end = 0;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    const CharSpan& span = spans[i];
    if (span.start >= span.end) {
      throw InvalidSpans("span (" + std::to_string(span.start) + "," + std::to_string(span.end) +
                         ") is empty or reversed");
    }
    if (span.end > sentence_text.size()) {
      throw InvalidSpans("span (" + std::to_string(span.start) + "," + std::to_string(span.end) +
                         ") exceeds sentence length " + std::to_string(sentence_text.size()));
    }
    if (i > 0 && span.start < previous_end) {
      throw InvalidSpans("spans overlap or are not increasing");
    }
    previous_end = span.end;
  }
}

std::string render_proposition(std::string_view sentence_text, std::span<const CharSpan> spans) {
  validate_spans(sentence_text, spans);
  std::string text;
  for (const CharSpan& span : spans) {
    std::string_view part = trim(sentence_text.substr(span.start, span.length()));
    if (part.empty()) continue;
    if (!text.empty()) text.push_back(' ');
    text.append(part);
  }
  return text;
}

std::vector<SpanTuple> PassthroughExtractor::extract(const SentenceContext& sentence) const {
  if (trim(sentence.text).empty()) return {};
  return {SpanTuple{{0, sentence.text.size()}}};
}

FixtureExtractor FixtureExtractor::from_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw MissingFile(file.string());
  FixtureExtractor fixture;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(text);
      std::string topic_id = record.at("topic_id").get<std::string>();
      std::string doc_id = record.at("doc_id").get<std::string>();
      int sent_index = record.at("sent_index").get<int>();
      SpanTuple spans;
      for (const auto& pair : record.at("spans")) {
        if (!pair.is_array() || pair.size() != 2) {
          throw SchemaViolation(line, "spans", "expected [start, end] pairs");
        }
        spans.push_back({pair[0].get<std::size_t>(), pair[1].get<std::size_t>()});
      }
      fixture.add(std::move(topic_id), std::move(doc_id), sent_index, std::move(spans));
    } catch (const SchemaViolation&) {
      throw;
    } catch (const nlohmann::json::exception& e) {
      throw SchemaViolation(line, "<record>", e.what());
    }
  }
  return fixture;
}

void FixtureExtractor::add(std::string topic_id, std::string doc_id, int sent_index,
                           SpanTuple spans) {
  tuples_[{std::move(topic_id), std::move(doc_id), sent_index}].push_back(std::move(spans));
}

std::vector<SpanTuple> FixtureExtractor::extract(const SentenceContext& sentence) const {
  auto it = tuples_.find(std::make_tuple(std::string(sentence.topic_id),
                                         std::string(sentence.doc_id), sentence.sent_index));
  if (it == tuples_.end()) return {};
  return it->second;
}

std::vector<Proposition> extract_propositions(const Topic& topic,
                                              const ExtractionBackend& backend) {
  std::vector<Proposition> out;
  for (const Document& doc : topic.documents) {
    extract_sentences(topic, doc.doc_id, doc.sentences, backend, out);
  }
  return out;
}

std::string reference_doc_id(std::string_view ref_id) { return "ref:" + std::string(ref_id); }

std::vector<Sentence> reference_sentences(const ReferenceSummary& reference) {
  std::vector<Sentence> sentences;
  std::istringstream in(reference.text);
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    sentences.push_back(make_sentence(static_cast<int>(sentences.size()), line));
  }
  return sentences;
}

std::vector<Proposition> extract_reference_propositions(const Topic& topic,
                                                        const ExtractionBackend& backend) {
  std::vector<Proposition> out;
  for (const ReferenceSummary& ref : topic.references) {
    extract_sentences(topic, reference_doc_id(ref.ref_id), reference_sentences(ref), backend, out);
  }
  return out;
}

}  // namespace propsum
