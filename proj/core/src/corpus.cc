#include "propsum/corpus.h"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <set>

#include "propsum/errors.h"

namespace propsum {
namespace {

using nlohmann::json;

bool valid_iso_date(const std::string& s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  for (std::size_t i : {0, 1, 2, 3, 5, 6, 8, 9}) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  int y = std::stoi(s.substr(0, 4));
  unsigned m = static_cast<unsigned>(std::stoi(s.substr(5, 2)));
  unsigned d = static_cast<unsigned>(std::stoi(s.substr(8, 2)));
  return std::chrono::year_month_day{std::chrono::year{y}, std::chrono::month{m},
                                     std::chrono::day{d}}
      .ok();
}

const json& require(const json& object, const char* field, std::size_t line,
                    const std::string& prefix) {
  if (!object.is_object() || !object.contains(field)) {
    throw SchemaViolation(line, prefix + field, "missing");
  }
  return object.at(field);
}

std::string require_string(const json& object, const char* field, std::size_t line,
                           const std::string& prefix, bool non_empty) {
  const json& value = require(object, field, line, prefix);
  if (!value.is_string()) throw SchemaViolation(line, prefix + field, "expected a string");
  std::string s = value.get<std::string>();
  if (non_empty && s.empty()) throw SchemaViolation(line, prefix + field, "must be non-empty");
  return s;
}

}  // namespace

const Document* Topic::find_document(std::string_view doc_id) const {
  for (const Document& doc : documents) {
    if (doc.doc_id == doc_id) return &doc;
  }
  return nullptr;
}

std::size_t Topic::document_position(std::string_view doc_id) const {
  for (std::size_t i = 0; i < documents.size(); ++i) {
    if (documents[i].doc_id == doc_id) return i;
  }
  throw UnknownDocument(std::string(doc_id));
}

std::vector<std::string> Topic::reference_texts() const {
  std::vector<std::string> texts;
  texts.reserve(references.size());
  for (const ReferenceSummary& ref : references) texts.push_back(ref.text);
  return texts;
}

std::size_t Topic::sentence_count() const {
  std::size_t n = 0;
  for (const Document& doc : documents) n += doc.sentences.size();
  return n;
}

Sentence make_sentence(int index, std::string text) {
  Sentence sentence;
  sentence.index = index;
  sentence.token_offsets = token_spans(text);
  sentence.text = std::move(text);
  return sentence;
}

void normalize_document_order(Topic& topic) {
  std::sort(topic.documents.begin(), topic.documents.end(),
            [](const Document& a, const Document& b) {
              if (a.date.has_value() != b.date.has_value()) return a.date.has_value();
              if (a.date && *a.date != *b.date) return *a.date < *b.date;
              return a.doc_id < b.doc_id;
            });
}

Topic topic_from_json(const json& record, std::size_t line) {
  if (!record.is_object()) throw SchemaViolation(line, "<record>", "expected a JSON object");
  Topic topic;
  topic.topic_id = require_string(record, "topic_id", line, "", true);

  const json& docs = require(record, "documents", line, "");
  if (!docs.is_array() || docs.empty()) {
    throw SchemaViolation(line, "documents", "expected a non-empty array");
  }
  std::set<std::string> doc_ids;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    std::string prefix = "documents[" + std::to_string(d) + "].";
    Document doc;
    doc.doc_id = require_string(docs[d], "doc_id", line, prefix, true);
    if (!doc_ids.insert(doc.doc_id).second) throw DuplicateId(topic.topic_id + "/" + doc.doc_id);

    const json& date = require(docs[d], "date", line, prefix);
    if (date.is_string()) {
      std::string s = date.get<std::string>();
      if (!valid_iso_date(s)) throw SchemaViolation(line, prefix + "date", "expected YYYY-MM-DD");
      doc.date = s;
    } else if (!date.is_null()) {
      throw SchemaViolation(line, prefix + "date", "expected a date string or null");
    }

    const json& sentences = require(docs[d], "sentences", line, prefix);
    if (!sentences.is_array() || sentences.empty()) {
      throw SchemaViolation(line, prefix + "sentences", "expected a non-empty array");
    }
    for (std::size_t s = 0; s < sentences.size(); ++s) {
      if (!sentences[s].is_string()) {
        throw SchemaViolation(line, prefix + "sentences[" + std::to_string(s) + "]",
                              "expected a string");
      }
      doc.sentences.push_back(make_sentence(static_cast<int>(s), sentences[s].get<std::string>()));
    }
    topic.documents.push_back(std::move(doc));
  }

  const json& refs = require(record, "references", line, "");
  if (!refs.is_array() || refs.empty()) {
    throw SchemaViolation(line, "references", "expected a non-empty array");
  }
  std::set<std::string> ref_ids;
  for (std::size_t r = 0; r < refs.size(); ++r) {
    std::string prefix = "references[" + std::to_string(r) + "].";
    ReferenceSummary ref;
    ref.ref_id = require_string(refs[r], "ref_id", line, prefix, true);
    ref.text = require_string(refs[r], "text", line, prefix, true);
    if (!ref_ids.insert(ref.ref_id).second) throw DuplicateId(topic.topic_id + "/" + ref.ref_id);
    topic.references.push_back(std::move(ref));
  }

  normalize_document_order(topic);
  return topic;
}

json topic_to_json(const Topic& topic) {
  json docs = json::array();
  for (const Document& doc : topic.documents) {
    json sentences = json::array();
    for (const Sentence& s : doc.sentences) sentences.push_back(s.text);
    docs.push_back({{"doc_id", doc.doc_id},
                    {"date", doc.date ? json(*doc.date) : json(nullptr)},
                    {"sentences", std::move(sentences)}});
  }
  json refs = json::array();
  for (const ReferenceSummary& ref : topic.references) {
    refs.push_back({{"ref_id", ref.ref_id}, {"text", ref.text}});
  }
  return {{"topic_id", topic.topic_id}, {"documents", std::move(docs)}, {"references", std::move(refs)}};
}

std::vector<Topic> load_corpus(const std::filesystem::path& path) {
  std::filesystem::path file = path;
  if (std::filesystem::is_directory(path)) file = path / "topics.jsonl";
  if (!std::filesystem::is_regular_file(file)) throw MissingFile(file.string());

  std::ifstream in(file);
  if (!in) throw MissingFile(file.string());

  std::vector<Topic> topics;
  std::set<std::string> topic_ids;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    json record;
    try {
      record = json::parse(text);
    } catch (const json::parse_error& e) {
      throw SchemaViolation(line, "<record>", e.what());
    }
    Topic topic = topic_from_json(record, line);
    if (!topic_ids.insert(topic.topic_id).second) throw DuplicateId(topic.topic_id);
    topics.push_back(std::move(topic));
  }
  return topics;
}

void write_corpus(const std::filesystem::path& file, const std::vector<Topic>& topics) {
  std::ofstream out(file);
  if (!out) throw DataError("cannot write " + file.string());
  for (const Topic& topic : topics) out << topic_to_json(topic).dump() << '\n';
}

const Sentence& sentence_at(const Topic& topic, std::string_view doc_id, int index) {
  const Document* doc = topic.find_document(doc_id);
  if (doc == nullptr) throw UnknownDocument(std::string(doc_id));
  if (index < 0 || static_cast<std::size_t>(index) >= doc->sentences.size()) {
    throw IndexOutOfRange("sentence " + std::to_string(index) + " out of range for document " +
                          std::string(doc_id));
  }
  return doc->sentences[static_cast<std::size_t>(index)];
}

}  // namespace propsum
