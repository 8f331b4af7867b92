#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <random>

#include "propsum/corpus.h"
#include "propsum/errors.h"
#include "propsum/propositions.h"
#include "test_support.h"

using namespace propsum;
using nlohmann::json;

namespace {

json doc(const std::string& id, const json& date, std::vector<std::string> sentences) {
  return {{"doc_id", id}, {"date", date}, {"sentences", sentences}};
}

json topic_record(const std::string& id, json docs, json refs) {
  return {{"topic_id", id}, {"documents", docs}, {"references", refs}};
}

std::filesystem::path write_lines(const std::string& name, const std::vector<json>& lines) {
  auto dir = testsupport::fresh_dir(name);
  std::ofstream out(dir / "topics.jsonl");
  for (const auto& l : lines) out << l.dump() << "\n";
  return dir;
}

const json kRefs = json::array({{{"ref_id", "r1"}, {"text", "A summary."}}});

}  // namespace

TEST_CASE("load a directory with one topic") {
  auto dir = write_lines("corpus_basic", {topic_record("t1",
                                                       {doc("d1", "2007-03-17", {"One.", "Two."}),
                                                        doc("d2", "2007-03-16", {"Three."})},
                                                       kRefs)});
  auto topics = load_corpus(dir);
  REQUIRE(topics.size() == 1);
  REQUIRE(topics[0].documents.size() == 2);
  CHECK(topics[0].documents[0].doc_id == "d2");
  CHECK(topics[0].documents[1].doc_id == "d1");
  CHECK(load_corpus(dir / "topics.jsonl").size() == 1);
}

TEST_CASE("null dates sort after dated documents, then by id") {
  auto dir = write_lines("corpus_nulls", {topic_record("t1",
                                                       {doc("b", nullptr, {"x"}), doc("a", nullptr, {"x"}),
                                                        doc("z", "2001-01-01", {"x"})},
                                                       kRefs)});
  auto t = load_corpus(dir)[0];
  CHECK(t.documents[0].doc_id == "z");
  CHECK(t.documents[1].doc_id == "a");
  CHECK(t.documents[2].doc_id == "b");
}

TEST_CASE("schema violations") {
  SUBCASE("no references") {
    auto dir = write_lines("corpus_norefs", {topic_record("t1", {doc("d1", nullptr, {"x"})}, json::array())});
    CHECK_THROWS_AS(load_corpus(dir), SchemaViolation);
  }
  SUBCASE("empty sentences") {
    auto dir = write_lines("corpus_nosents", {topic_record("t1", {doc("d1", nullptr, {})}, kRefs)});
    CHECK_THROWS_AS(load_corpus(dir), SchemaViolation);
  }
  SUBCASE("bad date") {
    auto dir = write_lines("corpus_baddate", {topic_record("t1", {doc("d1", "2007-02-30", {"x"})}, kRefs)});
    CHECK_THROWS_AS(load_corpus(dir), SchemaViolation);
  }
  SUBCASE("line number is reported") {
    auto dir = write_lines("corpus_line", {topic_record("t1", {doc("d1", nullptr, {"x"})}, kRefs),
                                           json{{"topic_id", "t2"}}});
    try {
      load_corpus(dir);
      FAIL("expected a schema violation");
    } catch (const SchemaViolation& e) {
      CHECK(e.line() == 2);
    }
  }
}

TEST_CASE("duplicate ids") {
  auto dup_topic = write_lines("corpus_duptopic", {topic_record("t1", {doc("d1", nullptr, {"x"})}, kRefs),
                                                   topic_record("t1", {doc("d1", nullptr, {"x"})}, kRefs)});
  CHECK_THROWS_AS(load_corpus(dup_topic), DuplicateId);
  auto dup_doc = write_lines("corpus_dupdoc", {topic_record("t1",
                                                            {doc("d1", nullptr, {"x"}), doc("d1", nullptr, {"y"})},
                                                            kRefs)});
  CHECK_THROWS_AS(load_corpus(dup_doc), DuplicateId);
}

TEST_CASE("missing file") {
  CHECK_THROWS_AS(load_corpus("/nonexistent/propsum/corpus"), MissingFile);
}

TEST_CASE("sentence lookup") {
  Topic t = testsupport::make_topic("t", {{"d1", {"First.", "Second."}}}, {"ref"});
  CHECK(sentence_at(t, "d1", 0).text == "First.");
  CHECK_THROWS_AS(sentence_at(t, "dX", 0), UnknownDocument);
  CHECK_THROWS_AS(sentence_at(t, "d1", 999), IndexOutOfRange);
  CHECK_THROWS_AS(sentence_at(t, "d1", -1), IndexOutOfRange);
}

TEST_CASE("property: write then load is the identity and input order does not matter") {
  std::mt19937 rng(3);
  std::vector<json> docs;
  for (int d = 0; d < 8; ++d) {
    json date = d % 3 == 0 ? json(nullptr) : json("2010-0" + std::to_string(1 + d % 4) + "-1" + std::to_string(d % 2));
    docs.push_back(doc("doc" + std::to_string(d), date, {"Sentence " + std::to_string(d) + ".", "More text."}));
  }
  auto first = load_corpus(write_lines("corpus_rt1", {topic_record("t", docs, kRefs)}));
  std::shuffle(docs.begin(), docs.end(), rng);
  auto second = load_corpus(write_lines("corpus_rt2", {topic_record("t", docs, kRefs)}));
  CHECK(topic_to_json(first[0]) == topic_to_json(second[0]));

  auto dir = testsupport::fresh_dir("corpus_rt3");
  write_corpus(dir / "topics.jsonl", first);
  auto third = load_corpus(dir);
  CHECK(topic_to_json(third[0]) == topic_to_json(first[0]));
  for (const auto& d : third[0].documents) {
    for (const auto& s : d.sentences) {
      std::size_t last_end = 0;
      for (const auto& span : s.token_offsets) {
        CHECK(span.start >= last_end);
        CHECK(span.start < span.end);
        CHECK(span.end <= s.text.size());
        last_end = span.end;
      }
    }
  }
}

TEST_CASE("render propositions from spans") {
  CHECK(render_proposition("Hun Sen ousted Ranariddh in a coup.", std::vector<CharSpan>{{0, 27}}) ==
        "Hun Sen ousted Ranariddh in");
  CHECK(render_proposition("A, who lives in B, won C", std::vector<CharSpan>{{0, 1}, {19, 24}}) ==
        "A won C");
  CHECK_THROWS_AS(render_proposition("Hello world", std::vector<CharSpan>{{5, 3}}), InvalidSpans);
  CHECK_THROWS_AS(render_proposition("Hello", std::vector<CharSpan>{{0, 9}}), InvalidSpans);
  CHECK_THROWS_AS(render_proposition("Hello world", std::vector<CharSpan>{{0, 5}, {3, 8}}), InvalidSpans);
  CHECK_THROWS_AS(render_proposition("Hello world", std::vector<CharSpan>{}), InvalidSpans);
}

TEST_CASE("passthrough extraction yields one proposition per sentence") {
  Topic t = testsupport::make_topic("t", {{"d1", {"One a.", "Two b.", "Three c."}}}, {"ref"});
  auto props = extract_propositions(t, PassthroughExtractor{});
  REQUIRE(props.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(props[i].text == t.documents[0].sentences[i].text);
    CHECK(props[i].is_contiguous());
    CHECK(props[i].prop_id == "t/d1/" + std::to_string(i) + "/0");
  }
  CHECK(extract_propositions(t, PassthroughExtractor{}).size() == t.sentence_count());
}

TEST_CASE("fixture extraction keeps file order and assigns ordinals") {
  Topic t = testsupport::make_topic("t", {{"d1", {"A, who lives in B, won C", "Other."}}}, {"ref"});
  auto dir = testsupport::fresh_dir("fixture_extract");
  {
    std::ofstream out(dir / "propositions.jsonl");
    out << R"({"topic_id":"t","doc_id":"d1","sent_index":0,"spans":[[0,1],[19,24]]})" << "\n";
    out << R"({"topic_id":"t","doc_id":"d1","sent_index":0,"spans":[[0,1],[3,17]]})" << "\n";
  }
  auto backend = FixtureExtractor::from_file(dir / "propositions.jsonl");
  auto props = extract_propositions(t, backend);
  REQUIRE(props.size() == 2);
  CHECK(props[0].prop_id == "t/d1/0/0");
  CHECK(props[0].text == "A won C");
  CHECK(props[1].prop_id == "t/d1/0/1");
  CHECK(props[1].text == "A who lives in B");
  CHECK_FALSE(props[0].is_contiguous());

  // Extraction is idempotent.
  auto again = extract_propositions(t, backend);
  for (std::size_t i = 0; i < props.size(); ++i) {
    CHECK(again[i].prop_id == props[i].prop_id);
    CHECK(again[i].text == props[i].text);
    CHECK(render_proposition(t.documents[0].sentences[0].text, props[i].spans) == props[i].text);
  }
}

TEST_CASE("fixture spans outside the sentence surface as a backend failure") {
  Topic t = testsupport::make_topic("t", {{"d1", {"Short."}}}, {"ref"});
  FixtureExtractor backend;
  backend.add("t", "d1", 0, {{0, 50}});
  CHECK_THROWS_AS(extract_propositions(t, backend), BackendFailure);
}

TEST_CASE("reference pseudo-documents split on lines") {
  ReferenceSummary ref{"r1", "First line.\n\nSecond line."};
  auto sentences = reference_sentences(ref);
  REQUIRE(sentences.size() == 2);
  CHECK(sentences[1].text == "Second line.");
  Topic t = testsupport::make_topic("t", {{"d1", {"x"}}}, {"One.\nTwo."});
  auto props = extract_reference_propositions(t, PassthroughExtractor{});
  REQUIRE(props.size() == 2);
  CHECK(props[0].doc_id == reference_doc_id("r0"));
}
