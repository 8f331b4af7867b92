#include <doctest.h>

#include "propsum/errors.h"
#include "propsum/fusion.h"
#include "test_support.h"

using namespace propsum;
using testsupport::make_prop;
using testsupport::make_scored;

namespace {

class FixedSimilarity : public SimilarityBackend {
 public:
  explicit FixedSimilarity(std::map<std::string, double> by_ref) : by_ref_(std::move(by_ref)) {}
  std::string backend_id() const override { return "fixed"; }
  std::vector<double> score_pairs(std::span<const TextPair> pairs) const override {
    std::vector<double> out;
    for (const auto& [a, b] : pairs) {
      auto it = by_ref_.find(a);
      out.push_back(it != by_ref_.end() ? it->second : by_ref_.at(b));
    }
    return out;
  }

 private:
  std::map<std::string, double> by_ref_;
};

class EmptyGenerator : public GeneratorBackend {
 public:
  std::string backend_id() const override { return "empty"; }
  std::string generate(const std::string&) const override { return "   "; }
};

Cluster cluster_of(std::vector<ScoredProposition> members, std::string id = "c0") {
  Cluster c;
  c.cluster_id = std::move(id);
  c.members = std::move(members);
  return c;
}

}  // namespace

TEST_CASE("fusion targets pick the closest reference proposition") {
  std::vector<Cluster> clusters{cluster_of({make_scored("m1", 0.9, "d0"), make_scored("m2", 0.5, "d1")})};
  std::vector<Proposition> refs{make_prop("R1", "ref:r0", 0), make_prop("R2", "ref:r0", 1)};
  auto ex = derive_fusion_targets(clusters, refs, FixedSimilarity({{"R1", 0.8}, {"R2", 0.3}}));
  REQUIRE(ex.size() == 1);
  CHECK(ex[0].target_text == "R1");
  CHECK(ex[0].input_props == std::vector<std::string>{"m1", "m2"});

  std::vector<Proposition> one{make_prop("R2", "ref:r0", 1)};
  CHECK(derive_fusion_targets(clusters, one, FixedSimilarity({{"R2", 0.0}}))[0].target_text == "R2");

  auto tied = derive_fusion_targets(clusters, refs, FixedSimilarity({{"R1", 0.5}, {"R2", 0.5}}));
  CHECK(tied[0].target_prop_id == refs[0].prop_id);

  std::vector<std::string> warnings;
  CHECK(derive_fusion_targets(clusters, {}, FixedSimilarity({}), &warnings).empty());
  CHECK(warnings.size() == 1);
}

TEST_CASE("fusion input serialization") {
  std::vector<std::string> ab{"a", "b"};
  CHECK(serialize_fusion_input(ab) == "a<prop-sep>b");
  std::vector<std::string> a{"a"};
  CHECK(serialize_fusion_input(a) == "a");
  CHECK_THROWS_AS(serialize_fusion_input({}), EmptyInput);
  std::vector<std::string> bad{"x<prop-sep>y"};
  CHECK_THROWS_AS(serialize_fusion_input(bad), DataError);
  std::vector<std::string> three{"one two", "three", "four five six"};
  CHECK(split_fusion_input(serialize_fusion_input(three)) == three);
}

TEST_CASE("echo generator returns the highest-salience member") {
  auto c = cluster_of({make_scored("low one", 0.2, "d0"), make_scored("high one", 0.9, "d1")});
  auto bullet = fuse_cluster(c, 1, EchoGenerator{});
  CHECK(bullet.text == "high one");
  CHECK(bullet.mode == BulletMode::kFused);
  CHECK(bullet.word_count == 2);
  CHECK(bullet.cluster_id == "c0");

  auto same = cluster_of({make_scored("same text", 0.4, "d0"), make_scored("same text", 0.3, "d1")});
  CHECK(fuse_cluster(same, 1, EchoGenerator{}).text == "same text");
}

TEST_CASE("empty generator output is a backend failure") {
  auto c = cluster_of({make_scored("x", 0.2)});
  CHECK_THROWS_AS(fuse_cluster(c, 1, EmptyGenerator{}), BackendFailure);
  auto fallback = representative_bullet(c, 1);
  CHECK(fallback.mode == BulletMode::kExtracted);
  CHECK(fallback.text == "x");
}

TEST_CASE("extractive representative by token overlap") {
  auto c = cluster_of({make_scored("the ruling party won", 0.9, "d0"),
                       make_scored("hun sen won the election", 0.1, "d1")});
  auto b = select_extractive_representative(c, 1, "hun sen won the election.");
  CHECK(b.text == "hun sen won the election");
  CHECK(b.mode == BulletMode::kExtracted);
  CHECK(b.source_prop_id == c.members[1].proposition.prop_id);

  auto single = cluster_of({make_scored("anything at all", 0.1)});
  CHECK(select_extractive_representative(single, 1, "unrelated words").text == "anything at all");

  auto tie = cluster_of({make_scored("alpha beta", 0.3, "d0"), make_scored("beta alpha", 0.8, "d1")});
  CHECK(select_extractive_representative(tie, 1, "alpha beta").text == "beta alpha");
}

TEST_CASE("stdio generator speaks one line in, one line out") {
  StdioGenerator cat("cat");
  CHECK(cat.generate("first line") == "first line");
  CHECK(cat.generate("two\nlines") == "two lines");
  auto c = cluster_of({make_scored("fused text", 0.5)});
  CHECK(fuse_cluster(c, 1, cat).text == "fused text");

  StdioGenerator dead("true");
  CHECK_THROWS_AS(dead.generate("anything"), BackendFailure);
}
