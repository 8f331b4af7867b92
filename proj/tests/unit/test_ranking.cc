#include <doctest.h>

#include <algorithm>
#include <random>

#include "propsum/errors.h"
#include "propsum/ranking.h"
#include "test_support.h"

using namespace propsum;
using doctest::Approx;
using testsupport::make_scored;

namespace {

Cluster with_features(std::string id, std::size_t size, int min_position, double max_salience = 0.5) {
  Cluster c;
  c.cluster_id = std::move(id);
  c.members.push_back(make_scored("x", max_salience, c.cluster_id));
  c.features.size = size;
  c.features.min_position = min_position;
  c.features.max_salience = max_salience;
  return c;
}

std::vector<std::string> ids(const std::vector<Cluster>& clusters) {
  std::vector<std::string> out;
  for (const auto& c : clusters) out.push_back(c.cluster_id);
  return out;
}

SimilarityMatrix matrix_for(const Cluster& c, double off_diagonal) {
  return testsupport::matrix_from(c.members, [&](std::size_t, std::size_t) { return off_diagonal; });
}

}  // namespace

TEST_CASE("features of a singleton") {
  Cluster c;
  c.cluster_id = "c0";
  c.members = {make_scored("the cat sat", 0.4, "d0", 7)};
  auto f = compute_features(c, matrix_for(c, 0.0), RougeConfig{});
  CHECK(f.size == 1);
  CHECK(f.avg_rouge == 0.0);
  CHECK(f.avg_similarity == 0.0);
  CHECK(f.avg_salience == Approx(0.4));
  CHECK(f.max_salience == Approx(0.4));
  CHECK(f.min_position == 7);
}

TEST_CASE("features of two identical members") {
  Cluster c;
  c.cluster_id = "c0";
  c.members = {make_scored("the storm hit", 0.8, "d0", 5), make_scored("the storm hit", 0.6, "d1", 2)};
  auto f = compute_features(c, matrix_for(c, 0.9), RougeConfig{});
  CHECK(f.avg_rouge == Approx(1.0));
  CHECK(f.avg_salience == Approx(0.7));
  CHECK(f.max_salience == Approx(0.8));
  CHECK(f.avg_similarity == Approx(0.9));
  CHECK(f.min_position == 2);
  CHECK(f.size == 2);
}

TEST_CASE("avg rouge is the mean pairwise ROUGE-1 F1") {
  Cluster c;
  c.cluster_id = "c0";
  c.members = {make_scored("a b c", 0.5, "d0"), make_scored("a b d", 0.5, "d1"),
               make_scored("x y z", 0.5, "d2")};
  auto f = compute_features(c, matrix_for(c, 0.0), RougeConfig{});
  // Pairs: 2/3, 0, 0.
  CHECK(f.avg_rouge == Approx((2.0 / 3) / 3));
  auto r12 = compute_features(c, matrix_for(c, 0.0), RougeConfig{}, true);
  // With R2 averaged in: (2/3 + 1/2) / 2 for the first pair.
  CHECK(r12.avg_rouge == Approx(((2.0 / 3 + 0.5) / 2) / 3));
}

TEST_CASE("size then min position") {
  std::vector<Cluster> clusters{with_features("a", 3, 5), with_features("b", 3, 2), with_features("c", 2, 0)};
  auto ranked = rank_clusters(clusters, RankingConfig{});
  CHECK(ids(ranked) == std::vector<std::string>{"b", "a", "c"});
}

TEST_CASE("cap at max clusters") {
  std::vector<Cluster> clusters;
  for (int i = 0; i < 15; ++i) clusters.push_back(with_features("c" + std::to_string(i), 1 + i % 4, i));
  CHECK(rank_clusters(clusters, RankingConfig{}).size() == 10);
  RankingConfig three;
  three.max_clusters = 3;
  CHECK(rank_clusters(clusters, three).size() == 3);
}

TEST_CASE("full ties fall back to max salience then cluster id") {
  std::vector<Cluster> clusters{with_features("c2", 2, 1), with_features("c0", 2, 1), with_features("c1", 2, 1)};
  CHECK(ids(rank_clusters(clusters, RankingConfig{})) == std::vector<std::string>{"c0", "c1", "c2"});
  clusters[2].features.max_salience = 0.9;
  CHECK(ids(rank_clusters(clusters, RankingConfig{})) == std::vector<std::string>{"c1", "c0", "c2"});
}

TEST_CASE("ranking config validation and feature names") {
  RankingConfig same;
  same.secondary_feature = RankFeature::kSize;
  CHECK_THROWS_AS(same.validate(), ConfigError);
  RankingConfig zero;
  zero.max_clusters = 0;
  CHECK_THROWS_AS(zero.validate(), ConfigError);
  for (RankFeature f : kRankFeatures) CHECK(parse_rank_feature(rank_feature_name(f)) == f);
  CHECK_THROWS_AS(parse_rank_feature("bogus"), ConfigError);
}

TEST_CASE("representative selection") {
  Cluster c;
  c.members = {make_scored("a", 0.3, "d1"), make_scored("b", 0.9, "d2")};
  CHECK(select_cluster_representative(c).proposition.text == "b");
  Cluster single;
  single.members = {make_scored("only", 0.1)};
  CHECK(select_cluster_representative(single).proposition.text == "only");
  Cluster tied;
  tied.members = {make_scored("later", 0.5, "d9"), make_scored("first", 0.5, "d1")};
  CHECK(select_cluster_representative(tied).proposition.text == "first");
}

TEST_CASE("property: ranking ignores input order") {
  std::mt19937 rng(51);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Cluster> clusters;
    for (int i = 0; i < 8; ++i) {
      Cluster c = with_features("c" + std::to_string(i), 1 + rng() % 3, static_cast<int>(rng() % 3),
                                (rng() % 3) / 3.0);
      c.features.avg_rouge = (rng() % 3) / 3.0;
      c.features.avg_similarity = (rng() % 3) / 3.0;
      c.features.avg_salience = (rng() % 3) / 3.0;
      clusters.push_back(c);
    }
    for (RankFeature p : kRankFeatures) {
      for (RankFeature s : kRankFeatures) {
        if (p == s) continue;
        RankingConfig cfg;
        cfg.primary_feature = p;
        cfg.secondary_feature = s;
        auto base = ids(rank_clusters(clusters, cfg));
        auto shuffled = clusters;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        CHECK(ids(rank_clusters(shuffled, cfg)) == base);
      }
    }
  }
}
