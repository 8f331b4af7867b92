#include "propsum/fusion.h"

#include <algorithm>
#include <set>

#include "propsum/errors.h"
#include "propsum/ranking.h"
#include "propsum/stdio_process.h"

namespace propsum {
namespace {

std::string trim_copy(std::string_view s) {
  auto first = s.find_first_not_of(" \t\r\n\f\v");
  if (first == std::string_view::npos) return {};
  auto last = s.find_last_not_of(" \t\r\n\f\v");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> member_texts(const Cluster& cluster) {
  std::vector<ScoredProposition> members = cluster.members;
  sort_members(members);
  std::vector<std::string> texts;
  texts.reserve(members.size());
  for (const ScoredProposition& m : members) texts.push_back(m.proposition.text);
  return texts;
}

SummaryBullet extracted(const ScoredProposition& member, const Cluster& cluster, int rank) {
  SummaryBullet bullet;
  bullet.text = member.proposition.text;
  bullet.mode = BulletMode::kExtracted;
  bullet.cluster_id = cluster.cluster_id;
  bullet.rank = rank;
  bullet.word_count = word_count(bullet.text);
  bullet.source_prop_id = member.proposition.prop_id;
  return bullet;
}

}  // namespace

std::vector<FusionExample> derive_fusion_targets(std::span<const Cluster> clusters,
                                                 std::span<const Proposition> ref_props,
                                                 const SimilarityBackend& backend,
                                                 std::vector<std::string>* warnings) {
  std::vector<FusionExample> examples;
  if (ref_props.empty()) {
    if (warnings) warnings->push_back("no reference propositions; no fusion examples emitted");
    return examples;
  }
  std::vector<const Proposition*> refs;
  for (const Proposition& p : ref_props) refs.push_back(&p);
  std::sort(refs.begin(), refs.end(),
            [](const Proposition* a, const Proposition* b) { return a->prop_id < b->prop_id; });

  for (const Cluster& cluster : clusters) {
    if (cluster.members.empty()) continue;
    std::vector<TextPair> pairs;
    for (const Proposition* ref : refs) {
      for (const ScoredProposition& m : cluster.members) {
        pairs.emplace_back(m.proposition.text, ref->text);
        pairs.emplace_back(ref->text, m.proposition.text);
      }
    }
    std::vector<double> scores;
    try {
      scores = backend.score_pairs(pairs);
    } catch (const std::exception& e) {
      throw BackendFailure("similarity backend '" + backend.backend_id() + "' failed: " + e.what());
    }
    if (scores.size() != pairs.size()) {
      throw BackendFailure("similarity backend '" + backend.backend_id() +
                           "' returned the wrong number of scores");
    }
    const std::size_t per_ref = 2 * cluster.members.size();
    std::size_t best = 0;
    double best_mean = -1.0;
    for (std::size_t r = 0; r < refs.size(); ++r) {
      double sum = 0.0;
      for (std::size_t k = 0; k < per_ref; ++k) sum += scores[r * per_ref + k];
      double mean = sum / static_cast<double>(per_ref);
      if (mean > best_mean) {
        best_mean = mean;
        best = r;
      }
    }
    FusionExample example;
    example.topic_id = cluster.members.front().proposition.topic_id;
    example.cluster_id = cluster.cluster_id;
    example.input_props = member_texts(cluster);
    example.target_text = refs[best]->text;
    example.target_prop_id = refs[best]->prop_id;
    examples.push_back(std::move(example));
  }
  return examples;
}

std::string serialize_fusion_input(std::span<const std::string> inputs, std::string_view separator) {
  if (inputs.empty()) throw EmptyInput("fusion input has no propositions");
  std::string out;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (!separator.empty() && inputs[i].find(separator) != std::string::npos) {
      throw DataError("proposition text contains the separator '" + std::string(separator) +
                      "': " + inputs[i]);
    }
    if (i > 0) out.append(separator);
    out.append(inputs[i]);
  }
  return out;
}

std::vector<std::string> split_fusion_input(std::string_view serialized, std::string_view separator) {
  std::vector<std::string> parts;
  if (separator.empty()) {
    parts.emplace_back(serialized);
    return parts;
  }
  std::size_t pos = 0;
  while (true) {
    std::size_t next = serialized.find(separator, pos);
    if (next == std::string_view::npos) {
      parts.emplace_back(serialized.substr(pos));
      return parts;
    }
    parts.emplace_back(serialized.substr(pos, next - pos));
    pos = next + separator.size();
  }
}

std::string EchoGenerator::generate(const std::string& serialized_input) const {
  return split_fusion_input(serialized_input, separator_).front();
}

struct StdioGenerator::State {
  std::mutex mutex;
  LineProcess process;
  explicit State(std::string command) : process(std::move(command)) {}
};

StdioGenerator::StdioGenerator(std::string command)
    : state_(std::make_unique<State>(std::move(command))) {}

StdioGenerator::~StdioGenerator() = default;

std::string StdioGenerator::generate(const std::string& serialized_input) const {
  std::string line = serialized_input;
  std::replace(line.begin(), line.end(), '\n', ' ');
  std::lock_guard lock(state_->mutex);
  return state_->process.exchange(line);
}

std::string_view bullet_mode_name(BulletMode mode) {
  return mode == BulletMode::kFused ? "fused" : "extracted";
}

SummaryBullet fuse_cluster(const Cluster& cluster, int rank, const GeneratorBackend& backend,
                           std::string_view separator) {
  std::string serialized = serialize_fusion_input(member_texts(cluster), separator);
  std::string generated;
  try {
    generated = backend.generate(serialized);
  } catch (const std::exception& e) {
    throw BackendFailure("generator '" + backend.backend_id() + "' failed on cluster " +
                         cluster.cluster_id + ": " + e.what());
  }
  SummaryBullet bullet;
  bullet.text = trim_copy(generated);
  if (bullet.text.empty()) {
    throw BackendFailure("generator '" + backend.backend_id() + "' returned an empty sentence for cluster " +
                         cluster.cluster_id);
  }
  bullet.mode = BulletMode::kFused;
  bullet.cluster_id = cluster.cluster_id;
  bullet.rank = rank;
  bullet.word_count = word_count(bullet.text);
  return bullet;
}

SummaryBullet select_extractive_representative(const Cluster& cluster, int rank,
                                               std::string_view fused_text, bool stem) {
  if (cluster.members.empty()) throw EmptyInput("cluster " + cluster.cluster_id + " is empty");
  TokenizerOptions options{.stem = stem, .remove_stopwords = false};
  std::vector<std::string> fused_tokens = tokenize(fused_text, options);
  std::set<std::string> fused(fused_tokens.begin(), fused_tokens.end());

  const ScoredProposition* best = nullptr;
  std::size_t best_overlap = 0;
  for (const ScoredProposition& m : cluster.members) {
    std::vector<std::string> tokens = tokenize(m.proposition.text, options);
    std::set<std::string> distinct(tokens.begin(), tokens.end());
    std::size_t overlap = 0;
    for (const std::string& t : distinct) overlap += fused.count(t);
    bool better = best == nullptr || overlap > best_overlap ||
                  (overlap == best_overlap &&
                   (m.score > best->score ||
                    (m.score == best->score && m.proposition.prop_id < best->proposition.prop_id)));
    if (better) {
      best = &m;
      best_overlap = overlap;
    }
  }
  return extracted(*best, cluster, rank);
}

SummaryBullet representative_bullet(const Cluster& cluster, int rank) {
  return extracted(select_cluster_representative(cluster), cluster, rank);
}

}  // namespace propsum
