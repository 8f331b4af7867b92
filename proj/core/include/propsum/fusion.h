#ifndef PROPSUM_FUSION_H_
#define PROPSUM_FUSION_H_

#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "propsum/clustering.h"
#include "propsum/propositions.h"
#include "propsum/similarity.h"

namespace propsum {

inline constexpr std::string_view kPropSeparator = "<prop-sep>";

struct FusionExample {
  std::string topic_id;
  std::string cluster_id;
  std::vector<std::string> input_props;  // member texts, (score desc, prop_id asc)
  std::string target_text;
  std::string target_prop_id;
};

// For each cluster, the reference proposition with the highest mean
// (symmetrized) similarity to all members; ties go to the smallest ref
// prop_id. With no reference propositions nothing is emitted and a warning
// is appended to `warnings`.
std::vector<FusionExample> derive_fusion_targets(std::span<const Cluster> clusters,
                                                 std::span<const Proposition> ref_props,
                                                 const SimilarityBackend& backend,
                                                 std::vector<std::string>* warnings = nullptr);

// Joins the texts with the separator. Throws EmptyInput for an empty list
// and DataError when a text contains the separator.
std::string serialize_fusion_input(std::span<const std::string> inputs,
                                   std::string_view separator = kPropSeparator);
std::vector<std::string> split_fusion_input(std::string_view serialized,
                                            std::string_view separator = kPropSeparator);

class GeneratorBackend {
 public:
  virtual ~GeneratorBackend() = default;
  virtual std::string backend_id() const = 0;
  virtual std::string generate(const std::string& serialized_input) const = 0;
};

// Returns the first (highest-salience) proposition of the input.
class EchoGenerator final : public GeneratorBackend {
 public:
  explicit EchoGenerator(std::string separator = std::string(kPropSeparator))
      : separator_(std::move(separator)) {}
  std::string backend_id() const override { return "echo"; }
  std::string generate(const std::string& serialized_input) const override;

 private:
  std::string separator_;
};

// External generator speaking the line protocol: one serialized input line
// in, one sentence line out. Newlines in the input are sent as spaces.
class StdioGenerator final : public GeneratorBackend {
 public:
  explicit StdioGenerator(std::string command);
  ~StdioGenerator() override;
  std::string backend_id() const override { return "stdio"; }
  std::string generate(const std::string& serialized_input) const override;

 private:
  struct State;
  std::unique_ptr<State> state_;
};

enum class BulletMode { kFused, kExtracted };

std::string_view bullet_mode_name(BulletMode mode);

struct SummaryBullet {
  std::string text;
  BulletMode mode = BulletMode::kFused;
  std::string cluster_id;
  int rank = 0;
  std::size_t word_count = 0;
  std::string source_prop_id;  // extracted bullets only
};

// Throws BackendFailure when the generator throws or returns only
// whitespace.
SummaryBullet fuse_cluster(const Cluster& cluster, int rank, const GeneratorBackend& backend,
                           std::string_view separator = kPropSeparator);

// Member sharing the most distinct tokens with the fused sentence; ties go
// to higher salience, then smaller prop_id.
SummaryBullet select_extractive_representative(const Cluster& cluster, int rank,
                                               std::string_view fused_text,
                                               bool stem = true);

// Extracted bullet from the highest-salience member.
SummaryBullet representative_bullet(const Cluster& cluster, int rank);

}  // namespace propsum

#endif  // PROPSUM_FUSION_H_
