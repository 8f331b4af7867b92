#ifndef PROPSUM_BACKENDS_H_
#define PROPSUM_BACKENDS_H_

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "propsum/fusion.h"
#include "propsum/propositions.h"
#include "propsum/salience.h"
#include "propsum/similarity.h"

namespace propsum {

// The four pluggable roles of the pipeline.
struct Backends {
  std::shared_ptr<const ExtractionBackend> extraction;
  std::shared_ptr<const SalienceBackend> salience;
  std::shared_ptr<const SimilarityBackend> similarity;
  std::shared_ptr<const GeneratorBackend> generator;
  std::optional<std::filesystem::path> similarity_cache;
};

// Factories by backend id. Options are the role's entry in the config's
// backend_options; relative paths inside them resolve against base_dir.
//
//   extraction: passthrough | fixture {"path"}
//   salience:   lexical | score-file {"path"}
//   similarity: lexical   (+ optional {"cache": path} for any backend)
//   generator:  echo | stdio {"command"}
class BackendRegistry {
 public:
  using Options = nlohmann::json;
  template <typename T>
  using Factory = std::function<std::shared_ptr<const T>(const Options&, const std::filesystem::path&)>;

  // Registry with the built-in backends.
  static BackendRegistry with_defaults();

  void add_extraction(std::string id, Factory<ExtractionBackend> factory);
  void add_salience(std::string id, Factory<SalienceBackend> factory);
  void add_similarity(std::string id, Factory<SimilarityBackend> factory);
  void add_generator(std::string id, Factory<GeneratorBackend> factory);

  bool has(const std::string& role, const std::string& id) const;

  // Throws ConfigError for an unknown role or id.
  Backends create(const std::map<std::string, std::string>& ids, const Options& options,
                  const std::filesystem::path& base_dir) const;

 private:
  std::map<std::string, Factory<ExtractionBackend>> extraction_;
  std::map<std::string, Factory<SalienceBackend>> salience_;
  std::map<std::string, Factory<SimilarityBackend>> similarity_;
  std::map<std::string, Factory<GeneratorBackend>> generator_;
};

}  // namespace propsum

#endif  // PROPSUM_BACKENDS_H_
