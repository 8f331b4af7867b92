#include "propsum/backends.h"

#include "propsum/errors.h"

namespace propsum {
namespace {

std::filesystem::path option_path(const nlohmann::json& options, const char* key,
                                  const std::filesystem::path& base_dir, const std::string& who) {
  if (!options.is_object() || !options.contains(key) || !options.at(key).is_string()) {
    throw ConfigError(who + " needs a string option '" + key + "'");
  }
  std::filesystem::path p = options.at(key).get<std::string>();
  return p.is_relative() ? base_dir / p : p;
}

template <typename T>
std::shared_ptr<const T> build(const std::map<std::string, BackendRegistry::Factory<T>>& factories,
                               const std::string& role, const std::map<std::string, std::string>& ids,
                               const nlohmann::json& options, const std::filesystem::path& base_dir) {
  auto id = ids.find(role);
  if (id == ids.end()) throw ConfigError("no backend configured for role '" + role + "'");
  auto factory = factories.find(id->second);
  if (factory == factories.end()) {
    throw ConfigError("unknown " + role + " backend '" + id->second + "'");
  }
  nlohmann::json role_options = options.is_object() && options.contains(role)
                                    ? options.at(role)
                                    : nlohmann::json::object();
  return factory->second(role_options, base_dir);
}

}  // namespace

BackendRegistry BackendRegistry::with_defaults() {
  BackendRegistry r;
  r.add_extraction("passthrough", [](const Options&, const std::filesystem::path&) {
    return std::make_shared<const PassthroughExtractor>();
  });
  r.add_extraction("fixture", [](const Options& o, const std::filesystem::path& base) {
    return std::make_shared<const FixtureExtractor>(
        FixtureExtractor::from_file(option_path(o, "path", base, "fixture extractor")));
  });
  r.add_salience("lexical", [](const Options&, const std::filesystem::path&) {
    return std::make_shared<const LexicalSalienceBackend>();
  });
  r.add_salience("score-file", [](const Options& o, const std::filesystem::path& base) {
    return std::make_shared<const ScoreFileSalienceBackend>(
        ScoreFileSalienceBackend::from_file(option_path(o, "path", base, "score-file salience")));
  });
  r.add_similarity("lexical", [](const Options&, const std::filesystem::path&) {
    return std::make_shared<const LexicalSimilarityBackend>();
  });
  r.add_generator("echo", [](const Options&, const std::filesystem::path&) {
    return std::make_shared<const EchoGenerator>();
  });
  r.add_generator("stdio", [](const Options& o, const std::filesystem::path&) {
    if (!o.is_object() || !o.contains("command") || !o.at("command").is_string()) {
      throw ConfigError("stdio generator needs a string option 'command'");
    }
    return std::make_shared<const StdioGenerator>(o.at("command").get<std::string>());
  });
  return r;
}

void BackendRegistry::add_extraction(std::string id, Factory<ExtractionBackend> factory) {
  extraction_[std::move(id)] = std::move(factory);
}
void BackendRegistry::add_salience(std::string id, Factory<SalienceBackend> factory) {
  salience_[std::move(id)] = std::move(factory);
}
void BackendRegistry::add_similarity(std::string id, Factory<SimilarityBackend> factory) {
  similarity_[std::move(id)] = std::move(factory);
}
void BackendRegistry::add_generator(std::string id, Factory<GeneratorBackend> factory) {
  generator_[std::move(id)] = std::move(factory);
}

bool BackendRegistry::has(const std::string& role, const std::string& id) const {
  if (role == "extraction") return extraction_.count(id) > 0;
  if (role == "salience") return salience_.count(id) > 0;
  if (role == "similarity") return similarity_.count(id) > 0;
  if (role == "generator") return generator_.count(id) > 0;
  return false;
}

Backends BackendRegistry::create(const std::map<std::string, std::string>& ids,
                                 const Options& options,
                                 const std::filesystem::path& base_dir) const {
  for (const auto& [role, id] : ids) {
    if (role != "extraction" && role != "salience" && role != "similarity" && role != "generator") {
      throw ConfigError("unknown backend role '" + role + "'");
    }
  }
  Backends b;
  b.extraction = build(extraction_, "extraction", ids, options, base_dir);
  b.salience = build(salience_, "salience", ids, options, base_dir);
  b.similarity = build(similarity_, "similarity", ids, options, base_dir);
  b.generator = build(generator_, "generator", ids, options, base_dir);
  if (options.is_object() && options.contains("similarity") &&
      options.at("similarity").is_object() && options.at("similarity").contains("cache")) {
    b.similarity_cache = option_path(options.at("similarity"), "cache", base_dir, "similarity");
  }
  return b;
}

}  // namespace propsum
