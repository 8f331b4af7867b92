#include "propsum/similarity.h"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "propsum/errors.h"
#include "propsum/hashing.h"

namespace propsum {
namespace {

std::string cache_record(const std::string& key, double score) {
  nlohmann::json record = {{"key", key}, {"score", score}};
  return record.dump() + "\n";
}

void write_all(int fd, const std::string& data, const std::filesystem::path& file) {
  ssize_t written = ::write(fd, data.data(), data.size());
  if (written < 0 || static_cast<std::size_t>(written) != data.size()) {
    throw DataError("short write to " + file.string() + ": " + std::strerror(errno));
  }
}

}  // namespace

namespace {

std::set<std::string> content_set(std::string_view text) {
  std::vector<std::string> tokens = tokenize(text, {.stem = true, .remove_stopwords = true});
  return {tokens.begin(), tokens.end()};
}

double jaccard_of(const std::set<std::string>& sa, const std::set<std::string>& sb,
                  std::string_view a, std::string_view b) {
  if (sa.empty() && sb.empty()) return a == b ? 1.0 : 0.0;
  std::size_t common = 0;
  for (const std::string& t : sa) common += sb.count(t);
  std::size_t united = sa.size() + sb.size() - common;
  return static_cast<double>(common) / static_cast<double>(united);
}

}  // namespace

double content_jaccard(std::string_view a, std::string_view b) {
  return jaccard_of(content_set(a), content_set(b), a, b);
}

std::vector<double> LexicalSimilarityBackend::score_pairs(std::span<const TextPair> pairs) const {
  std::map<std::string_view, std::set<std::string>> sets;
  auto set_of = [&](std::string_view text) -> const std::set<std::string>& {
    auto it = sets.find(text);
    if (it == sets.end()) it = sets.emplace(text, content_set(text)).first;
    return it->second;
  };
  std::vector<double> scores;
  scores.reserve(pairs.size());
  for (const auto& [a, b] : pairs) scores.push_back(jaccard_of(set_of(a), set_of(b), a, b));
  return scores;
}

std::string cache_key(std::string_view text_a, std::string_view text_b,
                      std::string_view backend_id) {
  std::string_view lo = std::min(text_a, text_b);
  std::string_view hi = std::max(text_a, text_b);
  // Length prefixes keep the encoding unambiguous.
  std::string payload;
  for (std::string_view part : {backend_id, lo, hi}) {
    payload += std::to_string(part.size());
    payload.push_back(':');
    payload.append(part);
  }
  return sha256_hex(payload);
}

SimilarityCache::SimilarityCache(std::filesystem::path file) : file_(std::move(file)) {}

void SimilarityCache::load(SimilarityCacheStats* stats) {
  entries_.clear();
  std::ifstream in(file_, std::ios::binary);
  if (!in) return;
  std::stringstream buffer;
  buffer << in.rdbuf();
  in.close();
  const std::string content = buffer.str();

  std::vector<std::string> valid_lines;
  bool partial = false;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < content.size()) {
    std::size_t nl = content.find('\n', pos);
    bool terminated = nl != std::string::npos;
    std::string line = content.substr(pos, terminated ? nl - pos : std::string::npos);
    pos = terminated ? nl + 1 : content.size();
    ++line_no;
    if (line.empty()) continue;
    try {
      auto record = nlohmann::json::parse(line);
      std::string key = record.at("key").get<std::string>();
      double score = record.at("score").get<double>();
      if (!std::isfinite(score) || score < 0.0 || score > 1.0) {
        throw std::invalid_argument("score out of range");
      }
      entries_[key] = score;
      valid_lines.push_back(line);
    } catch (const std::exception& e) {
      if (!terminated) {
        partial = true;
        spdlog::warn("similarity cache {}: skipping partial trailing record", file_.string());
        break;
      }
      spdlog::warn("similarity cache {} is corrupted at line {} ({}); ignoring it",
                   file_.string(), line_no, e.what());
      entries_.clear();
      if (stats) stats->corrupted = true;
      std::error_code ec;
      std::filesystem::rename(file_, file_.string() + ".corrupt", ec);
      if (ec) std::filesystem::remove(file_, ec);
      return;
    }
  }

  if (partial) {
    if (stats) stats->partial_trailing_record = true;
    std::filesystem::path tmp = file_.string() + ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      for (const std::string& line : valid_lines) out << line << '\n';
    }
    std::filesystem::rename(tmp, file_);
  }
}

std::optional<double> SimilarityCache::find(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void SimilarityCache::append(const std::string& key, double score) {
  entries_[key] = score;
  if (file_.has_parent_path()) std::filesystem::create_directories(file_.parent_path());
  int fd = ::open(file_.c_str(), O_WRONLY | O_APPEND | O_CREAT, 0644);
  if (fd < 0) throw DataError("cannot open " + file_.string() + ": " + std::strerror(errno));
  try {
    write_all(fd, cache_record(key, score), file_);
  } catch (...) {
    ::close(fd);
    throw;
  }
  ::close(fd);
}

SimilarityMatrix pairwise_similarity(std::span<const ScoredProposition> props,
                                     const SimilarityBackend& backend,
                                     const std::optional<std::filesystem::path>& cache_file,
                                     SimilarityCacheStats* stats) {
  if (props.empty()) throw EmptyInput("pairwise_similarity needs at least one proposition");
  SimilarityCacheStats local;
  SimilarityCacheStats& st = stats ? *stats : local;

  const std::size_t n = props.size();
  SimilarityMatrix matrix;
  matrix.backend_id = backend.backend_id();
  matrix.values.assign(n * n, 0.0);
  for (const ScoredProposition& p : props) matrix.prop_ids.push_back(p.proposition.prop_id);
  for (std::size_t i = 0; i < n; ++i) matrix.at(i, i) = 1.0;

  std::optional<SimilarityCache> cache;
  if (cache_file) {
    cache.emplace(*cache_file);
    cache->load(&st);
  }

  std::vector<std::pair<std::size_t, std::size_t>> missing;
  std::vector<std::string> missing_keys;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::string& a = props[i].proposition.text;
      const std::string& b = props[j].proposition.text;
      if (cache) {
        std::string key = cache_key(a, b, matrix.backend_id);
        if (auto hit = cache->find(key)) {
          matrix.at(i, j) = matrix.at(j, i) = *hit;
          ++st.hits;
          continue;
        }
        missing_keys.push_back(std::move(key));
      }
      missing.emplace_back(i, j);
      ++st.misses;
    }
  }
  if (missing.empty()) return matrix;

  std::vector<TextPair> pairs;
  pairs.reserve(2 * missing.size());
  for (const auto& [i, j] : missing) {
    pairs.emplace_back(props[i].proposition.text, props[j].proposition.text);
    pairs.emplace_back(props[j].proposition.text, props[i].proposition.text);
  }
  std::vector<double> scores;
  try {
    scores = backend.score_pairs(pairs);
  } catch (const std::exception& e) {
    throw BackendFailure("similarity backend '" + matrix.backend_id + "' failed: " + e.what());
  }
  st.backend_calls += pairs.size();
  if (scores.size() != pairs.size()) {
    throw BackendFailure("similarity backend '" + matrix.backend_id + "' returned " +
                         std::to_string(scores.size()) + " scores for " +
                         std::to_string(pairs.size()) + " pairs");
  }
  for (double s : scores) {
    if (!std::isfinite(s) || s < 0.0 || s > 1.0) {
      throw BackendFailure("similarity backend '" + matrix.backend_id +
                           "' returned a score outside [0,1]");
    }
  }

  for (std::size_t k = 0; k < missing.size(); ++k) {
    auto [i, j] = missing[k];
    double value = 0.5 * (scores[2 * k] + scores[2 * k + 1]);
    matrix.at(i, j) = matrix.at(j, i) = value;
    if (cache && !cache->find(missing_keys[k])) cache->append(missing_keys[k], value);
  }
  return matrix;
}

}  // namespace propsum
