#include "propsum/salience.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "propsum/errors.h"
#include "propsum/greedy.h"

namespace propsum {
namespace {

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n) by rejection, for n >= 1.
std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

std::vector<std::string> content_tokens(std::string_view text) {
  return tokenize(text, {.stem = true, .remove_stopwords = true});
}

struct TopicStatistics {
  std::size_t documents = 0;
  std::vector<std::unordered_set<std::string>> doc_terms;
  std::unordered_map<std::string, double> idf;
  std::unordered_map<std::string, double> centroid;
  double centroid_norm = 0.0;
};

TopicStatistics topic_statistics(const Topic& topic) {
  TopicStatistics stats;
  stats.documents = topic.documents.size();
  std::unordered_map<std::string, double> tf;
  std::unordered_map<std::string, std::size_t> df;
  for (const Document& doc : topic.documents) {
    std::unordered_set<std::string> terms;
    for (const Sentence& sentence : doc.sentences) {
      for (std::string& token : content_tokens(sentence.text)) {
        tf[token] += 1.0;
        terms.insert(std::move(token));
      }
    }
    for (const std::string& term : terms) ++df[term];
    stats.doc_terms.push_back(std::move(terms));
  }
  const double d = static_cast<double>(stats.documents);
  for (const auto& [term, count] : df) {
    stats.idf[term] = 1.0 + std::log((1.0 + d) / (1.0 + static_cast<double>(count)));
  }
  double norm2 = 0.0;
  for (const auto& [term, count] : tf) {
    double w = count * stats.idf[term];
    stats.centroid[term] = w;
    norm2 += w * w;
  }
  stats.centroid_norm = std::sqrt(norm2);
  return stats;
}

double lexical_salience(const TopicStatistics& stats, std::string_view text) {
  std::vector<std::string> tokens = content_tokens(text);
  if (tokens.empty() || stats.documents == 0) return 0.0;

  std::unordered_set<std::string> distinct(tokens.begin(), tokens.end());
  std::size_t df = 0;
  for (const auto& terms : stats.doc_terms) {
    std::size_t hit = 0;
    for (const std::string& t : distinct) hit += terms.count(t);
    if (2 * hit >= distinct.size()) ++df;
  }

  std::unordered_map<std::string, double> tf;
  for (const std::string& t : tokens) tf[t] += 1.0;
  double dot = 0.0;
  double norm2 = 0.0;
  for (const auto& [term, count] : tf) {
    auto idf = stats.idf.find(term);
    // Terms absent from the documents get the idf of a df = 0 term.
    double w = count * (idf != stats.idf.end()
                            ? idf->second
                            : 1.0 + std::log(1.0 + static_cast<double>(stats.documents)));
    norm2 += w * w;
    auto c = stats.centroid.find(term);
    if (c != stats.centroid.end()) dot += w * c->second;
  }
  double cosine = 0.0;
  if (norm2 > 0.0 && stats.centroid_norm > 0.0) {
    cosine = dot / (std::sqrt(norm2) * stats.centroid_norm);
  }
  double score = 0.5 * static_cast<double>(df) / static_cast<double>(stats.documents) +
                 0.5 * cosine;
  return std::clamp(score, 0.0, 1.0);
}

std::size_t sentences_words(const std::vector<std::string>& sentences) {
  std::size_t n = 0;
  for (const std::string& s : sentences) n += word_count(s);
  return n;
}

std::string marked_sentence(const Proposition& candidate, std::string_view text,
                            const ContextDelimiters& delimiters) {
  std::string out;
  std::size_t cursor = 0;
  for (const CharSpan& span : candidate.spans) {
    out.append(text.substr(cursor, span.start - cursor));
    out.append(delimiters.prop_open);
    out.append(text.substr(span.start, span.length()));
    out.append(delimiters.prop_close);
    cursor = span.end;
  }
  out.append(text.substr(cursor));
  return out;
}

}  // namespace

SalienceLabelSet derive_salience_labels(const Topic& topic,
                                        std::span<const Proposition> propositions,
                                        const RougeConfig& cfg) {
  if (propositions.empty()) throw NoPropositions();
  std::vector<std::string> texts;
  texts.reserve(propositions.size());
  for (const Proposition& p : propositions) texts.push_back(p.text);

  RougeScorer scorer(topic.reference_texts(), cfg);
  GreedyResult greedy = greedy_select(texts, scorer, cfg.max_words);

  SalienceLabelSet labels;
  labels.topic_id = topic.topic_id;
  std::vector<bool> chosen(propositions.size(), false);
  for (std::size_t i : greedy.selected) {
    chosen[i] = true;
    labels.selection_order.push_back(propositions[i].prop_id);
  }
  for (std::size_t i = 0; i < propositions.size(); ++i) {
    (chosen[i] ? labels.positives : labels.negatives).insert(propositions[i].prop_id);
  }
  // A prop_id both selected and rejected can only come from duplicate ids.
  for (const std::string& id : labels.positives) labels.negatives.erase(id);
  return labels;
}

BalancedTrainingSet balance_training_set(const SalienceLabelSet& labels, std::uint64_t seed,
                                         double keep_probability) {
  BalancedTrainingSet out;
  if (labels.positives.empty()) {
    out.warning = true;
    out.warning_message = "topic " + labels.topic_id + " has no positive propositions";
    return out;
  }

  std::mt19937_64 rng(seed);
  std::vector<std::string> kept;
  for (const std::string& id : labels.negatives) {
    if (uniform01(rng) < keep_probability) kept.push_back(id);
  }
  out.kept_negatives = kept.size();

  std::vector<std::string> positives(labels.positives.begin(), labels.positives.end());
  if (kept.empty()) {
    out.warning = true;
    out.warning_message = "topic " + labels.topic_id + " kept no negatives; set is unbalanced";
  }
  std::size_t target = std::max(positives.size(), kept.size());
  for (std::size_t i = 0; i < target; ++i) {
    out.instances.push_back({positives[i % positives.size()], 1});
  }
  if (!kept.empty()) {
    for (std::size_t i = 0; i < target; ++i) out.instances.push_back({kept[i % kept.size()], 0});
  }

  for (std::size_t i = out.instances.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(uniform_index(rng, i));
    std::swap(out.instances[i - 1], out.instances[j]);
  }
  return out;
}

ContextWindow build_context_window(const Proposition& candidate, const Topic& topic, int budget) {
  ContextWindow window;
  window.candidate = candidate;
  window.token_budget = budget;
  const std::size_t own_position = topic.document_position(candidate.doc_id);
  const Document& own = topic.documents[own_position];
  const std::size_t cap = static_cast<std::size_t>(kContextSentencesPerDocument);

  const std::size_t limit = budget > 0 ? static_cast<std::size_t>(budget) : 0;
  const std::size_t candidate_index = static_cast<std::size_t>(candidate.sent_index);
  window.candidate_sentence = own.sentences.at(candidate_index).text;
  // The candidate sentence is always serialized, so it is charged first.
  std::size_t used = word_count(window.candidate_sentence);
  for (std::size_t i = 0; i < own.sentences.size() && i < cap; ++i) {
    std::size_t words = i == candidate_index ? 0 : word_count(own.sentences[i].text);
    if (used + words > limit) break;
    window.own_doc_sentences.push_back(own.sentences[i].text);
    used += words;
  }

  std::vector<const Document*> others;
  for (std::size_t d = 0; d < topic.documents.size(); ++d) {
    if (d != own_position) others.push_back(&topic.documents[d]);
  }
  if (others.empty()) return window;

  std::size_t remaining = limit > used ? limit - used : 0;
  std::size_t share = remaining / others.size();
  std::vector<std::size_t> taken(others.size(), 0);
  for (std::size_t k = 0; k < others.size(); ++k) {
    window.other_docs.emplace_back(others[k]->doc_id, std::vector<std::string>{});
    std::size_t spent = 0;
    const auto& sentences = others[k]->sentences;
    while (taken[k] < sentences.size() && taken[k] < cap) {
      std::size_t words = word_count(sentences[taken[k]].text);
      if (spent + words > share) break;
      window.other_docs[k].second.push_back(sentences[taken[k]].text);
      spent += words;
      ++taken[k];
    }
    remaining -= spent;
  }

  bool progress = true;
  while (progress) {
    progress = false;
    for (std::size_t k = 0; k < others.size(); ++k) {
      const auto& sentences = others[k]->sentences;
      if (taken[k] >= sentences.size() || taken[k] >= cap) continue;
      std::size_t words = word_count(sentences[taken[k]].text);
      if (words > remaining) continue;
      window.other_docs[k].second.push_back(sentences[taken[k]].text);
      remaining -= words;
      ++taken[k];
      progress = true;
    }
  }
  return window;
}

std::size_t window_token_count(const ContextWindow& window) {
  std::size_t n = sentences_words(window.own_doc_sentences);
  if (static_cast<std::size_t>(window.candidate.sent_index) >= window.own_doc_sentences.size()) {
    n += word_count(window.candidate_sentence);
  }
  for (const auto& [doc_id, sentences] : window.other_docs) n += sentences_words(sentences);
  return n;
}

std::string serialize_context_window(const ContextWindow& window,
                                     const ContextDelimiters& delimiters) {
  std::vector<std::string> own = window.own_doc_sentences;
  std::size_t index = static_cast<std::size_t>(window.candidate.sent_index);
  std::string marked = marked_sentence(window.candidate, window.candidate_sentence, delimiters);
  if (index < own.size()) {
    own[index] = std::move(marked);
  } else {
    own.push_back(std::move(marked));
  }

  auto join = [&](const std::vector<std::string>& sentences) {
    std::string s;
    for (std::size_t i = 0; i < sentences.size(); ++i) {
      if (i > 0) s += delimiters.sent_sep;
      s += sentences[i];
    }
    return s;
  };
  std::string out = join(own);
  for (const auto& [doc_id, sentences] : window.other_docs) {
    out += delimiters.doc_sep;
    out += join(sentences);
  }
  return out;
}

std::vector<double> LexicalSalienceBackend::score_batch(
    const Topic& topic, std::span<const ContextWindow> windows) const {
  TopicStatistics stats = topic_statistics(topic);
  std::vector<double> scores;
  scores.reserve(windows.size());
  for (const ContextWindow& w : windows) scores.push_back(lexical_salience(stats, w.candidate.text));
  return scores;
}

ScoreFileSalienceBackend ScoreFileSalienceBackend::from_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw MissingFile(file.string());
  ScoreFileSalienceBackend backend;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto record = nlohmann::json::parse(text);
      backend.set(record.at("prop_id").get<std::string>(), record.at("score").get<double>());
    } catch (const nlohmann::json::exception& e) {
      throw SchemaViolation(line, "<record>", e.what());
    }
  }
  return backend;
}

std::vector<double> ScoreFileSalienceBackend::score_batch(
    const Topic&, std::span<const ContextWindow> windows) const {
  std::vector<double> scores;
  scores.reserve(windows.size());
  for (const ContextWindow& w : windows) {
    auto it = scores_.find(w.candidate.prop_id);
    if (it == scores_.end()) throw BackendFailure("no score for " + w.candidate.prop_id);
    scores.push_back(it->second);
  }
  return scores;
}

std::vector<ScoredProposition> score_propositions(std::span<const Proposition> props,
                                                  const Topic& topic,
                                                  const SalienceBackend& backend, int budget,
                                                  std::size_t batch_size) {
  std::vector<ScoredProposition> out;
  out.reserve(props.size());
  if (batch_size == 0) batch_size = 1;
  for (std::size_t begin = 0, batch = 0; begin < props.size(); begin += batch_size, ++batch) {
    std::size_t end = std::min(props.size(), begin + batch_size);
    std::vector<ContextWindow> windows;
    windows.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) {
      windows.push_back(build_context_window(props[i], topic, budget));
    }
    std::vector<double> scores;
    std::string where = "salience backend '" + backend.backend_id() + "' batch " +
                        std::to_string(batch);
    try {
      scores = backend.score_batch(topic, windows);
    } catch (const std::exception& e) {
      throw BackendFailure(where + ": " + e.what());
    }
    if (scores.size() != windows.size()) {
      throw BackendFailure(where + ": expected " + std::to_string(windows.size()) +
                           " scores, got " + std::to_string(scores.size()));
    }
    for (std::size_t i = begin; i < end; ++i) {
      double s = scores[i - begin];
      if (!std::isfinite(s) || s < 0.0 || s > 1.0) {
        throw BackendFailure(where + ": score out of [0,1] for " + props[i].prop_id);
      }
      out.push_back({props[i], s});
    }
  }
  return out;
}

std::vector<ScoredProposition> filter_by_threshold(std::span<const ScoredProposition> scored,
                                                   double tau) {
  std::vector<ScoredProposition> kept;
  for (const ScoredProposition& s : scored) {
    if (s.score >= tau) kept.push_back(s);
  }
  return kept;
}

}  // namespace propsum
