#include "propsum/tokenizer.h"

#include <algorithm>
#include <iterator>

#include "propsum/porter_stemmer.h"

namespace propsum {
namespace {

bool is_token_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9');
}

char ascii_lower(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

// Sorted. Function words only; single letters are deliberately absent so
// one-letter content tokens survive.
constexpr std::string_view kStopwords[] = {
    "about",   "above",   "after",   "again",   "against", "all",
    "am",      "an",      "and",     "any",     "are",     "as",
    "at",      "be",      "because", "been",    "before",  "being",
    "below",   "between", "both",    "but",     "by",      "can",
    "could",   "did",     "do",      "does",    "doing",   "down",
    "during",  "each",    "few",     "for",     "from",    "further",
    "had",     "has",     "have",    "having",  "he",      "her",
    "here",    "hers",    "herself", "him",     "himself", "his",
    "how",     "if",      "in",      "into",    "is",      "it",
    "its",     "itself",  "just",    "me",      "more",    "most",
    "my",      "myself",  "no",      "nor",     "not",     "now",
    "of",      "off",     "on",      "once",    "only",    "or",
    "other",   "our",     "ours",    "out",     "over",    "own",
    "same",    "she",     "should",  "so",      "some",    "such",
    "than",    "that",    "the",     "their",   "them",    "then",
    "there",   "these",   "they",    "this",    "those",   "through",
    "to",      "too",     "under",   "until",   "up",      "very",
    "was",     "we",      "were",    "what",    "when",    "where",
    "which",   "while",   "who",     "whom",    "why",     "will",
    "with",    "would",   "you",     "your"};

}  // namespace

bool is_stopword(std::string_view lowercase_token) {
  return std::binary_search(std::begin(kStopwords), std::end(kStopwords),
                            lowercase_token);
}

std::vector<CharSpan> token_spans(std::string_view text) {
  std::vector<CharSpan> spans;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && !is_token_char(text[i])) ++i;
    if (i == text.size()) break;
    std::size_t start = i;
    while (i < text.size() && is_token_char(text[i])) ++i;
    spans.push_back({start, i});
  }
  return spans;
}

std::vector<std::string> tokenize(std::string_view text,
                                  const TokenizerOptions& options) {
  std::vector<std::string> tokens;
  for (const CharSpan& span : token_spans(text)) {
    std::string token(text.substr(span.start, span.length()));
    std::transform(token.begin(), token.end(), token.begin(), ascii_lower);
    if (options.remove_stopwords && is_stopword(token)) continue;
    tokens.push_back(options.stem ? porter_stem(token) : std::move(token));
  }
  return tokens;
}

std::size_t word_count(std::string_view text) {
  return token_spans(text).size();
}

}  // namespace propsum
