#ifndef PROPSUM_TOKENIZER_H_
#define PROPSUM_TOKENIZER_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace propsum {

// Half-open character range [start, end) into some text.
struct CharSpan {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - start; }
  friend bool operator==(const CharSpan&, const CharSpan&) = default;
};

struct TokenizerOptions {
  bool stem = false;
  bool remove_stopwords = false;
};

// Tokens are maximal runs of ASCII letters and digits, lowercased. Every
// other byte is a separator. Stopword removal (when asked) happens before
// stemming.
std::vector<std::string> tokenize(std::string_view text,
                                  const TokenizerOptions& options = {});

// Character spans of the tokens produced by tokenize(text).
std::vector<CharSpan> token_spans(std::string_view text);

// Number of tokens before any stemming or stopword removal. This is the word
// count used everywhere a word limit is applied.
std::size_t word_count(std::string_view text);

bool is_stopword(std::string_view lowercase_token);

}  // namespace propsum

#endif  // PROPSUM_TOKENIZER_H_
