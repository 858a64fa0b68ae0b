#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace legalner {

/// Half-open scalar range of one token in its source text.
struct TokenOffsets {
  std::size_t start = 0;
  std::size_t end = 0;

  friend bool operator==(const TokenOffsets&, const TokenOffsets&) = default;
};

/// Whitespace-delimited words.
std::vector<TokenOffsets> whitespace_words(std::u32string_view text);

/// Word tokens used for tagging: whitespace words with leading and trailing
/// punctuation peeled off into one-character tokens. Word-internal
/// punctuation stays ("12.03.2020", "Gž-1234/20").
std::vector<TokenOffsets> word_tokenize(std::u32string_view text);

/// WordPiece pre-tokenization: whitespace split, then every punctuation
/// character becomes its own word.
std::vector<TokenOffsets> wordpiece_pretokenize(std::u32string_view text);

}  // namespace legalner
