#include "legalner/tokens.hpp"

#include "legalner/unicode.hpp"

namespace legalner {

std::vector<TokenOffsets> whitespace_words(std::u32string_view text) {
  std::vector<TokenOffsets> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && unicode::is_space(text[i])) ++i;
    if (i >= text.size()) break;
    std::size_t j = i;
    while (j < text.size() && !unicode::is_space(text[j])) ++j;
    out.push_back({i, j});
    i = j;
  }
  return out;
}

std::vector<TokenOffsets> word_tokenize(std::u32string_view text) {
  std::vector<TokenOffsets> out;
  for (const TokenOffsets& w : whitespace_words(text)) {
    std::size_t b = w.start, e = w.end;
    while (b < e && unicode::is_punct(text[b])) {
      out.push_back({b, b + 1});
      ++b;
    }
    std::size_t core_end = e;
    while (core_end > b && unicode::is_punct(text[core_end - 1])) --core_end;
    if (b < core_end) out.push_back({b, core_end});
    for (std::size_t k = core_end; k < e; ++k) out.push_back({k, k + 1});
  }
  return out;
}

std::vector<TokenOffsets> wordpiece_pretokenize(std::u32string_view text) {
  std::vector<TokenOffsets> out;
  for (const TokenOffsets& w : whitespace_words(text)) {
    std::size_t run = w.start;
    for (std::size_t k = w.start; k < w.end; ++k) {
      if (!unicode::is_punct(text[k])) continue;
      if (run < k) out.push_back({run, k});
      out.push_back({k, k + 1});
      run = k + 1;
    }
    if (run < w.end) out.push_back({run, w.end});
  }
  return out;
}

}  // namespace legalner
