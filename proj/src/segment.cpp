#include "legalner/segment.hpp"

#include <algorithm>

#include "legalner/unicode.hpp"

namespace legalner {

namespace {

bool is_terminal(char32_t c) { return c == U'.' || c == U'!' || c == U'?' || c == U'…'; }

bool is_closing(char32_t c) {
  return c == U'"' || c == U'\'' || c == U')' || c == U']' || c == U'»' || c == U'”' || c == U'’' || c == U'“';
}

bool is_opening(char32_t c) { return c == U'"' || c == U'„' || c == U'«' || c == U'“' || c == U'(' || c == U'\''; }

struct Piece {
  std::size_t begin;  // first char after trimming
  std::size_t end;    // one past the last char after trimming
};

// Candidate boundaries as (end of sentence, start of next) pairs.
struct Cut {
  std::size_t end;
  std::size_t next;
};

std::vector<Cut> find_cuts(std::u32string_view t, const std::vector<std::u32string>& abbreviations) {
  std::vector<Cut> cuts;
  const std::size_t n = t.size();
  std::size_t i = 0;
  while (i < n) {
    // blank line: break, possibly with whitespace in between
    if (unicode::is_line_break(t[i])) {
      std::size_t j = i + 1;
      bool blank = false;
      while (j < n && unicode::is_space(t[j])) {
        if (unicode::is_line_break(t[j]) && !(t[j] == U'\n' && t[j - 1] == U'\r')) blank = true;
        ++j;
      }
      if (blank && j < n) cuts.push_back({i, j});
      i = j;
      continue;
    }
    if (!is_terminal(t[i])) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < n && (is_terminal(t[j]) || is_closing(t[j]))) ++j;
    std::size_t k = j;
    while (k < n && unicode::is_space(t[k])) ++k;
    if (k == j || k >= n) {
      i = j;
      continue;
    }
    std::size_t probe = k;
    if (is_opening(t[probe]) && probe + 1 < n) ++probe;
    const bool starts_sentence = unicode::is_upper(t[probe]) || unicode::is_digit(t[probe]);
    bool guarded = false;
    if (t[i] == U'.' && starts_sentence) {
      std::size_t w = i;
      while (w > 0 && !unicode::is_space(t[w - 1])) --w;
      std::u32string word = unicode::to_lower(t.substr(w, i + 1 - w));
      while (!word.empty() && is_opening(word.front())) word.erase(word.begin());
      guarded = std::find(abbreviations.begin(), abbreviations.end(), word) != abbreviations.end();
    }
    if (starts_sentence && !guarded) cuts.push_back({j, k});
    i = j;
  }
  return cuts;
}

std::vector<std::u32string> lowered(const SplitterOptions& options) {
  std::vector<std::u32string> out;
  for (const auto& a : options.abbreviations) out.push_back(unicode::to_lower(unicode::decode(a)));
  return out;
}

std::vector<Piece> pieces(std::u32string_view t, const std::vector<Cut>& cuts) {
  std::vector<Piece> out;
  std::size_t begin = 0;
  auto emit = [&](std::size_t b, std::size_t e) {
    while (b < e && unicode::is_space(t[b])) ++b;
    while (e > b && unicode::is_space(t[e - 1])) --e;
    if (b < e) out.push_back({b, e});
  };
  for (const Cut& c : cuts) {
    emit(begin, c.end);
    begin = c.next;
  }
  emit(begin, t.size());
  return out;
}

std::u32string flatten(std::u32string_view t) {
  std::u32string out(t);
  for (char32_t& c : out)
    if (unicode::is_line_break(c)) c = U' ';
  return out;
}

}  // namespace

std::vector<std::string> segment_sentences(std::string_view text, const SplitterOptions& options) {
  const std::u32string t = unicode::decode(text);
  std::vector<std::string> out;
  for (const Piece& p : pieces(t, find_cuts(t, lowered(options))))
    out.push_back(unicode::encode(flatten(std::u32string_view(t).substr(p.begin, p.end - p.begin))));
  return out;
}

Document segment_document(const Document& document, const SplitterOptions& options) {
  const auto abbreviations = lowered(options);
  Document out;
  out.id = document.id;
  out.script = document.script;
  for (const Sentence& sentence : document.sentences) {
    const std::u32string t = unicode::decode(sentence.text);
    std::vector<Cut> cuts = find_cuts(t, abbreviations);
    std::erase_if(cuts, [&](const Cut& c) {
      return std::any_of(sentence.spans.begin(), sentence.spans.end(),
                         [&](const CharSpan& s) { return s.start < c.next && s.end > c.end; });
    });
    for (const Piece& p : pieces(t, cuts)) {
      Sentence piece;
      piece.text = unicode::encode(flatten(std::u32string_view(t).substr(p.begin, p.end - p.begin)));
      for (const CharSpan& s : sentence.spans) {
        if (s.start >= p.begin && s.end <= p.end) piece.spans.push_back({s.start - p.begin, s.end - p.begin, s.entity});
      }
      out.sentences.push_back(std::move(piece));
    }
  }
  return out;
}

}  // namespace legalner
