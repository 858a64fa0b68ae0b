#include "legalner/wordpiece.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "legalner/error.hpp"
#include "legalner/unicode.hpp"

namespace legalner {

Vocab::Vocab(std::vector<std::string> pieces, VocabOptions options) : pieces_(std::move(pieces)), options_(std::move(options)) {
  if (options_.continuation_prefix.empty()) throw ParameterError("vocab: continuation prefix must be non-empty");
  if (options_.max_sequence_length < 2) throw ParameterError("vocab: max sequence length must be at least 2");
  for (std::size_t i = 0; i < pieces_.size(); ++i) ids_.emplace(pieces_[i], i);  // first occurrence wins
  if (!ids_.contains(options_.unknown_token))
    throw ParameterError("vocab: unknown token '" + options_.unknown_token + "' missing");
}

Vocab Vocab::parse(std::string_view text, VocabOptions options) {
  std::vector<std::string> pieces;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string line(text.substr(pos, nl - pos));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    try {
      unicode::decode(line);
    } catch (const ParseError&) {
      throw ParseError("vocab: invalid UTF-8", pieces.size() + 1, 1);
    }
    pieces.push_back(std::move(line));
    pos = nl + 1;
  }
  return Vocab(std::move(pieces), std::move(options));
}

Vocab Vocab::load(const std::string& path, VocabOptions options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open vocab '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), std::move(options));
}

std::string Vocab::serialize() const {
  std::string out;
  for (const auto& p : pieces_) {
    out += p;
    out += '\n';
  }
  return out;
}

std::optional<std::size_t> Vocab::id(std::string_view piece) const {
  auto it = ids_.find(std::string(piece));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

Vocab build_vocab(const Corpus& corpus, const VocabBuildOptions& build, VocabOptions options) {
  std::map<std::u32string, std::size_t> words;
  for (const auto& d : corpus.documents)
    for (const auto& s : d.sentences) {
      const std::u32string text = unicode::decode(s.text);
      for (const auto& w : wordpiece_pretokenize(text)) ++words[text.substr(w.start, w.end - w.start)];
    }

  const std::string& prefix = options.continuation_prefix;
  std::vector<std::string> pieces = {options.unknown_token, "[CLS]", "[SEP]", "[PAD]", "[MASK]"};
  std::set<std::string> seen(pieces.begin(), pieces.end());
  auto add = [&](const std::string& p) {
    if (seen.insert(p).second) pieces.push_back(p);
  };

  std::set<char32_t> chars;
  for (const auto& [w, n] : words) chars.insert(w.begin(), w.end());
  for (char32_t c : chars) add(unicode::encode(c));
  for (char32_t c : chars) add(prefix + unicode::encode(c));

  std::map<std::string, std::size_t> candidates;
  for (const auto& [w, n] : words) {
    candidates[unicode::encode(w)] += n;
    for (std::size_t len = 2; len <= 4 && len < w.size(); ++len) {
      candidates[unicode::encode(w.substr(0, len))] += n;
      candidates[prefix + unicode::encode(w.substr(w.size() - len))] += n;
    }
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(candidates.begin(), candidates.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  for (const auto& [piece, n] : ranked) {
    if (pieces.size() >= build.max_size) break;
    if (n < build.min_frequency) continue;
    add(piece);
  }
  return Vocab(std::move(pieces), std::move(options));
}

TokenizedSentence wordpiece_tokenize(std::string_view text, const Vocab& vocab) {
  const std::u32string t = unicode::decode(text);
  const auto& opts = vocab.options();
  TokenizedSentence out;
  for (const TokenOffsets& w : wordpiece_pretokenize(t)) {
    const std::size_t n = w.end - w.start;
    std::vector<std::string> pieces;
    std::vector<TokenOffsets> offsets;
    bool unknown = n > opts.max_word_chars;
    std::size_t start = 0;
    while (!unknown && start < n) {
      std::size_t end = n;
      std::optional<std::string> match;
      while (start < end) {
        std::string candidate = unicode::encode(std::u32string_view(t).substr(w.start + start, end - start));
        if (start > 0) candidate = opts.continuation_prefix + candidate;
        if (vocab.contains(candidate)) {
          match = std::move(candidate);
          break;
        }
        --end;
      }
      if (!match) {
        unknown = true;
        break;
      }
      pieces.push_back(std::move(*match));
      offsets.push_back({w.start + start, w.start + end});
      start = end;
    }
    if (unknown) {
      out.pieces.push_back(opts.unknown_token);
      out.offsets.push_back(w);
    } else {
      out.pieces.insert(out.pieces.end(), pieces.begin(), pieces.end());
      out.offsets.insert(out.offsets.end(), offsets.begin(), offsets.end());
    }
  }
  return out;
}

TokenizedSentence align_labels_to_tokens(TokenizedSentence tokenized, std::span<const CharSpan> spans,
                                         TagScheme scheme) {
  tokenized.labels = encode_labels(tokenized.offsets, spans, scheme);
  return tokenized;
}

std::vector<TokenizedSentence> chunk_sequences(const TokenizedSentence& tokenized, const Vocab& vocab) {
  const std::size_t max_len = vocab.options().max_sequence_length;
  const std::size_t n = tokenized.size();

  // entity_of[i] = index of the entity covering token i, or npos
  constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::vector<std::size_t> entity_of(n, npos);
  if (tokenized.labels) {
    std::vector<TokenOffsets> positions(n);
    for (std::size_t i = 0; i < n; ++i) positions[i] = {i, i + 1};
    // the scheme only matters for IO merging; BIES accepts every prefix
    std::size_t e = 0;
    for (const CharSpan& s : decode_labels(*tokenized.labels, positions, TagScheme::BIES)) {
      for (std::size_t i = s.start; i < s.end; ++i) entity_of[i] = e;
      ++e;
    }
  }
  auto can_cut = [&](std::size_t c) { return entity_of[c - 1] == npos || entity_of[c - 1] != entity_of[c]; };

  std::vector<TokenizedSentence> out;
  std::size_t pos = 0;
  while (pos < n || out.empty()) {
    std::size_t cut = n;
    if (n - pos > max_len) {
      cut = pos + max_len;
      while (cut > pos && !can_cut(cut)) --cut;
      if (cut == pos)
        throw ParameterError("chunk_sequences: entity at token " + std::to_string(pos) + " exceeds " +
                             std::to_string(max_len) + " tokens");
    }
    TokenizedSentence chunk;
    chunk.pieces.assign(tokenized.pieces.begin() + pos, tokenized.pieces.begin() + cut);
    chunk.offsets.assign(tokenized.offsets.begin() + pos, tokenized.offsets.begin() + cut);
    if (tokenized.labels) chunk.labels.emplace(tokenized.labels->begin() + pos, tokenized.labels->begin() + cut);
    out.push_back(std::move(chunk));
    pos = cut;
    if (n == 0) break;
  }
  return out;
}

std::string to_conll(const TokenizedSentence& tokenized) {
  if (!tokenized.labels) throw ParameterError("to_conll: tokenized sentence has no labels");
  std::string out;
  for (std::size_t i = 0; i < tokenized.size(); ++i) {
    out += tokenized.pieces[i] + '\t' + std::to_string(tokenized.offsets[i].start) + '\t' +
           std::to_string(tokenized.offsets[i].end) + '\t' + (*tokenized.labels)[i].str() + '\n';
  }
  out += '\n';
  return out;
}

}  // namespace legalner
