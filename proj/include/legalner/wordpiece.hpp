#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "legalner/corpus.hpp"
#include "legalner/labels.hpp"
#include "legalner/tokens.hpp"

namespace legalner {

struct VocabOptions {
  std::string continuation_prefix = "##";
  std::string unknown_token = "[UNK]";
  std::size_t max_sequence_length = 512;
  /// Longer words go straight to the unknown token.
  std::size_t max_word_chars = 100;
};

class Vocab {
 public:
  /// Piece ids are positions in `pieces`. Throws ParameterError when the
  /// unknown token is missing, the prefix is empty or max length < 2.
  explicit Vocab(std::vector<std::string> pieces, VocabOptions options = {});

  /// UTF-8, one piece per line, line number (from 0) = id.
  static Vocab load(const std::string& path, VocabOptions options = {});
  static Vocab parse(std::string_view text, VocabOptions options = {});
  std::string serialize() const;

  bool contains(std::string_view piece) const { return ids_.contains(std::string(piece)); }
  std::optional<std::size_t> id(std::string_view piece) const;
  std::size_t size() const { return pieces_.size(); }
  const std::vector<std::string>& pieces() const { return pieces_; }
  const VocabOptions& options() const { return options_; }

 private:
  std::vector<std::string> pieces_;
  std::unordered_map<std::string, std::size_t> ids_;
  VocabOptions options_;
};

struct VocabBuildOptions {
  std::size_t max_size = 2000;
  std::size_t min_frequency = 1;
};

/// Frequency-based vocabulary: special tokens, every seen character as an
/// initial and a continuation piece, then whole words and word-initial /
/// continuation n-grams (2..4 chars) by descending frequency.
Vocab build_vocab(const Corpus& corpus, const VocabBuildOptions& build = {}, VocabOptions options = {});

struct TokenizedSentence {
  std::vector<std::string> pieces;
  std::vector<TokenOffsets> offsets;
  std::optional<std::vector<Label>> labels;

  std::size_t size() const { return pieces.size(); }
  friend bool operator==(const TokenizedSentence&, const TokenizedSentence&) = default;
};

/// Greedy longest-match-first WordPiece. A word with any unmatched remainder
/// becomes a single unknown token covering the whole word.
TokenizedSentence wordpiece_tokenize(std::string_view text, const Vocab& vocab);

/// Labels every piece: encoding over pieces, so continuation pieces of an
/// entity get I- (or E- at the end for E-schemes) and pieces outside get O.
/// Throws AlignmentError when a span boundary falls inside a piece.
TokenizedSentence align_labels_to_tokens(TokenizedSentence tokenized, std::span<const CharSpan> spans,
                                         TagScheme scheme);

/// Splits into chunks of at most vocab max length, cutting only where no
/// entity crosses the cut (labels absent: anywhere). Throws ParameterError
/// when one entity alone exceeds the limit.
std::vector<TokenizedSentence> chunk_sequences(const TokenizedSentence& tokenized, const Vocab& vocab);

/// CoNLL TSV over pieces (labels required).
std::string to_conll(const TokenizedSentence& tokenized);

}  // namespace legalner
