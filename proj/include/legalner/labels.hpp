#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "legalner/corpus.hpp"
#include "legalner/tokens.hpp"

namespace legalner {

/// IOE is IOE1 (E only where a same-type entity follows immediately); IE is
/// IOE2 (E closes every entity). BIES shares the IOBES grammar.
enum class TagScheme : std::uint8_t { IO, BIO, IOE, IOBES, IE, BIES };

inline constexpr std::array<TagScheme, 6> kTagSchemes = {TagScheme::IO,    TagScheme::BIO, TagScheme::IOE,
                                                         TagScheme::IOBES, TagScheme::IE,  TagScheme::BIES};

std::string_view scheme_name(TagScheme scheme);
std::optional<TagScheme> parse_scheme(std::string_view name);

enum class Prefix : std::uint8_t { O, B, I, E, S };

class Label {
 public:
  /// The outside label.
  constexpr Label() = default;
  constexpr Label(Prefix prefix, EntityType entity) : prefix_(prefix), entity_(entity) {}
  static constexpr Label outside() { return Label(); }

  Prefix prefix() const { return prefix_; }
  /// Defined unless is_outside().
  EntityType entity() const { return entity_; }
  bool is_outside() const { return prefix_ == Prefix::O; }

  /// "O", "B-Court", "I-OfficialGazette".
  std::string str() const;
  /// Canonical position: O first, then prefix-major (B, I, E, S) by entity type.
  std::size_t rank() const;

  friend bool operator==(const Label& a, const Label& b) {
    return a.prefix_ == b.prefix_ && (a.prefix_ == Prefix::O || a.entity_ == b.entity_);
  }
  friend auto operator<=>(const Label& a, const Label& b) { return a.rank() <=> b.rank(); }

 private:
  Prefix prefix_ = Prefix::O;
  EntityType entity_ = EntityType::Court;
};

/// Accepts "O", "B-Court", "B-COURT", "b-court", "I-OFFICIAL_GAZETTE".
std::optional<Label> parse_label(std::string_view text);
Label label_from_rank(std::size_t rank);
inline constexpr std::size_t kLabelRankCount = 1 + 4 * kEntityTypeCount;

bool scheme_allows(TagScheme scheme, Prefix prefix);
/// Every label the scheme can emit, in canonical order.
std::vector<Label> scheme_labels(TagScheme scheme);

// First-order grammar of each scheme. Used by the validator, strict
// decoding and the constrained Viterbi search.
bool allowed_start(TagScheme scheme, const Label& first);
bool allowed_transition(TagScheme scheme, const Label& prev, const Label& next);
bool allowed_end(TagScheme scheme, const Label& last);

/// First grammar violation as a message, or nullopt if the sequence is valid.
std::optional<std::string> grammar_violation(std::span<const Label> labels, TagScheme scheme);
inline bool is_valid(std::span<const Label> labels, TagScheme scheme) {
  return !grammar_violation(labels, scheme).has_value();
}

/// One label per token. Throws AlignmentError when a span boundary does not
/// fall on a token boundary, ParameterError for unsorted or overlapping spans.
std::vector<Label> encode_labels(std::span<const TokenOffsets> tokens, std::span<const CharSpan> spans,
                                 TagScheme scheme);

enum class DecodeMode : std::uint8_t {
  /// I-/E- without an open entity of the same type opens one; B- not
  /// followed by a continuation closes at once.
  Repair,
  /// Any grammar violation throws DecodeError.
  Strict,
};

struct DecodeOptions {
  DecodeMode mode = DecodeMode::Repair;
  /// Source text; when given, IO runs only merge across whitespace-only gaps.
  std::u32string_view text = {};
};

std::vector<CharSpan> decode_labels(std::span<const Label> labels, std::span<const TokenOffsets> tokens,
                                    TagScheme scheme, const DecodeOptions& options = {});

/// decode under `from`, re-encode under `to`, over token positions.
std::vector<Label> convert_scheme(std::span<const Label> labels, TagScheme from, TagScheme to,
                                  DecodeMode mode = DecodeMode::Repair);

/// Distinct labels of the word-token encoding of every sentence, canonical order.
std::vector<Label> label_inventory(const Corpus& corpus, TagScheme scheme);

/// CoNLL-style TSV: surface, char start, char end, label; blank line after each sentence.
std::string to_conll(std::u32string_view text, std::span<const TokenOffsets> tokens, std::span<const Label> labels);
std::string to_conll(const Corpus& corpus, TagScheme scheme);

}  // namespace legalner
