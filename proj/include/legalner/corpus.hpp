#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace legalner {

// Declaration order is the canonical (alphabetical) order used for every
// serialized count, feature vector and label inventory.
enum class EntityType : std::uint8_t { Court, Date, Decision, Law, Money, OfficialGazette, Person, Reference };

inline constexpr std::size_t kEntityTypeCount = 8;
inline constexpr std::array<EntityType, kEntityTypeCount> kEntityTypes = {
    EntityType::Court, EntityType::Date,   EntityType::Decision, EntityType::Law,
    EntityType::Money, EntityType::OfficialGazette, EntityType::Person, EntityType::Reference};

constexpr std::size_t index_of(EntityType t) { return static_cast<std::size_t>(t); }

/// "COURT", "OFFICIAL_GAZETTE", ... as used in the annotation file.
std::string_view wire_name(EntityType t);
/// "Court", "OfficialGazette", ... as used in labels and reports.
std::string_view display_name(EntityType t);
/// Accepts either spelling, case-insensitively.
std::optional<EntityType> parse_entity_type(std::string_view name);

/// Half-open range of Unicode scalar indices into a sentence.
struct CharSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  EntityType entity = EntityType::Court;

  friend auto operator<=>(const CharSpan&, const CharSpan&) = default;
};

struct Sentence {
  std::string text;  // UTF-8, single line
  std::vector<CharSpan> spans;

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

enum class Script : std::uint8_t { Cyrillic, Latin };

struct Document {
  std::string id;
  Script script = Script::Latin;
  std::vector<Sentence> sentences;

  friend bool operator==(const Document&, const Document&) = default;
};

struct Corpus {
  std::vector<Document> documents;

  /// Latin iff every document is Latin.
  Script script() const;
  std::size_t sentence_count() const;
  const Document* find(std::string_view id) const;

  friend bool operator==(const Corpus&, const Corpus&) = default;
};

enum class ViolationKind : std::uint8_t {
  EmptySpan,
  EndExceedsLength,
  LeadingWhitespace,
  TrailingWhitespace,
  LeadingPunctuation,
  TrailingPunctuation,
  Unsorted,
  Overlap,
  LineBreak,
};

struct SpanViolation {
  ViolationKind kind;
  std::size_t span_index;  // index into Sentence::spans; for LineBreak, the char index
  std::string message;     // "trailing whitespace", "overlap", ...
};

std::string_view violation_name(ViolationKind kind);

/// Checks every span invariant of a sentence. Empty result means valid.
std::vector<SpanViolation> validate_spans(const Sentence& sentence);

/// Shrinks a span past leading/trailing whitespace and punctuation.
/// Returns nullopt when nothing is left.
std::optional<CharSpan> trim_span(std::u32string_view text, CharSpan span);

struct ParseOptions {
  /// Accept sentence texts containing line breaks (to be resegmented later).
  bool allow_multiline = false;
};

/// Parses the native annotation format. Throws ParseError for malformed
/// JSON or schema mismatches, ValidationError for invariant violations.
Corpus parse_corpus(std::string_view json, const ParseOptions& options = {});
/// Inverse of parse_corpus; deterministic, 2-space indented, trailing newline.
std::string serialize_corpus(const Corpus& corpus);

Corpus load_corpus(const std::string& path, const ParseOptions& options = {});
void save_corpus(const Corpus& corpus, const std::string& path);

/// One sentence per line, documents in order.
std::string to_plain_text(const Corpus& corpus);

/// Drops sentences without spans. Returns the number dropped.
std::size_t drop_unannotated(Corpus& corpus);

/// Slice of a sentence by scalar offsets.
std::string span_text(std::string_view utf8, std::size_t start, std::size_t end);

}  // namespace legalner
