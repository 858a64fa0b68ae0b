#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "legalner/corpus.hpp"

namespace legalner {

struct SplitterOptions {
  /// Lower-cased words (with their trailing period) after which no break is made.
  std::vector<std::string> abbreviations = {"čl.", "st.", "tač.", "br.", "god."};
};

/// Rule-based sentence splitter. A boundary follows '.', '!', '?' or '…'
/// (plus any closing quotes/brackets) when the next non-space character is an
/// upper-case letter or a digit and the preceding word is not a guarded
/// abbreviation. A blank line is always a boundary; single line breaks are
/// whitespace. Returned sentences are trimmed, single-line and non-empty.
std::vector<std::string> segment_sentences(std::string_view text, const SplitterOptions& options = {});

/// Re-splits every sentence of a document with the same rule, never breaking
/// inside a span, and moves spans onto the pieces.
Document segment_document(const Document& document, const SplitterOptions& options = {});

}  // namespace legalner
