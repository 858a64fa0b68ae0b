#pragma once

#include <string>
#include <string_view>

#include "legalner/corpus.hpp"

namespace legalner {

/// Serbian Cyrillic to Latin (Гајица). Љ, Њ, Џ become Lj, Nj, Dž, or LJ, NJ,
/// DŽ inside an upper-case word. Other Cyrillic letters of U+0400..U+045F use
/// a conventional Latin rendering; everything else passes through.
std::string transliterate(std::string_view text);

/// Transliterates a sentence and moves its spans with the text.
Sentence transliterate(const Sentence& sentence);

/// Transliterates every Cyrillic document and marks it Latin.
Corpus transliterate(const Corpus& corpus);

}  // namespace legalner
