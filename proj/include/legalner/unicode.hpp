#pragma once

#include <string>
#include <string_view>

namespace legalner::unicode {

/// Decodes UTF-8 into scalar values. Throws ParseError on ill-formed input.
std::u32string decode(std::string_view utf8);
std::string encode(std::u32string_view text);
std::string encode(char32_t c);

/// Number of scalar values in a UTF-8 string.
std::size_t length(std::string_view utf8);

/// Z* general categories plus the C0/C1 whitespace controls (tab, newline, ...).
bool is_space(char32_t c);
/// Any P* general category.
bool is_punct(char32_t c);
/// Characters a span may not begin or end with.
inline bool is_trim(char32_t c) { return is_space(c) || is_punct(c); }
bool is_line_break(char32_t c);

bool is_letter(char32_t c);
bool is_upper(char32_t c);
bool is_lower(char32_t c);
bool is_digit(char32_t c);
bool is_cyrillic(char32_t c);

char32_t to_lower(char32_t c);
char32_t to_upper(char32_t c);
std::u32string to_lower(std::u32string_view text);

/// Canonical composition (NFC).
std::string nfc(std::string_view utf8);

}  // namespace legalner::unicode
