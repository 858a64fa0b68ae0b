#include "legalner/transliterate.hpp"

#include <unordered_map>

#include "legalner/unicode.hpp"

namespace legalner {

namespace {

// Upper-case Latin rendering of each upper-case Cyrillic letter; the
// lower-case letter maps to the lower-cased rendering.
const std::unordered_map<char32_t, std::u32string>& upper_table() {
  static const std::unordered_map<char32_t, std::u32string> table = {
      // Serbian alphabet
      {U'А', U"A"}, {U'Б', U"B"}, {U'В', U"V"}, {U'Г', U"G"}, {U'Д', U"D"}, {U'Ђ', U"Đ"},
      {U'Е', U"E"}, {U'Ж', U"Ž"}, {U'З', U"Z"}, {U'И', U"I"}, {U'Ј', U"J"}, {U'К', U"K"},
      {U'Л', U"L"}, {U'Љ', U"LJ"}, {U'М', U"M"}, {U'Н', U"N"}, {U'Њ', U"NJ"}, {U'О', U"O"},
      {U'П', U"P"}, {U'Р', U"R"}, {U'С', U"S"}, {U'Т', U"T"}, {U'Ћ', U"Ć"}, {U'У', U"U"},
      {U'Ф', U"F"}, {U'Х', U"H"}, {U'Ц', U"C"}, {U'Ч', U"Č"}, {U'Џ', U"DŽ"}, {U'Ш', U"Š"},
      // other letters of the basic Cyrillic block
      {U'Ѐ', U"È"}, {U'Ё', U"JO"}, {U'Ѓ', U"Ǵ"}, {U'Є', U"JE"}, {U'Ѕ', U"DZ"}, {U'І', U"I"},
      {U'Ї', U"JI"}, {U'Ќ', U"Ḱ"}, {U'Ѝ', U"Ì"}, {U'Ў', U"Ŭ"}, {U'Й', U"J"}, {U'Щ', U"ŠČ"},
      {U'Ъ', U"ʺ"}, {U'Ы', U"Y"}, {U'Ь', U"ʹ"}, {U'Э', U"E"}, {U'Ю', U"JU"}, {U'Я', U"JA"},
  };
  return table;
}

const std::u32string* lookup_upper(char32_t c) {
  const auto& t = upper_table();
  auto it = t.find(c);
  return it == t.end() ? nullptr : &it->second;
}

std::u32string lower(std::u32string s) {
  for (char32_t& c : s) c = unicode::to_lower(c);
  return s;
}

}  // namespace

namespace detail {

// offsets[i] = output index of input char i; offsets[n] = output length.
std::u32string transliterate_mapped(std::u32string_view in, std::vector<std::size_t>* offsets) {
  std::u32string out;
  out.reserve(in.size() + in.size() / 8);
  if (offsets) offsets->assign(in.size() + 1, 0);
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (offsets) (*offsets)[i] = out.size();
    const char32_t c = in[i];
    if (c < 0x0400 || c > 0x045F) {
      out.push_back(c);
      continue;
    }
    if (const std::u32string* up = lookup_upper(c)) {
      if (up->size() == 1) {
        out += *up;
        continue;
      }
      // digraph of an upper-case letter: all caps inside an upper-case word
      const bool next_letter = i + 1 < in.size() && unicode::is_letter(in[i + 1]);
      bool caps = false;
      if (next_letter) {
        caps = unicode::is_upper(in[i + 1]);
      } else {
        caps = i > 0 && unicode::is_letter(in[i - 1]) && unicode::is_upper(in[i - 1]);
      }
      if (caps) {
        out += *up;
      } else {
        out.push_back((*up)[0]);
        out += lower(up->substr(1));
      }
      continue;
    }
    const char32_t upper = unicode::to_upper(c);
    if (const std::u32string* up = upper != c ? lookup_upper(upper) : nullptr) {
      out += lower(*up);
      continue;
    }
    out.push_back(c);
  }
  if (offsets) (*offsets)[in.size()] = out.size();
  return out;
}

}  // namespace detail

std::string transliterate(std::string_view text) {
  return unicode::encode(detail::transliterate_mapped(unicode::decode(text), nullptr));
}

Sentence transliterate(const Sentence& sentence) {
  std::vector<std::size_t> offsets;
  const std::u32string out = detail::transliterate_mapped(unicode::decode(sentence.text), &offsets);
  Sentence result;
  result.text = unicode::encode(out);
  result.spans.reserve(sentence.spans.size());
  for (const CharSpan& s : sentence.spans) {
    CharSpan moved = s;
    if (s.start < offsets.size()) moved.start = offsets[s.start];
    if (s.end < offsets.size()) moved.end = offsets[s.end];
    result.spans.push_back(moved);
  }
  return result;
}

Corpus transliterate(const Corpus& corpus) {
  Corpus out = corpus;
  for (auto& doc : out.documents) {
    if (doc.script != Script::Cyrillic) continue;
    for (auto& s : doc.sentences) s = transliterate(s);
    doc.script = Script::Latin;
  }
  return out;
}

}  // namespace legalner
