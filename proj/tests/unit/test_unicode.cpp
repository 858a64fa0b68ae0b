#include <doctest.h>

#include <random>

#include "legalner/error.hpp"
#include "legalner/rng.hpp"
#include "legalner/tokens.hpp"
#include "legalner/unicode.hpp"

using namespace legalner;

TEST_CASE("utf-8 decode and encode") {
  const std::string s = "Суд čćžšđ €𝄞";
  const auto u = unicode::decode(s);
  CHECK(u.size() == 12);
  CHECK(unicode::length(s) == 12);
  CHECK(unicode::encode(u) == s);
  CHECK_THROWS_AS(unicode::decode("\xC3"), ParseError);
  CHECK_THROWS_AS(unicode::decode("\xED\xA0\x80"), ParseError);  // surrogate
  CHECK_THROWS_AS(unicode::decode("\xC0\xAF"), ParseError);      // overlong
}

TEST_CASE("random scalar round trip") {
  std::mt19937_64 rng(3);
  for (int n = 0; n < 1000; ++n) {
    std::u32string u;
    for (int i = 0; i < 20; ++i) {
      char32_t c = static_cast<char32_t>(rng() % 0x110000);
      if (c >= 0xD800 && c < 0xE000) c = U'x';
      u.push_back(c);
    }
    REQUIRE(unicode::decode(unicode::encode(u)) == u);
  }
}

TEST_CASE("character classes") {
  CHECK(unicode::is_space(U' '));
  CHECK(unicode::is_space(U'\t'));
  CHECK(unicode::is_space(U' '));
  CHECK(unicode::is_punct(U'.'));
  CHECK(unicode::is_punct(U'„'));
  CHECK(unicode::is_punct(U'»'));
  CHECK_FALSE(unicode::is_punct(U'a'));
  CHECK_FALSE(unicode::is_punct(U'$'));  // Sc, not P*
  CHECK(unicode::is_upper(U'Š'));
  CHECK(unicode::is_lower(U'ђ'));
  CHECK(unicode::is_cyrillic(U'Ж'));
  CHECK_FALSE(unicode::is_cyrillic(U'Z'));
  CHECK(unicode::to_lower(U'Č') == U'č');
  CHECK(unicode::is_line_break(U'\n'));
  CHECK(unicode::is_line_break(U' '));
}

TEST_CASE("nfc") {
  CHECK(unicode::nfc("c\xCC\x8C") == "č");
  CHECK(unicode::nfc("č") == "č");
}

TEST_CASE("word tokens peel edge punctuation") {
  const std::u32string t = U"(„Sud, 12.03.2020.)";
  const auto tok = word_tokenize(t);
  std::vector<std::u32string> surf;
  for (auto o : tok) surf.push_back(t.substr(o.start, o.end - o.start));
  CHECK(surf == std::vector<std::u32string>{U"(", U"„", U"Sud", U",", U"12.03.2020", U".", U")"});
  const auto wp = wordpiece_pretokenize(U"12.03 a-b");
  CHECK(wp.size() == 6);  // 12 . 03 a - b
  CHECK(whitespace_words(U"  a  bc ").size() == 2);
}

TEST_CASE("derived seeds") {
  CHECK(derive_seed(1, "a") == derive_seed(1, "a"));
  CHECK(derive_seed(1, "a") != derive_seed(1, "b"));
  CHECK(derive_seed(1, "a") != derive_seed(2, "a"));
  CHECK(derive_seed(1, "a", 0) != derive_seed(1, "a", 1));
  Rng r(5);
  for (int i = 0; i < 1000; ++i) {
    CHECK(r.below(7) < 7);
    const double u = r.unit();
    CHECK((u >= 0.0 && u < 1.0));
  }
}
