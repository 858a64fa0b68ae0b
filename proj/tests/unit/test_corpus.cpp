#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "legalner/corpus.hpp"
#include "legalner/error.hpp"
#include "legalner/transliterate.hpp"
#include "legalner/unicode.hpp"
#include "test_support.hpp"

using namespace legalner;

namespace {

std::string one_sentence(const std::string& text, const std::string& spans, const std::string& script = "lat") {
  return R"({"documents":[{"id":"d1","script":")" + script + R"(","sentences":[{"text":")" + text +
         R"(","spans":[)" + spans + "]}]}]}";
}

std::string error_of(const std::string& json) {
  try {
    parse_corpus(json);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("minimal corpus") {
  const Corpus c = parse_corpus(one_sentence("Apelacioni sud", R"({"start":0,"end":14,"type":"COURT"})"));
  REQUIRE(c.documents.size() == 1);
  REQUIRE(c.documents[0].sentences.size() == 1);
  REQUIRE(c.documents[0].sentences[0].spans.size() == 1);
  CHECK(c.documents[0].sentences[0].spans[0] == CharSpan{0, 14, EntityType::Court});
}

TEST_CASE("span past the end is a validation error") {
  const std::string bad = one_sentence("Apelacioni sud", R"({"start":0,"end":15,"type":"COURT"})");
  CHECK_THROWS_AS(parse_corpus(bad), ValidationError);
  const std::string msg = error_of(bad);
  CHECK(msg.find("end exceeds length") != std::string::npos);
  CHECK(msg.find("'d1'") != std::string::npos);
  CHECK(msg.find("sentence 0") != std::string::npos);
  CHECK(msg.find("span 0") != std::string::npos);
}

TEST_CASE("offsets count scalar values") {
  // "Žalba" has a 2-byte first letter
  const Corpus c = parse_corpus(one_sentence("Žalba suda", R"({"start":6,"end":10,"type":"COURT"})"));
  CHECK(span_text(c.documents[0].sentences[0].text, 6, 10) == "suda");
}

TEST_CASE("malformed json reports line and column") {
  try {
    parse_corpus("{\n  \"documents\": [\n    {,\n");
    FAIL("no error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(e.column() > 0);
  }
  CHECK_THROWS_AS(parse_corpus(R"({"documents":[{"id":"a","script":"lat"}]})"), ParseError);
  CHECK_THROWS_AS(parse_corpus(R"({"documents":[{"id":"a","script":"xx","sentences":[]}]})"), ParseError);
  CHECK_THROWS_AS(parse_corpus(one_sentence("ab", R"({"start":0,"end":2,"type":"PLACE"})")), ParseError);
  CHECK_THROWS_AS(parse_corpus(one_sentence("ab", R"({"start":-1,"end":2,"type":"LAW"})")), ParseError);
}

TEST_CASE("corpus-level validation") {
  CHECK_THROWS_AS(parse_corpus(R"({"documents":[{"id":"a","script":"lat","sentences":[]},{"id":"a","script":"lat","sentences":[]}]})"),
                  ValidationError);
  CHECK_THROWS_AS(parse_corpus(one_sentence("Суд", "")), ValidationError);
  CHECK_NOTHROW(parse_corpus(one_sentence("Суд", "", "cyr")));
  const std::string multi = one_sentence("a\\nb", "");
  CHECK_THROWS_AS(parse_corpus(multi), ValidationError);
  ParseOptions po;
  po.allow_multiline = true;
  CHECK_NOTHROW(parse_corpus(multi, po));
}

TEST_CASE("validate_spans") {
  auto kinds = [](const Sentence& s) {
    std::vector<std::string> out;
    for (const auto& v : validate_spans(s)) out.push_back(v.message);
    return out;
  };
  CHECK(kinds({"sud je", {{0, 4, EntityType::Court}}}) == std::vector<std::string>{"trailing whitespace"});
  CHECK(kinds({"sud je", {{0, 3, EntityType::Court}}}).empty());
  CHECK(kinds({"abcdefghij", {{0, 5, EntityType::Law}, {3, 8, EntityType::Law}}}) == std::vector<std::string>{"overlap"});
  CHECK(kinds({" sud", {{0, 4, EntityType::Court}}}) == std::vector<std::string>{"leading whitespace"});
  CHECK(kinds({"sud.", {{0, 4, EntityType::Court}}}) == std::vector<std::string>{"trailing punctuation"});
  CHECK(kinds({"(sud", {{0, 4, EntityType::Court}}}) == std::vector<std::string>{"leading punctuation"});
  CHECK(kinds({"abcdef", {{3, 4, EntityType::Law}, {0, 2, EntityType::Law}}}) == std::vector<std::string>{"unsorted"});
  CHECK(kinds({"abc", {{1, 1, EntityType::Law}}}) == std::vector<std::string>{"empty span"});
}

TEST_CASE("trim_span") {
  const std::u32string t = U" (sud) ";
  CHECK(trim_span(t, {0, 7, EntityType::Court}) == CharSpan{2, 5, EntityType::Court});
  CHECK_FALSE(trim_span(t, {0, 2, EntityType::Court}).has_value());
}

TEST_CASE("serialize then parse is identity on the fixtures") {
  for (const char* name : {"archetype75.json", "memorizable60.json"}) {
    const Corpus c = load_corpus(test_support::data_path(name));
    const std::string once = serialize_corpus(c);
    const Corpus back = parse_corpus(once);
    CHECK(back == c);
    CHECK(serialize_corpus(back) == once);
  }
}

TEST_CASE("fixture counts match the manifest") {
  std::ifstream in(test_support::data_path("manifest.json"));
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string manifest = ss.str();
  const Corpus c = test_support::archetype_corpus();
  std::map<std::string, std::size_t> per_type;
  std::size_t spans = 0;
  for (const auto& d : c.documents)
    for (const auto& s : d.sentences)
      for (const auto& sp : s.spans) {
        ++per_type[std::string(wire_name(sp.entity))];
        ++spans;
      }
  CHECK(c.documents.size() == 75);
  // the manifest is written by the fixture script, independently of this library
  auto field = [&](const std::string& key) {
    const auto pos = manifest.find("\"" + key + "\"");
    REQUIRE(pos != std::string::npos);
    return std::stoul(manifest.substr(manifest.find(':', pos) + 1));
  };
  CHECK(c.sentence_count() == field("sentences"));
  CHECK(spans == field("spans"));
  for (EntityType t : kEntityTypes) CHECK(per_type[std::string(wire_name(t))] == field(std::string(wire_name(t))));
}

TEST_CASE("drop_unannotated") {
  Corpus c;
  Document d{"d", Script::Latin, {}};
  for (int i = 0; i < 10; ++i) {
    Sentence s{"Sud je odlučio", {}};
    if (i % 10 < 7) s.spans.push_back({0, 3, EntityType::Court});
    d.sentences.push_back(s);
  }
  c.documents.push_back(d);
  CHECK(drop_unannotated(c) == 3);
  CHECK(c.sentence_count() == 7);
  const std::string plain = to_plain_text(c);
  CHECK(std::count(plain.begin(), plain.end(), '\n') == 7);
}

// ---------------------------------------------------------------- transliteration

TEST_CASE("transliteration examples") {
  CHECK(transliterate("Apelacioni sud") == "Apelacioni sud");
  CHECK(transliterate("Суд у Новом Саду") == "Sud u Novom Sadu");
  CHECK(transliterate("Џ џ Љ љ Њ њ") == "Dž dž Lj lj Nj nj");
  CHECK(transliterate("ЉУБАВ") == "LJUBAV");
  CHECK(transliterate("БИЉАНА") == "BILJANA");
  CHECK(transliterate("Љубав") == "Ljubav");
  CHECK(transliterate("ЂОРЂЕ ЋИРИЋ") == "ĐORĐE ĆIRIĆ");
}

namespace {

// independent oracle: the Serbian alphabet as 30 pairs, with word-level casing
const std::vector<std::pair<std::u32string, std::u32string>> kSerbian = {
    {U"а", U"a"}, {U"б", U"b"}, {U"в", U"v"}, {U"г", U"g"}, {U"д", U"d"}, {U"ђ", U"đ"}, {U"е", U"e"}, {U"ж", U"ž"},
    {U"з", U"z"}, {U"и", U"i"}, {U"ј", U"j"}, {U"к", U"k"}, {U"л", U"l"}, {U"љ", U"lj"}, {U"м", U"m"}, {U"н", U"n"},
    {U"њ", U"nj"}, {U"о", U"o"}, {U"п", U"p"}, {U"р", U"r"}, {U"с", U"s"}, {U"т", U"t"}, {U"ћ", U"ć"}, {U"у", U"u"},
    {U"ф", U"f"}, {U"х", U"h"}, {U"ц", U"c"}, {U"ч", U"č"}, {U"џ", U"dž"}, {U"ш", U"š"}};

std::u32string upper(std::u32string s) {
  for (auto& c : s) c = unicode::to_upper(c);
  return s;
}

}  // namespace

TEST_CASE("transliteration matches the table oracle on random words") {
  std::mt19937_64 rng(11);
  for (int n = 0; n < 1000; ++n) {
    std::u32string cyr, lat;
    const int words = 1 + static_cast<int>(rng() % 5);
    for (int w = 0; w < words; ++w) {
      if (w) {
        cyr += U' ';
        lat += U' ';
      }
      const int len = 1 + static_cast<int>(rng() % 7);
      const int casing = static_cast<int>(rng() % 3);  // lower, Title, UPPER (len >= 2)
      for (int i = 0; i < len; ++i) {
        const auto& [c, l] = kSerbian[rng() % kSerbian.size()];
        const bool up = casing == 2 || (casing == 1 && i == 0);
        cyr += up ? upper(c) : c;
        if (!up) lat += l;
        else if (casing == 2 && len >= 2) lat += upper(l);
        else {
          std::u32string t = l;
          t[0] = unicode::to_upper(t[0]);
          lat += t;
        }
      }
    }
    const std::string out = transliterate(unicode::encode(cyr));
    REQUIRE(out == unicode::encode(lat));
    CHECK(transliterate(out) == out);
    for (char32_t c : unicode::decode(out)) CHECK_FALSE(unicode::is_cyrillic(c));
  }
}

TEST_CASE("transliteration moves spans") {
  const Sentence s{"Судија Љубиша Јовић, Виши суд", {{7, 19, EntityType::Person}, {21, 29, EntityType::Court}}};
  const Sentence t = transliterate(s);
  CHECK(t.text == "Sudija Ljubiša Jović, Viši sud");
  REQUIRE(t.spans.size() == 2);
  CHECK(span_text(t.text, t.spans[0].start, t.spans[0].end) == "Ljubiša Jović");
  CHECK(span_text(t.text, t.spans[1].start, t.spans[1].end) == "Viši sud");
  CHECK(validate_spans(t).empty());

  Corpus c;
  c.documents.push_back({"c", Script::Cyrillic, {s}});
  const Corpus lat = transliterate(c);
  CHECK(lat.documents[0].script == Script::Latin);
  CHECK(lat.script() == Script::Latin);
  CHECK_NOTHROW(parse_corpus(serialize_corpus(lat)));
}
