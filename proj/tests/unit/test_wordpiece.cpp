#include <doctest.h>

#include <random>

#include "legalner/error.hpp"
#include "legalner/labels.hpp"
#include "legalner/wordpiece.hpp"
#include "test_support.hpp"

using namespace legalner;
using Strings = std::vector<std::string>;

namespace {

Vocab toy() { return Vocab({"pre", "##suda", "sud", "u", "[UNK]", "No", "##vom", "S", "##a", "##d", "##u"}); }

std::vector<Label> labs(std::initializer_list<const char*> items) {
  std::vector<Label> out;
  for (const char* s : items) out.push_back(*parse_label(s));
  return out;
}

TokenizedSentence synthetic(std::size_t n) {
  TokenizedSentence t;
  for (std::size_t i = 0; i < n; ++i) {
    t.pieces.push_back("w");
    t.offsets.push_back({2 * i, 2 * i + 1});
  }
  t.labels.emplace(n, Label::outside());
  return t;
}

}  // namespace

TEST_CASE("toy vocabulary traces") {
  const Vocab v = toy();
  auto a = wordpiece_tokenize("presuda", v);
  CHECK(a.pieces == Strings{"pre", "##suda"});
  CHECK(a.offsets == std::vector<TokenOffsets>{{0, 3}, {3, 7}});
  auto b = wordpiece_tokenize("sud u", v);
  CHECK(b.pieces == Strings{"sud", "u"});
  CHECK(b.offsets == std::vector<TokenOffsets>{{0, 3}, {4, 5}});
  auto c = wordpiece_tokenize("zakon", v);
  CHECK(c.pieces == Strings{"[UNK]"});
  CHECK(c.offsets == std::vector<TokenOffsets>{{0, 5}});
  // "Sadu" = S ##a ##d ##u; longest match first would take "Sad" if it were there
  CHECK(wordpiece_tokenize("Sadu", v).pieces == Strings{"S", "##a", "##d", "##u"});
  // a partial match still fails the whole word
  CHECK(wordpiece_tokenize("prex", v).pieces == Strings{"[UNK]"});
  CHECK(wordpiece_tokenize("", v).pieces.empty());
}

TEST_CASE("punctuation is split off before matching") {
  const Vocab v({"[UNK]", "sud", ",", "."});
  const auto t = wordpiece_tokenize("sud, sud.", v);
  CHECK(t.pieces == Strings{"sud", ",", "sud", "."});
  CHECK(t.offsets == std::vector<TokenOffsets>{{0, 3}, {3, 4}, {5, 8}, {8, 9}});
}

TEST_CASE("vocab validation and file format") {
  CHECK_THROWS_AS(Vocab({"a", "b"}), ParameterError);
  VocabOptions o;
  o.continuation_prefix = "";
  CHECK_THROWS_AS(Vocab({"[UNK]"}, o), ParameterError);
  VocabOptions small;
  small.max_sequence_length = 1;
  CHECK_THROWS_AS(Vocab({"[UNK]"}, small), ParameterError);
  const Vocab v = Vocab::parse("[UNK]\nsud\n##a\n");
  CHECK(v.size() == 3);
  CHECK(v.id("##a") == 2u);
  CHECK(Vocab::parse(v.serialize()).pieces() == v.pieces());
}

TEST_CASE("label alignment") {
  const Vocab v = toy();
  // sud u Novom : one Court span over all three words
  auto t = align_labels_to_tokens(wordpiece_tokenize("sud u Novom", v), std::vector<CharSpan>{{0, 11, EntityType::Court}},
                                  TagScheme::BIO);
  CHECK(t.pieces == Strings{"sud", "u", "No", "##vom"});
  CHECK(*t.labels == labs({"B-Court", "I-Court", "I-Court", "I-Court"}));
  auto s = align_labels_to_tokens(wordpiece_tokenize("Sadu", v), std::vector<CharSpan>{{0, 4, EntityType::Person}}, TagScheme::BIO);
  CHECK(*s.labels == labs({"B-Person", "I-Person", "I-Person", "I-Person"}));
  auto o = align_labels_to_tokens(wordpiece_tokenize("sud u", v), {}, TagScheme::BIO);
  CHECK(*o.labels == labs({"O", "O"}));
  CHECK_THROWS_AS(align_labels_to_tokens(wordpiece_tokenize("presuda", v), std::vector<CharSpan>{{0, 4, EntityType::Decision}},
                                         TagScheme::BIO),
                  AlignmentError);
}

TEST_CASE("chunking") {
  const Vocab v = toy();
  auto long600 = synthetic(600);
  auto chunks = chunk_sequences(long600, v);
  REQUIRE(chunks.size() == 2);
  CHECK(chunks[0].size() == 512);
  CHECK(chunks[1].size() == 88);

  auto short100 = synthetic(100);
  chunks = chunk_sequences(short100, v);
  REQUIRE(chunks.size() == 1);
  CHECK(chunks[0] == short100);

  auto t520 = synthetic(520);
  (*t520.labels)[500] = *parse_label("B-Reference");
  for (std::size_t i = 501; i <= 515; ++i) (*t520.labels)[i] = *parse_label("I-Reference");
  chunks = chunk_sequences(t520, v);
  REQUIRE(chunks.size() == 2);
  CHECK(chunks[0].size() == 500);
  CHECK(chunks[1].size() == 20);
  CHECK((*chunks[1].labels)[0] == *parse_label("B-Reference"));

  auto huge = synthetic(600);
  (*huge.labels)[0] = *parse_label("B-Law");
  for (std::size_t i = 1; i < 600; ++i) (*huge.labels)[i] = *parse_label("I-Law");
  CHECK_THROWS_AS(chunk_sequences(huge, v), ParameterError);
}

TEST_CASE("properties on random text with a built vocabulary") {
  std::mt19937_64 rng(5);
  Corpus train;
  Document d{"d", Script::Latin, {}};
  for (int i = 0; i < 50; ++i) d.sentences.push_back({unicode::encode(test_support::random_sentence(rng, 10).text), {}});
  train.documents.push_back(d);
  VocabBuildOptions bo;
  bo.max_size = 300;
  VocabOptions vo;
  vo.max_sequence_length = 8;
  const Vocab v = build_vocab(train, bo, vo);
  CHECK(v.contains("[UNK]"));
  CHECK(v.size() <= 300);

  for (int n = 0; n < 1000; ++n) {
    const auto r = test_support::random_sentence(rng, 15, 4);
    const std::string text = unicode::encode(r.text);
    const auto t = wordpiece_tokenize(text, v);
    REQUIRE(t == wordpiece_tokenize(text, v));
    // offsets are ordered and only whitespace lies between them
    std::size_t pos = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      for (std::size_t k = pos; k < t.offsets[i].start; ++k) REQUIRE(unicode::is_space(r.text[k]));
      REQUIRE(t.offsets[i].start < t.offsets[i].end);
      const std::u32string src = r.text.substr(t.offsets[i].start, t.offsets[i].end - t.offsets[i].start);
      if (t.pieces[i] != "[UNK]") {
        std::string piece = t.pieces[i];
        if (piece.rfind("##", 0) == 0) piece = piece.substr(2);
        REQUIRE(unicode::encode(src) == piece);
      }
      pos = t.offsets[i].end;
    }
    for (std::size_t k = pos; k < r.text.size(); ++k) REQUIRE(unicode::is_space(r.text[k]));

    // alignment keeps the spans; chunking keeps the tokens
    const auto aligned = align_labels_to_tokens(t, r.spans, TagScheme::BIO);
    REQUIRE(decode_labels(*aligned.labels, aligned.offsets, TagScheme::BIO) == r.spans);
    try {
      const auto chunks = chunk_sequences(aligned, v);
      std::size_t total = 0;
      for (const auto& c : chunks) {
        REQUIRE(c.size() <= 8);
        total += c.size();
      }
      REQUIRE(total == aligned.size());
    } catch (const ParameterError&) {
      // an entity longer than eight pieces cannot be placed; allowed
    }
  }
}
