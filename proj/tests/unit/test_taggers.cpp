#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>

#include "legalner/error.hpp"
#include "legalner/labels.hpp"
#include "legalner/taggers.hpp"
#include "legalner/unicode.hpp"
#include "test_support.hpp"

using namespace legalner;
using namespace std::chrono_literals;

namespace {

Sentence sent(std::string text, std::vector<CharSpan> spans = {}) { return {std::move(text), std::move(spans)}; }

std::vector<Sentence> toy_corpus() {
  return {
      sent("Sud u Beogradu odlučuje", {{0, 14, EntityType::Court}}),
      sent("Marko je pred Sud u Beogradu", {{0, 5, EntityType::Person}, {14, 28, EntityType::Court}}),
      sent("Marko potpisuje", {{0, 5, EntityType::Person}}),
      sent("Iznos 500 dinara je plaćen", {{6, 16, EntityType::Money}}),
      sent("danas nije bilo ničega"),
  };
}

double token_accuracy(const TaggerModel& m, std::span<const Sentence> data, TagScheme scheme) {
  std::size_t ok = 0, n = 0;
  for (const auto& s : data) {
    const auto text = unicode::decode(s.text);
    const auto tokens = word_tokenize(text);
    const auto gold = encode_labels(tokens, s.spans, scheme);
    const auto pred = m.predict_labels(s, tokens);
    for (std::size_t i = 0; i < gold.size(); ++i) ok += gold[i] == pred[i];
    n += gold.size();
  }
  return static_cast<double>(ok) / static_cast<double>(n);
}

std::vector<double> flat(const LinearWeights& w) {
  auto v = w.emission;
  v.insert(v.end(), w.transition.begin(), w.transition.end());
  return v;
}

ExternalOptions echo(std::string mode = "echo") {
  ExternalOptions o;
  o.command = {test_support::echo_tagger(), "--mode", std::move(mode)};
  o.send_gold = true;
  return o;
}

}  // namespace

TEST_CASE("dictionary memorizes its training surfaces") {
  const auto c = test_support::memorizable_corpus();
  const auto sentences = test_support::sentences_of(c);
  const auto dict = train_dictionary(sentences);
  for (const auto& s : sentences) {
    const auto p = dict.predict(s);
    auto gold = s.spans;
    std::sort(gold.begin(), gold.end());
    REQUIRE(p.spans == gold);
  }
  CHECK(dict.predict(sent("ovde nema ničeg poznatog")).spans.empty());
  CHECK_THROWS_AS(train_dictionary(std::span<const Sentence>{}), ParameterError);
}

TEST_CASE("dictionary majority vote and order independence") {
  std::vector<Sentence> s = {
      sent("AA je došao", {{0, 2, EntityType::Person}}),
      sent("AA je došao", {{0, 2, EntityType::Court}}),
      sent("AA je došao", {{0, 2, EntityType::Person}}),
      sent("BB je došao", {{0, 2, EntityType::Person}}),
      sent("BB je došao", {{0, 2, EntityType::Court}}),
  };
  const auto d = train_dictionary(s);
  CHECK(d.gazetteer().at("AA") == EntityType::Person);
  CHECK(d.gazetteer().at("BB") == EntityType::Court);  // tie: canonical order
  std::reverse(s.begin(), s.end());
  CHECK(train_dictionary(s).gazetteer() == d.gazetteer());
}

TEST_CASE("dictionary prefers the longest match") {
  const auto d = train_dictionary(std::vector<Sentence>{
      sent("Viši sud", {{0, 8, EntityType::Court}}),
      sent("Viši sud u Beogradu", {{0, 19, EntityType::Court}}),
  });
  const auto p = d.predict(sent("Pred Viši sud u Beogradu i Viši sud"));
  REQUIRE(p.spans.size() == 2);
  CHECK(p.spans[0].start == 5);
  CHECK(p.spans[0].end == 24);
  CHECK(p.spans[1].start == 27);
}

TEST_CASE("token features") {
  const auto f = token_features(U"Sud");
  CHECK(std::find(f.begin(), f.end(), "w=sud") != f.end());
  CHECK(std::find(f.begin(), f.end(), "cap") != f.end());
  CHECK(std::find(f.begin(), f.end(), "b") != f.end());
  const auto g = token_features(U"2020");
  const auto h = token_features(U"12.03.2020");
  CHECK(std::find(h.begin(), h.end(), "dig") == h.end());
  CHECK(std::find(h.begin(), h.end(), "sh=d.d.d") != h.end());
  CHECK(std::find(g.begin(), g.end(), "dig") != g.end());
}

TEST_CASE("perceptron separates a toy corpus") {
  const auto data = toy_corpus();
  LinearOptions o;
  o.epochs = 5;
  const auto t = train_linear(data, o);
  CHECK(token_accuracy(*t.model, data, TagScheme::BIO) == 1.0);
  CHECK(t.selected_epoch == 5);

  o.epochs = 0;
  const auto zero = train_linear(data, o);
  CHECK(zero.selected_epoch == 0);
  for (const auto& s : data) CHECK(zero.model->predict(s).spans.empty());
  CHECK_THROWS_AS(train_linear(std::span<const Sentence>{}, o), ParameterError);
}

TEST_CASE("perceptron is deterministic and selects on validation") {
  const auto c = test_support::archetype_corpus();
  auto all = test_support::sentences_of(c);
  std::vector<Sentence> train(all.begin(), all.begin() + 300), valid(all.begin() + 300, all.begin() + 360);
  LinearOptions o;
  o.epochs = 4;
  o.seed = 9;
  const auto a = train_linear(train, o, valid);
  const auto b = train_linear(train, o, valid);
  CHECK(a.model->weights() == b.model->weights());
  REQUIRE(a.validation_f1.size() == 4);
  const auto best = std::max_element(a.validation_f1.begin(), a.validation_f1.end()) - a.validation_f1.begin();
  CHECK(a.selected_epoch == static_cast<std::size_t>(best) + 1);
  for (TagScheme s : {TagScheme::IOBES, TagScheme::IE, TagScheme::IO}) {
    o.scheme = s;
    const auto m = train_linear(train, o);
    CHECK(token_accuracy(*m.model, valid, s) > 0.9);
  }
}

TEST_CASE("averaged weights are the mean of per-example snapshots") {
  const auto data = toy_corpus();
  std::vector<std::vector<double>> snaps;
  LinearOptions o;
  o.epochs = 3;
  o.snapshots = &snaps;
  const auto t = train_linear(data, o);
  REQUIRE(snaps.size() == 3 * data.size());
  std::vector<double> mean(snaps[0].size(), 0.0);
  for (const auto& s : snaps)
    for (std::size_t i = 0; i < s.size(); ++i) mean[i] += s[i];
  for (auto& m : mean) m /= static_cast<double>(snaps.size());
  const auto avg = flat(t.model->weights());
  REQUIRE(avg.size() == mean.size());
  for (std::size_t i = 0; i < avg.size(); ++i) REQUIRE(avg[i] == doctest::Approx(mean[i]).epsilon(1e-12));
}

TEST_CASE("decoded output is always grammatical") {
  const auto c = test_support::archetype_corpus();
  const auto all = test_support::sentences_of(c);
  std::mt19937_64 rng(3);
  for (TagScheme scheme : {TagScheme::BIO, TagScheme::IOE, TagScheme::IOBES, TagScheme::IE, TagScheme::BIES}) {
    LinearOptions o;
    o.epochs = 2;
    o.scheme = scheme;
    const auto m = train_linear(std::span(all).first(200), o);
    for (int i = 0; i < 2000; ++i) {
      const auto r = test_support::random_sentence(rng, 20);
      const Sentence s{unicode::encode(r.text), {}};
      const auto labels = m.model->predict_labels(s, word_tokenize(r.text));
      REQUIRE_MESSAGE(is_valid(labels, scheme), s.text);
    }
  }
}

TEST_CASE("model files round trip") {
  const auto data = toy_corpus();
  LinearOptions o;
  o.epochs = 3;
  const auto lin = train_linear(data, o);
  const auto dict = train_dictionary(data);
  const std::string path = "test_taggers_model.json";
  for (const TaggerModel* m : {static_cast<const TaggerModel*>(lin.model.get()),
                               static_cast<const TaggerModel*>(&dict)}) {
    save_model(*m, path);
    const auto back = load_model(path);
    CHECK(back->kind() == m->kind());
    CHECK(back->labels() == m->labels());
    for (const auto& s : data) CHECK(back->predict(s).labels == m->predict(s).labels);
    CHECK(serialize_model(*back) == serialize_model(*m));
  }
  const auto back = parse_model(serialize_model(*lin.model));
  CHECK(dynamic_cast<const LinearTagger&>(*back).weights() == lin.model->weights());

  const std::string text = serialize_model(*lin.model);
  CHECK_THROWS_AS(parse_model(text.substr(0, text.size() / 2)), ModelFormatError);
  CHECK_THROWS_AS(parse_model("{}"), ModelFormatError);
  auto j = text;
  j.replace(j.find("\"version\":1"), 11, "\"version\":7");
  CHECK_THROWS_AS(parse_model(j), ModelFormatError);
  std::remove(path.c_str());
}

TEST_CASE("external adapter") {
  const auto data = toy_corpus();
  ExternalTagger ok(echo());
  for (const auto& s : data) {
    auto gold = s.spans;
    std::sort(gold.begin(), gold.end());
    CHECK(ok.predict(s).spans == gold);
  }
  for (const char* mode : {"garbage", "short", "exit"}) {
    ExternalTagger bad(echo(mode));
    CHECK_THROWS_AS(bad.predict(data[0]), AdapterError);
  }
  auto slow = echo("hang");
  slow.timeout = 300ms;
  ExternalTagger hang(slow);
  const auto t0 = std::chrono::steady_clock::now();
  CHECK_THROWS_AS(hang.predict(data[0]), AdapterError);
  CHECK(std::chrono::steady_clock::now() - t0 < 5s);

  ExternalOptions missing;
  missing.command = {"/nonexistent/adapter"};
  ExternalTagger gone(missing);
  CHECK_THROWS_AS(gone.predict(data[0]), AdapterError);
  CHECK_THROWS_AS(ExternalTagger(ExternalOptions{}), ParameterError);
}
