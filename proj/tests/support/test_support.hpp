#pragma once

#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "legalner/corpus.hpp"
#include "legalner/tokens.hpp"
#include "legalner/unicode.hpp"

namespace test_support {

inline std::string data_path(const std::string& name) { return std::string(LEGALNER_TEST_DATA) + "/" + name; }
inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string echo_tagger() { return LEGALNER_ECHO_TAGGER; }

inline legalner::Corpus archetype_corpus() { return legalner::load_corpus(data_path("archetype75.json")); }
inline legalner::Corpus memorizable_corpus() { return legalner::load_corpus(data_path("memorizable60.json")); }

inline std::vector<legalner::Sentence> sentences_of(const legalner::Corpus& c) {
  std::vector<legalner::Sentence> out;
  for (const auto& d : c.documents) out.insert(out.end(), d.sentences.begin(), d.sentences.end());
  return out;
}

/// Random sentence of short words with token-aligned random spans.
struct RandomSentence {
  std::u32string text;
  std::vector<legalner::TokenOffsets> tokens;
  std::vector<legalner::CharSpan> spans;
};

inline RandomSentence random_sentence(std::mt19937_64& rng, std::size_t max_words, std::size_t n_types = 8,
                                      double entity_rate = 0.4) {
  static const std::u32string letters = U"abcčdefgijklmnoprsštuvzžABCDEFGHKLMNOPRSTUVZ0123456789";
  RandomSentence r;
  const std::size_t words = 1 + rng() % max_words;
  for (std::size_t w = 0; w < words; ++w) {
    if (w) r.text += U' ';
    const std::size_t start = r.text.size();
    const std::size_t len = 1 + rng() % 5;
    for (std::size_t i = 0; i < len; ++i) r.text += letters[rng() % letters.size()];
    r.tokens.push_back({start, r.text.size()});
  }
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t i = 0;
  while (i < r.tokens.size()) {
    if (u(rng) < entity_rate) {
      const std::size_t len = 1 + rng() % std::min<std::size_t>(3, r.tokens.size() - i);
      const auto type = legalner::kEntityTypes[rng() % n_types];
      r.spans.push_back({r.tokens[i].start, r.tokens[i + len - 1].end, type});
      i += len;
    } else {
      ++i;
    }
  }
  return r;
}

}  // namespace test_support
