#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "legalner/corpus.hpp"

namespace legalner {

class TaggerModel;

enum NoiseOperation : std::uint8_t {
  kSubstitute = 1,
  kDelete = 2,
  kInsert = 4,
  kSwapAdjacent = 8,
};
inline constexpr std::uint8_t kAllNoiseOperations = kSubstitute | kDelete | kInsert | kSwapAdjacent;

/// "substitute+delete+insert+swap" style names; parse accepts '+' or ',' separators.
std::string noise_operations_name(std::uint8_t ops);
std::uint8_t parse_noise_operations(std::string_view text);

/// Lower-case Serbian Latin alphabet.
std::u32string default_noise_charset();

struct NoiseSpec {
  std::uint8_t operations = kAllNoiseOperations;
  double rate = 0.0;
  std::u32string charset = default_noise_charset();
  std::uint64_t seed = 0;
  /// Leave entity words and their delimiting characters untouched.
  bool protect_entities = false;
};

/// Throws ParameterError for a rate outside [0, 1], no operations with a
/// positive rate, or an empty charset with substitute/insert enabled.
void validate(const NoiseSpec& spec);

struct Edit {
  enum class Kind : std::uint8_t { Substitute, Delete, Insert, Swap };
  Kind kind;
  std::size_t position;  // Insert: before this char. Swap: with position + 1.
  char32_t ch = 0;       // Substitute / Insert
};

struct NoisySentence {
  Sentence sentence;
  std::vector<CharSpan> dropped;  // original spans that did not survive
  std::vector<std::string> warnings;
  std::size_t insertions = 0;
  std::size_t deletions = 0;
};

/// Applies edits (sorted by position, at most one per position, swaps not
/// overlapping other edits). Each span moves to the image of its original
/// characters (inserts belong to the character they precede), is trimmed,
/// and, if it was word-aligned before, re-snapped to the noisy word tokens.
NoisySentence apply_edits(const Sentence& sentence, std::span<const Edit> edits);

/// Every character is perturbed independently with probability `rate` by
/// one of the enabled operations chosen uniformly.
std::vector<Edit> draw_edits(const Sentence& sentence, const NoiseSpec& spec);

NoisySentence inject_noise(const Sentence& sentence, const NoiseSpec& spec);

struct NoisyCorpus {
  Corpus corpus;
  std::size_t dropped_spans = 0;
  std::vector<std::string> warnings;
};

/// Sentence j (in corpus order) uses seed derive_seed(spec.seed, "noise", j).
NoisyCorpus inject_noise(const Corpus& corpus, const NoiseSpec& spec);

struct RobustnessRow {
  NoiseSpec spec;
  double clean_f1 = 0.0;
  double noisy_f1 = 0.0;
  double delta_f1 = 0.0;  // noisy - clean
  std::size_t dropped_spans = 0;
};

/// Entity exact-match F1 on the clean corpus and on each noisy variant.
std::vector<RobustnessRow> robustness_eval(const TaggerModel& model, const Corpus& corpus,
                                           std::span<const NoiseSpec> grid);

/// operations,rate,seed,clean_f1,noisy_f1,delta_f1
std::string robustness_csv(std::span<const RobustnessRow> rows);

/// [{"operations":"substitute+swap","rate":0.1,"seed":1,"protect_entities":false,"charset":"abc"}, ...]
std::vector<NoiseSpec> parse_noise_grid(std::string_view json);

}  // namespace legalner
