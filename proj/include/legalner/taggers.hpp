#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "legalner/corpus.hpp"
#include "legalner/labels.hpp"
#include "legalner/tokens.hpp"

namespace legalner {

class LineProcess;

enum class TaggerKind : std::uint8_t { Dictionary, Linear, External };

std::string_view tagger_kind_name(TaggerKind kind);

struct Prediction {
  std::vector<TokenOffsets> tokens;
  std::vector<Label> labels;
  std::vector<CharSpan> spans;
};

/// A trained sequence tagger over word tokens (see word_tokenize).
class TaggerModel {
 public:
  virtual ~TaggerModel() = default;

  virtual TaggerKind kind() const = 0;
  virtual TagScheme scheme() const = 0;
  /// Labels the model can emit, canonical order, O included.
  virtual const std::vector<Label>& labels() const = 0;
  virtual std::vector<Label> predict_labels(const Sentence& sentence, std::span<const TokenOffsets> tokens) const = 0;

  /// Tokenizes, labels and decodes (repair mode).
  Prediction predict(const Sentence& sentence) const;
};

class DictionaryTagger final : public TaggerModel {
 public:
  /// Keys are the entity's word-token surfaces joined by single spaces.
  DictionaryTagger(std::map<std::string, EntityType> gazetteer, TagScheme scheme);

  TaggerKind kind() const override { return TaggerKind::Dictionary; }
  TagScheme scheme() const override { return scheme_; }
  const std::vector<Label>& labels() const override { return labels_; }
  std::vector<Label> predict_labels(const Sentence& sentence, std::span<const TokenOffsets> tokens) const override;

  /// Longest match, left to right, non-overlapping.
  std::vector<CharSpan> match(const std::u32string& text, std::span<const TokenOffsets> tokens) const;
  const std::map<std::string, EntityType>& gazetteer() const { return gazetteer_; }

 private:
  std::map<std::string, EntityType> gazetteer_;
  std::size_t max_tokens_ = 0;
  TagScheme scheme_;
  std::vector<Label> labels_;
};

/// Every gold surface maps to its most frequent type; ties go to the
/// canonically first type. Throws ParameterError on empty input.
DictionaryTagger train_dictionary(std::span<const Sentence> training, TagScheme scheme = TagScheme::BIO);

/// Structured perceptron weights. Emission rows are features in `features`
/// order; transition row `labels.size()` is the start state.
struct LinearWeights {
  std::vector<std::string> features;  // sorted
  std::vector<double> emission;       // features.size() x labels.size()
  std::vector<double> transition;     // (labels.size() + 1) x labels.size()

  friend bool operator==(const LinearWeights&, const LinearWeights&) = default;
};

class LinearTagger final : public TaggerModel {
 public:
  LinearTagger(std::vector<Label> labels, LinearWeights weights, TagScheme scheme);

  TaggerKind kind() const override { return TaggerKind::Linear; }
  TagScheme scheme() const override { return scheme_; }
  const std::vector<Label>& labels() const override { return labels_; }
  std::vector<Label> predict_labels(const Sentence& sentence, std::span<const TokenOffsets> tokens) const override;

  const LinearWeights& weights() const { return weights_; }

 private:
  std::vector<Label> labels_;
  LinearWeights weights_;
  std::map<std::string, std::size_t, std::less<>> feature_index_;
  TagScheme scheme_;
};

/// Lower-cased word, shape, 2/3-char prefixes and suffixes, digit and
/// capitalisation flags, bias.
std::vector<std::string> token_features(std::u32string_view word);

struct LinearOptions {
  std::size_t epochs = 10;
  std::uint64_t seed = 0;
  TagScheme scheme = TagScheme::BIO;
  /// Test hook: receives the raw (not averaged) weight vector
  /// (emission then transition) after every training example.
  std::vector<std::vector<double>>* snapshots = nullptr;
};

struct LinearTraining {
  std::unique_ptr<LinearTagger> model;
  /// Macro token F1 on the validation sentences after each epoch (empty without validation).
  std::vector<double> validation_f1;
  /// 1-based epoch whose averaged weights were kept; 0 for zero epochs.
  std::size_t selected_epoch = 0;
};

/// Averaged structured perceptron with grammar-constrained Viterbi decoding.
/// With validation sentences, keeps the epoch with the best macro F1
/// (earliest on ties); otherwise the last. Throws ParameterError on empty input.
LinearTraining train_linear(std::span<const Sentence> training, const LinearOptions& options,
                            std::span<const Sentence> validation = {});

struct ExternalOptions {
  std::vector<std::string> command;
  TagScheme scheme = TagScheme::BIO;
  /// Include the gold spans in each request (for oracle adapters).
  bool send_gold = false;
  std::chrono::milliseconds timeout{30000};
};

/// Talks newline-delimited JSON to a child process:
///   request  {"sentence": text, "tokens": [[start, end], ...] (, "gold": [...])}
///   response {"labels": ["O", "B-Court", ...]}  one label per token
class ExternalTagger final : public TaggerModel {
 public:
  explicit ExternalTagger(ExternalOptions options);
  ~ExternalTagger() override;

  TaggerKind kind() const override { return TaggerKind::External; }
  TagScheme scheme() const override { return options_.scheme; }
  const std::vector<Label>& labels() const override { return labels_; }
  std::vector<Label> predict_labels(const Sentence& sentence, std::span<const TokenOffsets> tokens) const override;

  const ExternalOptions& options() const { return options_; }

 private:
  ExternalOptions options_;
  std::vector<Label> labels_;
  mutable std::mutex mutex_;
  mutable std::unique_ptr<LineProcess> process_;
};

struct TaggerSpec {
  TaggerKind kind = TaggerKind::Dictionary;
  std::size_t epochs = 10;
  ExternalOptions external;
};

/// Linear taggers select their checkpoint on validation data.
bool uses_validation(TaggerKind kind);

std::unique_ptr<TaggerModel> train_tagger(const TaggerSpec& spec, std::span<const Sentence> training,
                                          std::span<const Sentence> validation, TagScheme scheme,
                                          std::uint64_t seed);

/// JSON container {"format":"legalner-model","version":1,"kind":...,"scheme":...,"labels":[...],"params":{...}}.
std::string serialize_model(const TaggerModel& model);
/// Throws ModelFormatError for corrupt, truncated or unknown-version input.
std::unique_ptr<TaggerModel> parse_model(std::string_view text);
void save_model(const TaggerModel& model, const std::string& path);
std::unique_ptr<TaggerModel> load_model(const std::string& path);

}  // namespace legalner
