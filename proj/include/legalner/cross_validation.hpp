#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "legalner/corpus.hpp"
#include "legalner/metrics.hpp"
#include "legalner/partition.hpp"
#include "legalner/taggers.hpp"

namespace legalner {

struct CrossValidationOptions {
  TagScheme scheme = TagScheme::BIO;
  std::uint64_t seed = 0;
  /// Folds run concurrently on up to this many threads.
  std::size_t jobs = 1;
  /// Share of training sentences held out for checkpoint selection.
  double validation_fraction = 0.1;
  /// Drop duplicate sentences within each subset first.
  bool deduplicate = true;
};

struct FoldReport {
  std::size_t fold = 0;
  bool ok = false;
  std::string error;
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
  std::size_t train_sentences = 0;
  std::size_t validation_sentences = 0;
  std::size_t test_sentences = 0;
  std::optional<std::size_t> selected_epoch;
  /// Over the full scheme label order, so folds add up.
  ConfusionMatrix confusion;
  MetricsReport metrics;  // over confusion.compact()
  EntityScorer entities;
};

struct CrossValidationReport {
  std::vector<FoldReport> folds;
  ConfusionMatrix pooled_confusion;  // sum of successful folds
  MetricsReport pooled;
  EntityScorer pooled_entities;

  bool all_ok() const;
};

/// Fold k tests on subset k and trains on all others. A failing fold is
/// reported and skipped; the rest proceed.
CrossValidationReport cross_validate(const Corpus& corpus, const Partition& partition, const TaggerSpec& tagger,
                                     const CrossValidationOptions& options);

}  // namespace legalner
