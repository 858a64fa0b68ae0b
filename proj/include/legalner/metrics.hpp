#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "legalner/corpus.hpp"
#include "legalner/labels.hpp"

namespace legalner {

/// Token-level counts, rows = gold class, columns = predicted class.
class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(std::vector<Label> classes);

  const std::vector<Label>& classes() const { return classes_; }
  std::size_t size() const { return classes_.size(); }
  std::uint64_t at(std::size_t gold, std::size_t predicted) const { return counts_[gold * size() + predicted]; }
  std::uint64_t total() const;
  /// Index of a class; throws ParameterError for labels outside the order.
  std::size_t index(const Label& label) const;

  /// Throws ParameterError on length mismatch or unknown labels.
  void add(std::span<const Label> gold, std::span<const Label> predicted);
  void add_count(std::size_t gold, std::size_t predicted, std::uint64_t n = 1);
  /// Matrix addition; class orders must be identical.
  ConfusionMatrix& operator+=(const ConfusionMatrix& other);

  /// Drops classes with neither gold nor predicted occurrences.
  ConfusionMatrix compact() const;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::vector<Label> classes_;
  std::vector<std::uint64_t> counts_;
};

ConfusionMatrix token_confusion(std::span<const Label> gold, std::span<const Label> predicted,
                                std::vector<Label> classes);

enum MetricFlag : std::uint8_t {
  kPrecisionUndefined = 1,  // TP + FP == 0
  kRecallUndefined = 2,     // TP + FN == 0
  kF1Undefined = 4,         // P + R == 0
};

struct ClassMetrics {
  std::string name;
  std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
  double precision = 0.0, recall = 0.0, accuracy = 0.0, f1 = 0.0;
  std::uint8_t flags = 0;
};

struct Averages {
  double precision = 0.0, recall = 0.0, accuracy = 0.0, f1 = 0.0;
};

/// Harmonic mean; 0 when p + r == 0.
double f1_score(double precision, double recall);

/// One-vs-rest counts per class. Zero denominators give 0 and set a flag.
std::vector<ClassMetrics> per_class_metrics(const ConfusionMatrix& cm);
/// Unweighted mean over every row of the table, O included.
Averages macro_average(std::span<const ClassMetrics> table);
/// Pooled TP/FP/FN/TN over classes. With O dominating the data this is
/// optimistic; macro averages are the headline figures.
Averages micro_average(const ConfusionMatrix& cm);

struct MetricsReport {
  std::vector<ClassMetrics> per_class;
  Averages macro;
  Averages micro;
};

MetricsReport metrics_report(const ConfusionMatrix& cm);

struct EntityCounts {
  std::uint64_t tp = 0, fp = 0, fn = 0;
  double precision() const;
  double recall() const;
  double f1() const;
  EntityCounts& operator+=(const EntityCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
};

/// Entity-level exact match: a prediction is a TP iff start, end and type
/// equal a not yet matched gold span.
class EntityScorer {
 public:
  void add(std::span<const CharSpan> gold, std::span<const CharSpan> predicted);
  EntityScorer& operator+=(const EntityScorer& other);

  const EntityCounts& by_type(EntityType t) const { return per_type_[index_of(t)]; }
  EntityCounts overall() const;

 private:
  std::array<EntityCounts, kEntityTypeCount> per_type_{};
};

EntityScorer entity_exact_match(std::span<const CharSpan> gold, std::span<const CharSpan> predicted);

}  // namespace legalner
