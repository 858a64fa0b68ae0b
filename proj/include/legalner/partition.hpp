#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "legalner/corpus.hpp"
#include "legalner/kmeans.hpp"

namespace legalner {

/// 8 entity types in canonical order followed by O.
inline constexpr std::size_t kCategoryCount = kEntityTypeCount + 1;
inline constexpr std::size_t kOutsideCategory = kEntityTypeCount;

using CategoryCounts = std::array<std::uint64_t, kCategoryCount>;

/// Entity components count span appearances; O counts whitespace-delimited
/// words that overlap no span.
CategoryCounts category_counts(const Document& document);
CategoryCounts category_counts(const Sentence& sentence);

struct FeatureVector {
  std::array<double, kCategoryCount> values{};
};

/// Normalized histogram of category_counts. Throws ParameterError
/// ("empty document") when every count is zero.
FeatureVector compute_features(const Document& document);

struct Partition {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<std::vector<std::string>> subsets;

  friend bool operator==(const Partition&, const Partition&) = default;
};

struct PartitionOptions {
  std::size_t k = 5;
  int p = 1;
  std::uint64_t seed = 0;
  std::size_t max_iters = 100;
  double tol = 0.0;
};

/// Clusters documents by feature vector once, then repeatedly draws one
/// random document from every non-empty cluster. In round r the draw from
/// cluster c goes to subset (c + r) mod K. Throws ParameterError when there
/// are fewer documents than subsets.
Partition stratified_partition(const Corpus& corpus, const PartitionOptions& options);

/// Throws ValidationError unless the subsets are a disjoint cover of the corpus ids.
void check_partition(const Partition& partition, const Corpus& corpus);

/// One corpus per subset, documents in subset order. Within a subset, a
/// sentence whose NFC text was already seen is dropped.
std::vector<Corpus> deduplicate_subsets(const Partition& partition, const Corpus& corpus);

/// K x 9 count table, one row per subset.
std::vector<CategoryCounts> balance_report(const Partition& partition, const Corpus& corpus);

/// Header "subset,Court,...,Reference,O", one row per subset.
std::string balance_csv(const std::vector<CategoryCounts>& table);

/// {"K":..,"seed":..,"subsets":[[ids]..]}
std::string partition_to_json(const Partition& partition);
Partition partition_from_json(std::string_view json);

}  // namespace legalner
