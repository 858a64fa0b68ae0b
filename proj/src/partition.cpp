#include "legalner/partition.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include <json.hpp>

#include "legalner/error.hpp"
#include "legalner/rng.hpp"
#include "legalner/tokens.hpp"
#include "legalner/unicode.hpp"

namespace legalner {

CategoryCounts category_counts(const Sentence& sentence) {
  CategoryCounts counts{};
  for (const CharSpan& s : sentence.spans) ++counts[index_of(s.entity)];
  const std::u32string text = unicode::decode(sentence.text);
  for (const TokenOffsets& w : whitespace_words(text)) {
    const bool inside = std::any_of(sentence.spans.begin(), sentence.spans.end(),
                                    [&](const CharSpan& s) { return s.start < w.end && w.start < s.end; });
    if (!inside) ++counts[kOutsideCategory];
  }
  return counts;
}

CategoryCounts category_counts(const Document& document) {
  CategoryCounts counts{};
  for (const Sentence& s : document.sentences) {
    const CategoryCounts c = category_counts(s);
    for (std::size_t i = 0; i < kCategoryCount; ++i) counts[i] += c[i];
  }
  return counts;
}

FeatureVector compute_features(const Document& document) {
  const CategoryCounts counts = category_counts(document);
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  if (total == 0) throw ParameterError("empty document '" + document.id + "'");
  FeatureVector f;
  for (std::size_t i = 0; i < kCategoryCount; ++i)
    f.values[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
  return f;
}

Partition stratified_partition(const Corpus& corpus, const PartitionOptions& options) {
  const std::size_t n = corpus.documents.size();
  if (options.k == 0) throw ParameterError("partition: K must be positive");
  if (options.k > n)
    throw ParameterError("partition: K = " + std::to_string(options.k) + " exceeds the number of documents (" +
                         std::to_string(n) + ")");

  std::vector<Point> features;
  features.reserve(n);
  for (const Document& d : corpus.documents) {
    const FeatureVector f = compute_features(d);
    features.emplace_back(f.values.begin(), f.values.end());
  }
  KMeansOptions km;
  km.k = options.k;
  km.p = options.p;
  km.seed = derive_seed(options.seed, "partition/kmeans");
  km.max_iters = options.max_iters;
  km.tol = options.tol;
  const KMeansResult clusters = kmeans_lp(features, km);

  std::vector<std::vector<std::size_t>> pools(options.k);
  for (std::size_t i = 0; i < n; ++i) pools[clusters.assignment[i]].push_back(i);

  Partition partition;
  partition.k = options.k;
  partition.seed = options.seed;
  partition.subsets.resize(options.k);
  Rng rng(derive_seed(options.seed, "partition/sampling"));
  std::size_t remaining = n;
  for (std::size_t round = 0; remaining > 0; ++round) {
    for (std::size_t c = 0; c < options.k; ++c) {
      auto& pool = pools[c];
      if (pool.empty()) continue;
      const std::size_t pick = static_cast<std::size_t>(rng.below(pool.size()));
      const std::size_t doc = pool[pick];
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
      partition.subsets[(c + round) % options.k].push_back(corpus.documents[doc].id);
      --remaining;
    }
  }
  return partition;
}

void check_partition(const Partition& partition, const Corpus& corpus) {
  if (partition.subsets.size() != partition.k)
    throw ValidationError("partition: " + std::to_string(partition.subsets.size()) + " subsets for K = " +
                          std::to_string(partition.k));
  std::set<std::string> seen;
  for (const auto& subset : partition.subsets)
    for (const auto& id : subset) {
      if (!corpus.find(id)) throw ValidationError("partition: unknown document '" + id + "'");
      if (!seen.insert(id).second) throw ValidationError("partition: document '" + id + "' appears twice");
    }
  if (seen.size() != corpus.documents.size())
    throw ValidationError("partition: " + std::to_string(corpus.documents.size() - seen.size()) +
                          " documents are not assigned");
}

std::vector<Corpus> deduplicate_subsets(const Partition& partition, const Corpus& corpus) {
  std::vector<Corpus> out;
  out.reserve(partition.subsets.size());
  for (const auto& subset : partition.subsets) {
    Corpus view;
    std::unordered_set<std::string> seen;
    for (const auto& id : subset) {
      const Document* d = corpus.find(id);
      if (!d) throw ValidationError("partition: unknown document '" + id + "'");
      Document doc;
      doc.id = d->id;
      doc.script = d->script;
      for (const Sentence& s : d->sentences)
        if (seen.insert(unicode::nfc(s.text)).second) doc.sentences.push_back(s);
      view.documents.push_back(std::move(doc));
    }
    out.push_back(std::move(view));
  }
  return out;
}

std::vector<CategoryCounts> balance_report(const Partition& partition, const Corpus& corpus) {
  std::vector<CategoryCounts> table;
  for (const auto& subset : partition.subsets) {
    CategoryCounts row{};
    for (const auto& id : subset) {
      const Document* d = corpus.find(id);
      if (!d) throw ValidationError("partition: unknown document '" + id + "'");
      const CategoryCounts c = category_counts(*d);
      for (std::size_t i = 0; i < kCategoryCount; ++i) row[i] += c[i];
    }
    table.push_back(row);
  }
  return table;
}

std::string balance_csv(const std::vector<CategoryCounts>& table) {
  std::string out = "subset";
  for (EntityType t : kEntityTypes) out += "," + std::string(display_name(t));
  out += ",O\n";
  for (std::size_t k = 0; k < table.size(); ++k) {
    out += std::to_string(k + 1);
    for (auto c : table[k]) out += "," + std::to_string(c);
    out += '\n';
  }
  return out;
}

std::string partition_to_json(const Partition& partition) {
  nlohmann::ordered_json j;
  j["K"] = partition.k;
  j["seed"] = partition.seed;
  j["subsets"] = partition.subsets;
  return j.dump(2) + "\n";
}

Partition partition_from_json(std::string_view json) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json.begin(), json.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed partition JSON: ") + e.what());
  }
  try {
    Partition p;
    p.k = j.at("K").get<std::size_t>();
    p.seed = j.at("seed").get<std::uint64_t>();
    p.subsets = j.at("subsets").get<std::vector<std::vector<std::string>>>();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("partition JSON: ") + e.what());
  }
}

}  // namespace legalner
