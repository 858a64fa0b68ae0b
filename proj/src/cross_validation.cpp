#include "legalner/cross_validation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <set>
#include <stdexcept>
#include <thread>

#include "legalner/error.hpp"
#include "legalner/rng.hpp"
#include "legalner/tokens.hpp"
#include "legalner/unicode.hpp"

namespace legalner {

bool CrossValidationReport::all_ok() const {
  return std::all_of(folds.begin(), folds.end(), [](const FoldReport& f) { return f.ok; });
}

namespace {

std::vector<Corpus> plain_subsets(const Partition& partition, const Corpus& corpus) {
  std::vector<Corpus> out;
  for (const auto& subset : partition.subsets) {
    Corpus view;
    for (const auto& id : subset) view.documents.push_back(*corpus.find(id));
    out.push_back(std::move(view));
  }
  return out;
}

void run_fold(std::size_t k, const std::vector<Corpus>& subsets, const TaggerSpec& tagger,
              const CrossValidationOptions& options, FoldReport& report) {
  report.fold = k;
  report.confusion = ConfusionMatrix(scheme_labels(options.scheme));
  std::vector<Sentence> train;
  for (std::size_t j = 0; j < subsets.size(); ++j) {
    for (const Document& d : subsets[j].documents) {
      (j == k ? report.test_ids : report.train_ids).push_back(d.id);
      if (j != k) train.insert(train.end(), d.sentences.begin(), d.sentences.end());
    }
  }
  const std::set<std::string> train_ids(report.train_ids.begin(), report.train_ids.end());
  for (const auto& id : report.test_ids)
    if (train_ids.count(id)) throw std::logic_error("fold " + std::to_string(k) + ": document '" + id + "' leaks");

  std::vector<Sentence> validation;
  if (uses_validation(tagger.kind) && train.size() >= 2 && options.validation_fraction > 0.0) {
    std::vector<std::size_t> order(train.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(derive_seed(options.seed, "cv/validation", k));
    rng.shuffle(order);
    std::size_t n_val = static_cast<std::size_t>(std::floor(options.validation_fraction * static_cast<double>(train.size())));
    n_val = std::clamp<std::size_t>(n_val, 1, train.size() - 1);
    std::vector<bool> held(train.size(), false);
    for (std::size_t i = 0; i < n_val; ++i) held[order[i]] = true;
    std::vector<Sentence> kept;
    for (std::size_t i = 0; i < train.size(); ++i) (held[i] ? validation : kept).push_back(std::move(train[i]));
    train = std::move(kept);
  }
  report.train_sentences = train.size();
  report.validation_sentences = validation.size();

  const std::uint64_t seed = derive_seed(options.seed, "cv/tagger", k);
  std::unique_ptr<TaggerModel> model;
  if (tagger.kind == TaggerKind::Linear) {
    LinearOptions lo;
    lo.epochs = tagger.epochs;
    lo.seed = seed;
    lo.scheme = options.scheme;
    LinearTraining trained = train_linear(train, lo, validation);
    report.selected_epoch = trained.selected_epoch;
    model = std::move(trained.model);
  } else {
    model = train_tagger(tagger, train, validation, options.scheme, seed);
  }

  for (const Document& d : subsets[k].documents) {
    for (const Sentence& s : d.sentences) {
      ++report.test_sentences;
      const std::u32string text = unicode::decode(s.text);
      const auto tokens = word_tokenize(text);
      const auto gold = encode_labels(tokens, s.spans, options.scheme);
      const auto predicted = model->predict_labels(s, tokens);
      report.confusion.add(gold, predicted);
      DecodeOptions dopts;
      dopts.text = text;
      report.entities.add(s.spans, decode_labels(predicted, tokens, options.scheme, dopts));
    }
  }
  report.metrics = metrics_report(report.confusion.compact());
  report.ok = true;
}

}  // namespace

CrossValidationReport cross_validate(const Corpus& corpus, const Partition& partition, const TaggerSpec& tagger,
                                     const CrossValidationOptions& options) {
  check_partition(partition, corpus);
  if (partition.subsets.size() < 2) throw ParameterError("cross-validation needs at least two subsets");
  const std::vector<Corpus> subsets =
      options.deduplicate ? deduplicate_subsets(partition, corpus) : plain_subsets(partition, corpus);

  CrossValidationReport report;
  report.folds.resize(subsets.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < subsets.size(); k = next++) {
      FoldReport& fold = report.folds[k];
      try {
        run_fold(k, subsets, tagger, options, fold);
      } catch (const std::exception& e) {
        fold.ok = false;
        fold.error = e.what();
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(options.jobs, 1, subsets.size());
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  report.pooled_confusion = ConfusionMatrix(scheme_labels(options.scheme));
  for (const FoldReport& f : report.folds) {
    if (!f.ok) continue;
    report.pooled_confusion += f.confusion;
    report.pooled_entities += f.entities;
  }
  report.pooled = metrics_report(report.pooled_confusion.compact());
  return report;
}

}  // namespace legalner
