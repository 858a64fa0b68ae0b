#include "legalner/metrics.hpp"

#include <algorithm>
#include <map>

#include "legalner/error.hpp"

namespace legalner {

ConfusionMatrix::ConfusionMatrix(std::vector<Label> classes)
    : classes_(std::move(classes)), counts_(classes_.size() * classes_.size(), 0) {}

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t t = 0;
  for (auto c : counts_) t += c;
  return t;
}

std::size_t ConfusionMatrix::index(const Label& label) const {
  auto it = std::find(classes_.begin(), classes_.end(), label);
  if (it == classes_.end()) throw ParameterError("confusion matrix: label " + label.str() + " not in class order");
  return static_cast<std::size_t>(it - classes_.begin());
}

void ConfusionMatrix::add(std::span<const Label> gold, std::span<const Label> predicted) {
  if (gold.size() != predicted.size())
    throw ParameterError("confusion matrix: " + std::to_string(gold.size()) + " gold vs " +
                         std::to_string(predicted.size()) + " predicted labels");
  for (std::size_t i = 0; i < gold.size(); ++i) add_count(index(gold[i]), index(predicted[i]));
}

void ConfusionMatrix::add_count(std::size_t gold, std::size_t predicted, std::uint64_t n) {
  counts_[gold * size() + predicted] += n;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  if (other.classes_ != classes_) throw ParameterError("confusion matrix: class orders differ");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  return *this;
}

ConfusionMatrix ConfusionMatrix::compact() const {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < size(); ++i) {
    std::uint64_t s = 0;
    for (std::size_t j = 0; j < size(); ++j) s += at(i, j) + at(j, i);
    if (s > 0) keep.push_back(i);
  }
  std::vector<Label> classes;
  for (std::size_t i : keep) classes.push_back(classes_[i]);
  ConfusionMatrix out(std::move(classes));
  for (std::size_t a = 0; a < keep.size(); ++a)
    for (std::size_t b = 0; b < keep.size(); ++b) out.add_count(a, b, at(keep[a], keep[b]));
  return out;
}

ConfusionMatrix token_confusion(std::span<const Label> gold, std::span<const Label> predicted,
                                std::vector<Label> classes) {
  ConfusionMatrix cm(std::move(classes));
  cm.add(gold, predicted);
  return cm;
}

double f1_score(double precision, double recall) {
  const double s = precision + recall;
  return s > 0.0 ? 2.0 * precision * recall / s : 0.0;
}

std::vector<ClassMetrics> per_class_metrics(const ConfusionMatrix& cm) {
  const std::size_t c = cm.size();
  const std::uint64_t total = cm.total();
  std::vector<std::uint64_t> row(c, 0), col(c, 0);
  for (std::size_t i = 0; i < c; ++i)
    for (std::size_t j = 0; j < c; ++j) {
      row[i] += cm.at(i, j);
      col[j] += cm.at(i, j);
    }
  std::vector<ClassMetrics> out;
  out.reserve(c);
  for (std::size_t i = 0; i < c; ++i) {
    ClassMetrics m;
    m.name = cm.classes()[i].str();
    m.tp = cm.at(i, i);
    m.fp = col[i] - m.tp;
    m.fn = row[i] - m.tp;
    m.tn = total - m.tp - m.fp - m.fn;
    if (m.tp + m.fp > 0) m.precision = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp);
    else m.flags |= kPrecisionUndefined;
    if (m.tp + m.fn > 0) m.recall = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
    else m.flags |= kRecallUndefined;
    if (m.precision + m.recall > 0.0) m.f1 = f1_score(m.precision, m.recall);
    else m.flags |= kF1Undefined;
    if (total > 0) m.accuracy = static_cast<double>(m.tp + m.tn) / static_cast<double>(total);
    out.push_back(std::move(m));
  }
  return out;
}

Averages macro_average(std::span<const ClassMetrics> table) {
  Averages a;
  if (table.empty()) return a;
  for (const auto& m : table) {
    a.precision += m.precision;
    a.recall += m.recall;
    a.accuracy += m.accuracy;
    a.f1 += m.f1;
  }
  const double n = static_cast<double>(table.size());
  a.precision /= n;
  a.recall /= n;
  a.accuracy /= n;
  a.f1 /= n;
  return a;
}

Averages micro_average(const ConfusionMatrix& cm) {
  std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
  for (const auto& m : per_class_metrics(cm)) {
    tp += m.tp;
    fp += m.fp;
    fn += m.fn;
    tn += m.tn;
  }
  Averages a;
  if (tp + fp > 0) a.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  if (tp + fn > 0) a.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  a.f1 = f1_score(a.precision, a.recall);
  const std::uint64_t all = tp + fp + fn + tn;
  if (all > 0) a.accuracy = static_cast<double>(tp + tn) / static_cast<double>(all);
  return a;
}

MetricsReport metrics_report(const ConfusionMatrix& cm) {
  MetricsReport r;
  r.per_class = per_class_metrics(cm);
  r.macro = macro_average(r.per_class);
  r.micro = micro_average(cm);
  return r;
}

double EntityCounts::precision() const {
  return tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
}
double EntityCounts::recall() const {
  return tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
}
double EntityCounts::f1() const { return f1_score(precision(), recall()); }

void EntityScorer::add(std::span<const CharSpan> gold, std::span<const CharSpan> predicted) {
  std::map<CharSpan, std::size_t> unmatched;
  for (const CharSpan& g : gold) ++unmatched[g];
  for (const CharSpan& p : predicted) {
    auto it = unmatched.find(p);
    if (it != unmatched.end() && it->second > 0) {
      --it->second;
      ++per_type_[index_of(p.entity)].tp;
    } else {
      ++per_type_[index_of(p.entity)].fp;
    }
  }
  for (const auto& [g, left] : unmatched) per_type_[index_of(g.entity)].fn += left;
}

EntityScorer& EntityScorer::operator+=(const EntityScorer& other) {
  for (std::size_t i = 0; i < kEntityTypeCount; ++i) per_type_[i] += other.per_type_[i];
  return *this;
}

EntityCounts EntityScorer::overall() const {
  EntityCounts c;
  for (const auto& t : per_type_) c += t;
  return c;
}

EntityScorer entity_exact_match(std::span<const CharSpan> gold, std::span<const CharSpan> predicted) {
  EntityScorer s;
  s.add(gold, predicted);
  return s;
}

}  // namespace legalner
