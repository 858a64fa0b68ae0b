#include "legalner/reports.hpp"

#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "legalner/error.hpp"

namespace legalner {

namespace {

using ojson = nlohmann::ordered_json;

ojson averages_json(const Averages& a) {
  return {{"recall", a.recall}, {"precision", a.precision}, {"accuracy", a.accuracy}, {"f1", a.f1}};
}

ojson entity_json(const EntityCounts& c) {
  return {{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn},
          {"precision", c.precision()}, {"recall", c.recall()}, {"f1", c.f1()}};
}

ojson metrics_json(const ConfusionMatrix& full, const MetricsReport& m, const EntityScorer& entities) {
  const ConfusionMatrix cm = full.compact();
  ojson j;
  j["classes"] = ojson::array();
  for (const Label& l : cm.classes()) j["classes"].push_back(l.str());
  j["confusion"] = ojson::array();
  for (std::size_t g = 0; g < cm.size(); ++g) {
    ojson row = ojson::array();
    for (std::size_t p = 0; p < cm.size(); ++p) row.push_back(cm.at(g, p));
    j["confusion"].push_back(std::move(row));
  }
  j["per_class"] = ojson::array();
  for (const ClassMetrics& c : m.per_class) {
    j["per_class"].push_back({{"class", c.name}, {"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}, {"tn", c.tn},
                              {"recall", c.recall}, {"precision", c.precision}, {"accuracy", c.accuracy},
                              {"f1", c.f1}, {"flags", c.flags}});
  }
  j["macro"] = averages_json(m.macro);
  j["micro"] = averages_json(m.micro);
  ojson ent;
  ent["overall"] = entity_json(entities.overall());
  ent["by_type"] = ojson::object();
  for (EntityType t : kEntityTypes) ent["by_type"][std::string(wire_name(t))] = entity_json(entities.by_type(t));
  j["entities"] = std::move(ent);
  return j;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out(1);
  for (char c : line) {
    if (c == ',') out.emplace_back();
    else if (c != '\r') out.back() += c;
  }
  return out;
}

}  // namespace

std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

std::string report_to_json(const CrossValidationReport& report) {
  ojson j;
  j["folds"] = ojson::array();
  for (const FoldReport& f : report.folds) {
    ojson fj;
    fj["fold"] = f.fold + 1;
    fj["ok"] = f.ok;
    if (!f.ok) fj["error"] = f.error;
    fj["train_documents"] = f.train_ids;
    fj["test_documents"] = f.test_ids;
    fj["train_sentences"] = f.train_sentences;
    fj["validation_sentences"] = f.validation_sentences;
    fj["test_sentences"] = f.test_sentences;
    if (f.selected_epoch) fj["selected_epoch"] = *f.selected_epoch;
    if (f.ok) fj.update(metrics_json(f.confusion, f.metrics, f.entities));
    j["folds"].push_back(std::move(fj));
  }
  j["pooled"] = metrics_json(report.pooled_confusion, report.pooled, report.pooled_entities);
  j["note"] = "averages are macro over all classes, O included; micro averages are dominated by the O class";
  return j.dump(2) + "\n";
}

std::string metrics_table_csv(const MetricsReport& report) {
  std::ostringstream out;
  out << "Class,Recall,Precision,Accuracy,F1\n";
  auto row = [&](const std::string& name, double r, double p, double a, double f) {
    out << name << ',' << format_fixed(r, 2) << ',' << format_fixed(p, 2) << ',' << format_fixed(a, 2) << ','
        << format_fixed(f, 2) << '\n';
  };
  for (const ClassMetrics& c : report.per_class) row(c.name, c.recall, c.precision, c.accuracy, c.f1);
  row("Average", report.macro.recall, report.macro.precision, report.macro.accuracy, report.macro.f1);
  return out.str();
}

std::string confusion_csv(const ConfusionMatrix& cm) {
  std::ostringstream out;
  out << "gold\\predicted";
  for (const Label& l : cm.classes()) out << ',' << l.str();
  out << '\n';
  for (std::size_t g = 0; g < cm.size(); ++g) {
    out << cm.classes()[g].str();
    for (std::size_t p = 0; p < cm.size(); ++p) out << ',' << cm.at(g, p);
    out << '\n';
  }
  return out.str();
}

std::vector<TableRow> parse_metrics_table(std::string_view csv) {
  std::istringstream in{std::string(csv)};
  std::string line;
  std::vector<TableRow> rows;
  std::size_t number = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (header) {
      header = false;
      if (cells[0] == "Class") continue;
    }
    if (cells.size() != 5) throw ParseError("metrics table: expected 5 columns", number, 1);
    if (cells[0] == "Average") continue;
    TableRow r;
    r.name = cells[0];
    double* fields[] = {&r.recall, &r.precision, &r.accuracy, &r.f1};
    for (std::size_t i = 0; i < 4; ++i) {
      try {
        std::size_t used = 0;
        *fields[i] = std::stod(cells[i + 1], &used);
        if (used != cells[i + 1].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw ParseError("metrics table: bad number '" + cells[i + 1] + "'", number, i + 2);
      }
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

Averages aggregate_rows(std::span<const TableRow> rows, bool recompute_f1) {
  if (rows.empty()) throw ParameterError("aggregate: no rows");
  Averages a;
  for (const TableRow& r : rows) {
    a.recall += r.recall;
    a.precision += r.precision;
    a.accuracy += r.accuracy;
    a.f1 += recompute_f1 ? f1_score(r.precision, r.recall) : r.f1;
  }
  const double n = static_cast<double>(rows.size());
  a.recall /= n;
  a.precision /= n;
  a.accuracy /= n;
  a.f1 /= n;
  return a;
}

}  // namespace legalner
