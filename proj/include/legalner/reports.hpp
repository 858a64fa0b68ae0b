#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "legalner/cross_validation.hpp"
#include "legalner/metrics.hpp"

namespace legalner {

/// {"folds":[{"confusion":[[..]],"per_class":{..},"macro":{..},...}],"pooled":{..}}
std::string report_to_json(const CrossValidationReport& report);

/// Class,Recall,Precision,Accuracy,F1 rows plus an Average row, two decimals.
std::string metrics_table_csv(const MetricsReport& report);
/// Gold classes as rows, predicted as columns.
std::string confusion_csv(const ConfusionMatrix& cm);

struct TableRow {
  std::string name;
  double recall = 0.0, precision = 0.0, accuracy = 0.0, f1 = 0.0;
};

/// Reads the metrics_table_csv layout; an "Average" row, if present, is skipped.
std::vector<TableRow> parse_metrics_table(std::string_view csv);

/// Column means. With recompute_f1, F1 per row is first rebuilt from P and R.
Averages aggregate_rows(std::span<const TableRow> rows, bool recompute_f1);

std::string format_fixed(double value, int decimals);

}  // namespace legalner
