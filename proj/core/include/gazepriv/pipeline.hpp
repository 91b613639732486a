#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gazepriv/config.hpp"

namespace gazepriv {

struct UtilityColumns {
  std::optional<double> u50_e50;
  std::optional<double> u95_e95;
  std::optional<double> success_rate;
  std::size_t fixation_count = 0;
  std::size_t valid_interactions = 0;
  std::size_t total_targets = 0;
};

struct ReportRow {
  std::string approach;
  std::string variant;
  int approach_rank = 0;
  std::string embedder;
  std::optional<double> rank1_ir_pct;
  // Per classifier, in configuration order.
  std::vector<std::string> classifier_names;
  std::vector<UtilityColumns> utility;
  std::int64_t initialization_samples = 0;
  std::int64_t latency_ms = 0;
  double latency_samples = 0.0;
  std::size_t processed = 0;
  std::size_t skipped = 0;
  // Why blank metrics are blank.
  std::vector<std::string> notes;
};

struct PipelineResult {
  std::vector<ReportRow> rows;
  std::size_t ingested = 0;
};

// Runs every configured privatizer over the dataset. Results do not depend
// on `workers`.
PipelineResult run_pipeline(const PipelineConfig& config);

// Row ordering: approach rank, then variant (numeric-aware), stable.
void sort_rows(std::vector<ReportRow>& rows);

std::string report_csv(const std::vector<ReportRow>& rows);
std::string report_json(const std::vector<ReportRow>& rows);
std::string report_text(const std::vector<ReportRow>& rows);
std::vector<ReportRow> rows_from_json(const std::string& json_text);

// Writes report.csv, report.json and report.txt into `dir`.
void emit_report(const std::vector<ReportRow>& rows, const std::string& dir);

}  // namespace gazepriv
