#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dosprop/asymptotics.hpp"
#include "dosprop/harness.hpp"
#include "dosprop/sample.hpp"

namespace dosprop {

// plain: one p-value per line. csv: header row, values taken from `column`
// (a header name, or a 1-based column number).
struct PValueFormat {
  enum class Kind { plain, csv } kind = Kind::plain;
  std::string column;

  // "plain" or "csv:COL"
  static PValueFormat parse(const std::string& text);
};

// Blank lines are skipped. ParseError carries the 1-based line number.
PValueSample parse_pvalues(const std::string& text, const PValueFormat& format);
PValueSample read_pvalues(const std::filesystem::path& path, const PValueFormat& format);

enum class ReportFormat { csv, markdown };

ReportFormat parse_report_format(const std::string& text);

std::string write_report(const AggregateStats& stats, ReportFormat format);
std::string write_sweep_report(const std::vector<SweepRow>& rows, ReportFormat format);

// Inverse of write_report(csv); values come back bit-exact.
AggregateStats parse_report_csv(const std::string& text);

void write_file(const std::filesystem::path& path, const std::string& bytes);
std::string read_file(const std::filesystem::path& path);

// gaussian:PI1,MU1 | uniform:PI1,B | composite:PI1,MU0,MU1 |
// piecewise:BREAKS,SLOPES with '/'-separated lists, e.g. piecewise:0.1/0.2,0.1/0.5
QuantileModel parse_model_spec(const std::string& text);

// Comma-separated list of numbers.
std::vector<double> parse_number_list(const std::string& text);

// JSON experiment description; see README for the schema. Unknown keys are errors.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace dosprop
