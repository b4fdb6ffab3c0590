#pragma once

#include <optional>
#include <string>
#include <vector>

#include "evt/dataset.hpp"
#include "evt/maxtest.hpp"
#include "evt/sweep.hpp"

namespace evt {

// One executed test, labelled for output.
struct NamedTest {
  TestKind kind = TestKind::MaxT;
  int k = 0;
  TestReport report;
};

// Per-dimension Hill estimates with confidence intervals at a fixed k.
struct HillSummary {
  int k = 0;
  double ci_level = 0.95;
  std::vector<std::string> names;
  std::vector<double> gamma_hat;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<double> thresholds;
};

// Everything one CLI analysis produced; serializable to JSON, CSV and a
// static SVG chart.
struct AnalysisReport {
  std::string command;
  std::string input_path;
  std::size_t n = 0;
  std::size_t p = 0;
  std::string transform = "none";
  double alpha = 0.05;
  std::string null_kind;  // "specified" or "equal"
  std::vector<NamedTest> tests;
  std::optional<HillSummary> hill;
  std::optional<SweepResult> sweep;
  std::vector<std::string> warnings;
};

enum class ReportFormat { Json, Csv, Svg };

ReportFormat parse_report_format(const std::string& name);

std::string report_json(const AnalysisReport& report);
std::string report_csv(const AnalysisReport& report);
std::string report_svg(const AnalysisReport& report);

// Writes the report in the requested format ("<out>.json" etc.) and
// returns the paths written.  A report with no test results, no Hill
// summary and no sweep is a parameter error.
std::vector<std::string> emit_report(const AnalysisReport& report,
                                     ReportFormat format,
                                     const std::string& out_stem);

}  // namespace evt
