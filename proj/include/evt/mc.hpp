#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "evt/dependence.hpp"
#include "evt/maxtest.hpp"
#include "evt/numerics.hpp"
#include "evt/simulate.hpp"

namespace evt {

enum class Hypothesis { Null, Alternative };

// How the weighting matrix for MaxTOmega is obtained inside an
// experiment: from the model's theoretical tail dependence matrix, from
// a user-supplied file, or by inverting the per-replication empirical
// tail dependence matrix.
enum class OmegaSource { ModelFormula, File, EmpiricalInverse };

struct TestChoice {
  TestKind kind = TestKind::MaxT;
  OmegaSource omega_source = OmegaSource::ModelFormula;
  double ridge = 0.0;
};

// A full size/power experiment: the cross product of models, dimensions
// and tail fractions, each cell replicated with per-replication seeds.
// Null indices are identically 1; the specified-null tests use
// gamma0_j = 1 and the alternative perturbs that vector sparsely.
struct ExperimentConfig {
  std::vector<Model> models;
  std::vector<TestChoice> tests;
  std::size_t n = 1000;
  std::vector<std::size_t> p_values;
  std::vector<int> k_values;
  Probability alpha{0.05};
  int replications = 1000;
  Hypothesis hypothesis = Hypothesis::Null;
  std::uint64_t master_seed = 0;
  int threads = 0;  // 0 picks the hardware concurrency
  std::optional<PrecisionMatrix> supplied_omega;
  bool model_d_pareto_exponent = false;
  // Reuse a single alternative draw across replications instead of
  // redrawing per replication.
  bool fixed_alternative = false;
};

struct McCell {
  Model model = Model::A;
  TestKind test = TestKind::MaxT;
  std::size_t p = 0;
  int k = 0;
  Hypothesis hypothesis = Hypothesis::Null;
  int replications = 0;
  int rejections = 0;
  int failures = 0;
  // A cell reporting mostly failures carries no usable rate.
  bool valid = true;
  double rejection_rate = 0.0;
  double mc_stderr = 0.0;
};

struct McReport {
  std::vector<McCell> cells;
  std::size_t n = 0;
  double alpha = 0.0;
  int replications = 0;
  Hypothesis hypothesis = Hypothesis::Null;
  std::uint64_t master_seed = 0;
};

// Per-replication outcome of one test.
enum class Outcome : std::uint8_t { Accept = 0, Reject = 1, Failure = 2 };

// Rate / stderr / validity from a tally of outcomes; a cell is invalid
// when failures exceed half the replications.
McCell aggregate_cell(Model model, TestKind test, std::size_t p, int k,
                      Hypothesis hyp, const std::vector<Outcome>& outcomes);

McReport run_experiment(const ExperimentConfig& config);

// Deterministic text forms: byte-identical for identical configs no
// matter how many threads ran the experiment.
std::string mc_report_csv(const McReport& report);
std::string mc_report_json(const McReport& report);
McReport parse_mc_csv(const std::string& text);

// Comparison of a report against a reference table CSV with columns
// model,test,p,k,hypothesis,rate.
struct CellDiff {
  McCell cell;
  double reference_rate = 0.0;
  double deviation = 0.0;  // |rate - reference|
  bool within = true;
};

struct TableDiff {
  std::vector<CellDiff> cells;
  double tolerance = 0.0;
  double max_deviation = 0.0;
  int flagged = 0;

  bool all_within() const { return flagged == 0; }
};

// Every valid report cell must have a reference row; a missing key is a
// parameter error.  Power rows archived at k = 100 also answer for
// report cells run at k = 80 (and vice versa), covering the two
// conventions for the second tail fraction.
TableDiff compare_tables(const McReport& report,
                         const std::string& reference_csv_path,
                         double tolerance);

std::string table_diff_text(const TableDiff& diff);

}  // namespace evt
