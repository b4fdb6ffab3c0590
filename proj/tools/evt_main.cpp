#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "evt/dataset.hpp"
#include "evt/dependence.hpp"
#include "evt/errors.hpp"
#include "evt/format.hpp"
#include "evt/hill.hpp"
#include "evt/maxtest.hpp"
#include "evt/mc.hpp"
#include "evt/report.hpp"
#include "evt/simulate.hpp"
#include "evt/sweep.hpp"

namespace {

using namespace evt;

std::vector<TestKind> parse_test_list(const std::vector<std::string>& names) {
  std::vector<TestKind> kinds;
  for (const std::string& name : names) kinds.push_back(parse_test_kind(name));
  return kinds;
}

NullSpec make_null(bool equal, const std::string& gamma0_path, std::size_t p) {
  if (equal && !gamma0_path.empty())
    throw parameter_error("--equal and --gamma0 are mutually exclusive");
  if (equal) return NullSpec::equal();
  if (gamma0_path.empty())
    throw parameter_error("specify the null: --gamma0 FILE or --equal");
  return NullSpec::specified(load_gamma0(gamma0_path, p));
}

// Options shared by the data-analysis commands.
struct AnalysisOptions {
  std::string input;
  bool negate = false;
  std::string gamma0_path;
  bool equal = false;
  std::vector<std::string> tests;
  double alpha = 0.05;
  double ridge = 0.0;
  std::string omega_path;
  std::string out = "report";
  std::string format = "json";
};

void add_analysis_options(CLI::App* cmd, AnalysisOptions& opt) {
  cmd->add_option("--input", opt.input, "CSV dataset, observations in rows")
      ->required();
  cmd->add_flag("--negate", opt.negate,
                "negate the data first (lower-tail losses)");
  cmd->add_option("--gamma0", opt.gamma0_path,
                  "file with one null index per line");
  cmd->add_flag("--equal", opt.equal, "test equality of the indices instead");
  cmd->add_option("--tests", opt.tests,
                  "comma-separated subset of T,Tstar,TOmega,TW,TWstar")
      ->delimiter(',');
  cmd->add_option("--alpha", opt.alpha, "test level")->capture_default_str();
  cmd->add_option("--ridge", opt.ridge,
                  "diagonal regularization for matrix inversions")
      ->capture_default_str();
  cmd->add_option("--omega-file", opt.omega_path,
                  "weighting matrix for TOmega (dense, whitespace-separated)");
  cmd->add_option("--out", opt.out, "output stem")->capture_default_str();
  cmd->add_option("--format", opt.format, "json, csv or svg")
      ->capture_default_str();
}

std::vector<TestKind> resolve_tests(const AnalysisOptions& opt,
                                    NullSpec::Kind null_kind) {
  std::vector<TestKind> kinds;
  if (opt.tests.empty()) {
    kinds.push_back(null_kind == NullSpec::Kind::Equal ? TestKind::MaxTStar
                                                       : TestKind::MaxT);
  } else {
    kinds = parse_test_list(opt.tests);
  }
  for (TestKind kind : kinds) require_test_matches_null(kind, null_kind);
  return kinds;
}

std::optional<PrecisionMatrix> load_omega_if_needed(
    const AnalysisOptions& opt, const std::vector<TestKind>& kinds,
    std::size_t p) {
  const bool wants_omega =
      std::find(kinds.begin(), kinds.end(), TestKind::MaxTOmega) != kinds.end();
  if (!opt.omega_path.empty()) {
    if (!wants_omega)
      throw parameter_error("--omega-file given but TOmega is not requested");
    PrecisionMatrix omega = load_omega(opt.omega_path);
    if (omega.p() != p)
      throw parameter_error("weighting matrix is " + std::to_string(omega.p()) +
                            "-dimensional but the data has " +
                            std::to_string(p) + " columns");
    return omega;
  }
  return std::nullopt;
}

void print_test_line(const NamedTest& test) {
  std::cout << test_kind_name(test.kind) << ": statistic "
            << format_double(test.report.statistic) << ", threshold "
            << format_double(test.report.threshold) << ", p-value "
            << format_double(test.report.p_value.value()) << ", "
            << (test.report.reject ? "reject" : "no rejection") << " at level "
            << format_double(test.report.alpha.value()) << "\n";
}

void print_written(const std::vector<std::string>& paths) {
  for (const std::string& path : paths) std::cout << "wrote " << path << "\n";
}

int run_test_command(const AnalysisOptions& opt, int k, double hill_ci) {
  const Dataset ds = ingest_csv(
      opt.input, opt.negate ? Transform::Negate : Transform::None);
  const std::size_t p = ds.matrix.cols();
  const NullSpec null = make_null(opt.equal, opt.gamma0_path, p);
  const std::vector<TestKind> kinds = resolve_tests(opt, null.kind);
  const KChoice ks = KChoice::uniform(k, p, ds.matrix.rows());
  const std::optional<PrecisionMatrix> omega =
      load_omega_if_needed(opt, kinds, p);

  AnalysisReport report;
  report.command = "test";
  report.input_path = opt.input;
  report.n = ds.matrix.rows();
  report.p = p;
  report.transform = opt.negate ? "negate" : "none";
  report.alpha = opt.alpha;
  report.null_kind =
      null.kind == NullSpec::Kind::Equal ? "equal" : "specified";

  if (auto warning = tail_size_warning(ks)) report.warnings.push_back(*warning);

  for (TestKind kind : kinds) {
    NamedTest named;
    named.kind = kind;
    named.k = k;
    switch (kind) {
      case TestKind::MaxT:
      case TestKind::MaxTStar:
        named.report = run_max_test(ds.matrix, ks, null, Probability(opt.alpha));
        break;
      case TestKind::MaxTOmega:
        if (omega) {
          named.report =
              run_omega_max_test(ds.matrix, ks, null, Probability(opt.alpha),
                                 *omega);
        } else {
          const TailDepMatrix sigma = tail_dependence_matrix(ds.matrix, k);
          for (std::size_t dim : sigma.tied_threshold_dims)
            report.warnings.push_back(
                "ties at the tail threshold of dimension " +
                std::to_string(dim + 1));
          PrecisionMatrix inv = approx_omega_from_R(sigma.sigma, opt.ridge);
          inv.source = PrecisionMatrix::Source::EmpiricalInverse;
          named.report = run_omega_max_test(ds.matrix, ks, null,
                                            Probability(opt.alpha), inv);
        }
        break;
      case TestKind::WaldT:
      case TestKind::WaldTStar:
        named.report =
            wald_test(ds.matrix, ks, null, Probability(opt.alpha), opt.ridge);
        break;
    }
    report.tests.push_back(std::move(named));
  }

  HillSummary hill;
  hill.k = k;
  hill.ci_level = hill_ci;
  hill.names = ds.column_names;
  const HillEstimates estimates = hill_estimates(ds.matrix, ks);
  for (std::size_t j = 0; j < p; ++j) {
    hill.gamma_hat.push_back(estimates.gamma_hat[j]);
    hill.thresholds.push_back(estimates.thresholds[j]);
    const auto [lo, hi] = hill_confidence_interval(
        estimates.gamma_hat[j], k, Probability(hill_ci));
    hill.lower.push_back(lo);
    hill.upper.push_back(hi);
  }
  report.hill = std::move(hill);

  for (const NamedTest& test : report.tests) print_test_line(test);
  for (const std::string& warning : report.warnings)
    std::cerr << "warning: " << warning << "\n";
  print_written(
      emit_report(report, parse_report_format(opt.format), opt.out));
  return 0;
}

int run_sweep_command(const AnalysisOptions& opt, int k_min, int k_max,
                      int step, int hill_k, double hill_ci) {
  const Dataset ds = ingest_csv(
      opt.input, opt.negate ? Transform::Negate : Transform::None);
  const std::size_t p = ds.matrix.cols();
  const NullSpec null = make_null(opt.equal, opt.gamma0_path, p);
  const std::vector<TestKind> kinds = resolve_tests(opt, null.kind);
  const std::optional<PrecisionMatrix> omega =
      load_omega_if_needed(opt, kinds, p);

  AnalysisReport report;
  report.command = "sweep-k";
  report.input_path = opt.input;
  report.n = ds.matrix.rows();
  report.p = p;
  report.transform = opt.negate ? "negate" : "none";
  report.alpha = opt.alpha;
  report.null_kind =
      null.kind == NullSpec::Kind::Equal ? "equal" : "specified";
  report.sweep = sweep_k(ds.matrix, k_min, k_max, step, null, kinds,
                         Probability(opt.alpha), opt.ridge, omega);

  if (hill_k > 0) {
    const KChoice ks = KChoice::uniform(hill_k, p, ds.matrix.rows());
    const HillEstimates estimates = hill_estimates(ds.matrix, ks);
    HillSummary hill;
    hill.k = hill_k;
    hill.ci_level = hill_ci;
    hill.names = ds.column_names;
    for (std::size_t j = 0; j < p; ++j) {
      hill.gamma_hat.push_back(estimates.gamma_hat[j]);
      hill.thresholds.push_back(estimates.thresholds[j]);
      const auto [lo, hi] = hill_confidence_interval(
          estimates.gamma_hat[j], hill_k, Probability(hill_ci));
      hill.lower.push_back(lo);
      hill.upper.push_back(hi);
    }
    report.hill = std::move(hill);
  }

  std::size_t gaps = 0;
  for (const SweepCurve& curve : report.sweep->curves)
    for (const auto& pv : curve.p_values)
      if (!pv) ++gaps;
  std::cout << "swept k = " << k_min << ".." << k_max << " (step " << step
            << "), " << report.sweep->curves.size() << " test(s), " << gaps
            << " gap(s)\n";
  print_written(
      emit_report(report, parse_report_format(opt.format), opt.out));
  return 0;
}

int run_simulate_command(const std::string& model_name, std::size_t n,
                         std::size_t p, double gamma_value,
                         const std::string& gamma_path, std::uint64_t seed,
                         std::uint64_t stream, bool d_pareto,
                         const std::string& out) {
  if (model_name.size() != 1)
    throw parameter_error("model must be one of A, B, C, D");
  ModelSpec spec;
  spec.model = parse_model(model_name[0]);
  spec.n = n;
  spec.p = p;
  spec.model_d_pareto_exponent = d_pareto;
  spec.gamma = gamma_path.empty() ? std::vector<double>(p, gamma_value)
                                  : load_gamma0(gamma_path, p);

  const GenerationResult gen = generate(spec, SeedSpec{seed, stream});
  std::vector<std::string> names;
  for (std::size_t j = 0; j < p; ++j)
    names.push_back("col" + std::to_string(j + 1));
  write_csv(out, gen.matrix, names);
  std::cout << "wrote " << out << " (model " << model_letter(spec.model)
            << ", n=" << n << ", p=" << p << ", seed=" << seed << ", stream="
            << stream << ")\n";
  if (gen.saturated > 0)
    std::cerr << "warning: " << gen.saturated
              << " value(s) overflowed and were saturated\n";
  return 0;
}

struct McOptions {
  std::vector<std::string> models;
  std::vector<std::string> tests;
  std::size_t n = 1000;
  std::vector<std::size_t> p_list;
  std::vector<int> k_list;
  double alpha = 0.05;
  int reps = 1000;
  std::string hypothesis = "null";
  std::uint64_t seed = 0;
  int threads = 0;
  std::string omega_source = "model";
  std::string omega_path;
  double ridge = 0.0;
  bool fixed_alternative = false;
  bool d_pareto = false;
  std::string out = "mc_report";
  std::string format = "csv";
};

int run_mc_command(const McOptions& opt) {
  ExperimentConfig config;
  for (const std::string& name : opt.models) {
    if (name.size() != 1)
      throw parameter_error("model must be one of A, B, C, D, got '" + name +
                            "'");
    config.models.push_back(parse_model(name[0]));
  }

  OmegaSource source = OmegaSource::ModelFormula;
  if (opt.omega_source == "model")
    source = OmegaSource::ModelFormula;
  else if (opt.omega_source == "empirical")
    source = OmegaSource::EmpiricalInverse;
  else if (opt.omega_source == "file")
    source = OmegaSource::File;
  else
    throw parameter_error("unknown omega source '" + opt.omega_source +
                          "' (expected model, empirical or file)");

  for (TestKind kind : parse_test_list(opt.tests)) {
    TestChoice choice;
    choice.kind = kind;
    choice.omega_source = source;
    choice.ridge = opt.ridge;
    config.tests.push_back(choice);
  }

  config.n = opt.n;
  config.p_values = opt.p_list;
  config.k_values = opt.k_list;
  config.alpha = Probability(opt.alpha);
  config.replications = opt.reps;
  if (opt.hypothesis == "null")
    config.hypothesis = Hypothesis::Null;
  else if (opt.hypothesis == "alternative")
    config.hypothesis = Hypothesis::Alternative;
  else
    throw parameter_error("unknown hypothesis '" + opt.hypothesis +
                          "' (expected null or alternative)");
  config.master_seed = opt.seed;
  config.threads = opt.threads;
  config.fixed_alternative = opt.fixed_alternative;
  config.model_d_pareto_exponent = opt.d_pareto;
  if (source == OmegaSource::File) {
    if (opt.omega_path.empty())
      throw parameter_error("--omega-source file needs --omega-file");
    config.supplied_omega = load_omega(opt.omega_path);
  }

  const McReport report = run_experiment(config);

  std::string path;
  if (opt.format == "csv") {
    path = opt.out + ".csv";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write: " + path);
    out << mc_report_csv(report);
  } else if (opt.format == "json") {
    path = opt.out + ".json";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write: " + path);
    out << mc_report_json(report);
  } else {
    throw parameter_error("unknown format '" + opt.format +
                          "' (mc reports support csv or json)");
  }

  int invalid = 0;
  for (const McCell& cell : report.cells)
    if (!cell.valid) ++invalid;
  std::cout << report.cells.size() << " cell(s), " << report.replications
            << " replication(s) each\n";
  if (invalid > 0)
    std::cerr << "warning: " << invalid
              << " cell(s) invalid (more than half the replications failed)\n";
  std::cout << "wrote " << path << "\n";
  return 0;
}

int run_compare_command(const std::string& report_path,
                        const std::string& reference_path, double tolerance) {
  std::ifstream in(report_path, std::ios::binary);
  if (!in) throw data_error("cannot open report: " + report_path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const McReport report = parse_mc_csv(buffer.str());
  const TableDiff diff = compare_tables(report, reference_path, tolerance);
  std::cout << table_diff_text(diff);
  return diff.all_within() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hill estimation and simultaneous testing of extreme value "
               "indices across many dimensions"};
  app.require_subcommand(1);

  // test
  AnalysisOptions test_opt;
  int test_k = 0;
  double test_hill_ci = 0.95;
  CLI::App* test_cmd =
      app.add_subcommand("test", "run the tests at one tail fraction k");
  add_analysis_options(test_cmd, test_opt);
  test_cmd->add_option("--k", test_k, "tail sample size per dimension")
      ->required();
  test_cmd->add_option("--hill-ci", test_hill_ci,
                       "confidence level for the Hill intervals")
      ->capture_default_str();

  // sweep-k
  AnalysisOptions sweep_opt;
  sweep_opt.out = "sweep";
  int k_min = 0, k_max = 0, k_step = 1, sweep_hill_k = 0;
  double sweep_hill_ci = 0.95;
  CLI::App* sweep_cmd = app.add_subcommand(
      "sweep-k", "trace p-values across a grid of tail fractions");
  add_analysis_options(sweep_cmd, sweep_opt);
  sweep_cmd->add_option("--k-min", k_min, "smallest k")->required();
  sweep_cmd->add_option("--k-max", k_max, "largest k")->required();
  sweep_cmd->add_option("--step", k_step, "grid step")->capture_default_str();
  sweep_cmd->add_option("--hill-k", sweep_hill_k,
                        "also report Hill intervals at this k");
  sweep_cmd->add_option("--hill-ci", sweep_hill_ci,
                        "confidence level for the Hill intervals")
      ->capture_default_str();

  // simulate
  std::string sim_model;
  std::size_t sim_n = 1000, sim_p = 50;
  double sim_gamma = 1.0;
  std::string sim_gamma_path;
  std::uint64_t sim_seed = 0, sim_stream = 0;
  bool sim_d_pareto = false;
  std::string sim_out = "sample.csv";
  CLI::App* sim_cmd =
      app.add_subcommand("simulate", "draw one sample from a model");
  sim_cmd->add_option("--model", sim_model, "A, B, C or D")->required();
  sim_cmd->add_option("--n", sim_n, "observations")->capture_default_str();
  sim_cmd->add_option("--p", sim_p, "dimensions")->capture_default_str();
  sim_cmd->add_option("--gamma", sim_gamma, "common extreme value index")
      ->capture_default_str();
  sim_cmd->add_option("--gamma-file", sim_gamma_path,
                      "per-dimension indices, one per line");
  sim_cmd->add_flag("--model-d-pareto", sim_d_pareto,
                    "model D: use exponent -gamma instead of -1/gamma");
  sim_cmd->add_option("--seed", sim_seed, "master seed")->capture_default_str();
  sim_cmd->add_option("--stream", sim_stream, "stream id")
      ->capture_default_str();
  sim_cmd->add_option("--out", sim_out, "output CSV")->capture_default_str();

  // mc
  McOptions mc_opt;
  CLI::App* mc_cmd = app.add_subcommand(
      "mc", "size/power experiment over models, dimensions and tail fractions");
  mc_cmd->add_option("--models", mc_opt.models, "comma-separated subset of A,B,C,D")
      ->delimiter(',')
      ->required();
  mc_cmd->add_option("--tests", mc_opt.tests,
                     "comma-separated subset of T,Tstar,TOmega,TW,TWstar")
      ->delimiter(',')
      ->required();
  mc_cmd->add_option("--n", mc_opt.n, "observations per replication")
      ->capture_default_str();
  mc_cmd->add_option("--p-list", mc_opt.p_list, "dimensions")
      ->delimiter(',')
      ->required();
  mc_cmd->add_option("--k-list", mc_opt.k_list, "tail fractions")
      ->delimiter(',')
      ->required();
  mc_cmd->add_option("--alpha", mc_opt.alpha, "test level")
      ->capture_default_str();
  mc_cmd->add_option("--reps", mc_opt.reps, "replications per cell")
      ->capture_default_str();
  mc_cmd->add_option("--hypothesis", mc_opt.hypothesis,
                     "null or alternative")
      ->capture_default_str();
  mc_cmd->add_option("--seed", mc_opt.seed, "master seed")
      ->capture_default_str();
  mc_cmd->add_option("--threads", mc_opt.threads,
                     "worker threads (0 = hardware)")
      ->capture_default_str();
  mc_cmd->add_option("--omega-source", mc_opt.omega_source,
                     "TOmega weighting: model, empirical or file")
      ->capture_default_str();
  mc_cmd->add_option("--omega-file", mc_opt.omega_path,
                     "weighting matrix when --omega-source file");
  mc_cmd->add_option("--ridge", mc_opt.ridge,
                     "diagonal regularization for matrix inversions")
      ->capture_default_str();
  mc_cmd->add_flag("--fixed-alternative", mc_opt.fixed_alternative,
                   "draw the alternative once and reuse it");
  mc_cmd->add_flag("--model-d-pareto", mc_opt.d_pareto,
                   "model D: use exponent -gamma instead of -1/gamma");
  mc_cmd->add_option("--out", mc_opt.out, "output stem")->capture_default_str();
  mc_cmd->add_option("--format", mc_opt.format, "csv or json")
      ->capture_default_str();

  // compare-tables
  std::string cmp_report, cmp_reference;
  double cmp_tolerance = 0.03;
  CLI::App* cmp_cmd = app.add_subcommand(
      "compare-tables", "compare an mc report against a reference table");
  cmp_cmd->add_option("--report", cmp_report, "mc report CSV")->required();
  cmp_cmd->add_option("--reference", cmp_reference, "reference table CSV")
      ->required();
  cmp_cmd->add_option("--tolerance", cmp_tolerance, "allowed deviation")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (test_cmd->parsed())
      return run_test_command(test_opt, test_k, test_hill_ci);
    if (sweep_cmd->parsed())
      return run_sweep_command(sweep_opt, k_min, k_max, k_step, sweep_hill_k,
                               sweep_hill_ci);
    if (sim_cmd->parsed())
      return run_simulate_command(sim_model, sim_n, sim_p, sim_gamma,
                                  sim_gamma_path, sim_seed, sim_stream,
                                  sim_d_pareto, sim_out);
    if (mc_cmd->parsed()) return run_mc_command(mc_opt);
    if (cmp_cmd->parsed())
      return run_compare_command(cmp_report, cmp_reference, cmp_tolerance);
  } catch (const singularity_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const parameter_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const data_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
