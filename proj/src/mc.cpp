#include "evt/mc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "evt/format.hpp"

namespace evt {

namespace {

const char* hypothesis_name(Hypothesis h) {
  return h == Hypothesis::Null ? "null" : "alternative";
}

Hypothesis parse_hypothesis(const std::string& name) {
  if (name == "null") return Hypothesis::Null;
  if (name == "alternative") return Hypothesis::Alternative;
  throw parameter_error("unknown hypothesis '" + name +
                        "' (expected null or alternative)");
}

void validate_config(const ExperimentConfig& config) {
  if (config.models.empty()) throw parameter_error("no models selected");
  if (config.tests.empty()) throw parameter_error("no tests selected");
  if (config.p_values.empty()) throw parameter_error("no dimensions selected");
  if (config.k_values.empty())
    throw parameter_error("no tail fractions selected");
  if (config.n < 2) throw parameter_error("need at least 2 observations");
  if (config.replications < 1)
    throw parameter_error("need at least 1 replication");
  for (std::size_t p : config.p_values)
    if (p < 2) throw parameter_error("experiment dimensions must be >= 2");
  for (int k : config.k_values)
    if (k < 1 || static_cast<std::size_t>(k) > config.n - 1)
      throw parameter_error("tail fraction k must satisfy 1 <= k <= n-1, got " +
                            std::to_string(k) +
                            " with n = " + std::to_string(config.n));
  for (const TestChoice& test : config.tests) {
    if (test.ridge < 0.0) throw parameter_error("ridge must be nonnegative");
    if (test.kind == TestKind::MaxTOmega &&
        test.omega_source == OmegaSource::File) {
      if (!config.supplied_omega)
        throw parameter_error(
            "weighted test with a file-based matrix needs one supplied");
      for (std::size_t p : config.p_values)
        if (config.supplied_omega->p() != p)
          throw parameter_error(
              "supplied weighting matrix is " +
              std::to_string(config.supplied_omega->p()) +
              "-dimensional but the experiment runs p = " + std::to_string(p));
    }
  }
}

// What the per-replication loop must materialize for a given test list.
struct CellNeeds {
  bool zeta_specified = false;
  bool zeta_starred = false;
  bool sigma = false;
};

CellNeeds needs_for(const std::vector<TestChoice>& tests) {
  CellNeeds needs;
  for (const TestChoice& test : tests) {
    switch (test.kind) {
      case TestKind::MaxT:
      case TestKind::MaxTStar:
        break;
      case TestKind::MaxTOmega:
        needs.zeta_specified = true;
        if (test.omega_source == OmegaSource::EmpiricalInverse)
          needs.sigma = true;
        break;
      case TestKind::WaldT:
        needs.zeta_specified = true;
        needs.sigma = true;
        break;
      case TestKind::WaldTStar:
        needs.zeta_starred = true;
        needs.sigma = true;
        break;
    }
  }
  return needs;
}

struct CellContext {
  const ExperimentConfig& config;
  Model model;
  std::size_t p;
  int k;
  KChoice ks;
  NullSpec ones_null;
  CellNeeds needs;
  // Per-test weighting matrix for MaxTOmega, empty optional when the
  // test inverts the empirical matrix per replication.
  std::vector<std::optional<PrecisionMatrix>> omegas;
  std::optional<std::pair<std::vector<double>, AltSpec>> fixed_alt;
  double chi_threshold_p = 0.0;
  double chi_threshold_p1 = 0.0;
  double gumbel_threshold = 0.0;
};

Outcome decide_max(double statistic, const CellContext& ctx) {
  return statistic >= ctx.gumbel_threshold ? Outcome::Reject : Outcome::Accept;
}

void run_replication(const CellContext& ctx, std::uint64_t rep,
                     std::vector<std::vector<Outcome>>& outcomes) {
  const auto& config = ctx.config;
  const SeedSpec seed{config.master_seed, rep};

  std::vector<double> gamma(ctx.p, 1.0);
  if (config.hypothesis == Hypothesis::Alternative) {
    if (config.fixed_alternative)
      gamma = ctx.fixed_alt->first;
    else
      gamma = draw_alternative(ctx.p, ctx.ks, seed).first;
  }

  ModelSpec spec;
  spec.model = ctx.model;
  spec.n = config.n;
  spec.p = ctx.p;
  spec.gamma = std::move(gamma);
  spec.model_d_pareto_exponent = config.model_d_pareto_exponent;

  const std::size_t r = static_cast<std::size_t>(rep);
  HillEstimates estimates;
  try {
    const GenerationResult gen = generate(spec, seed);
    estimates = hill_estimates(gen.matrix, ctx.ks);

    std::optional<ZetaVector> zeta_specified;
    std::optional<ZetaVector> zeta_starred;
    std::optional<TailDepMatrix> sigma;
    if (ctx.needs.zeta_specified)
      zeta_specified = zeta_vector(estimates, ctx.ones_null);
    if (ctx.needs.zeta_starred)
      zeta_starred = zeta_vector(estimates, NullSpec::equal());
    if (ctx.needs.sigma) sigma = tail_dependence_matrix(gen.matrix, ctx.k);

    for (std::size_t t = 0; t < config.tests.size(); ++t) {
      const TestChoice& test = config.tests[t];
      try {
        switch (test.kind) {
          case TestKind::MaxT:
            outcomes[t][r] = decide_max(
                statistic_T(estimates, ctx.ones_null.gamma0).value, ctx);
            break;
          case TestKind::MaxTStar:
            outcomes[t][r] =
                decide_max(statistic_T_star(estimates).value, ctx);
            break;
          case TestKind::MaxTOmega: {
            if (ctx.omegas[t]) {
              outcomes[t][r] = decide_max(
                  statistic_T_omega(*zeta_specified, *ctx.omegas[t]).value,
                  ctx);
            } else {
              // Empirical-inverse weighting: invert this replication's
              // tail dependence matrix.
              PrecisionMatrix omega =
                  approx_omega_from_R(sigma->sigma, test.ridge);
              omega.source = PrecisionMatrix::Source::EmpiricalInverse;
              outcomes[t][r] = decide_max(
                  statistic_T_omega(*zeta_specified, omega).value, ctx);
            }
            break;
          }
          case TestKind::WaldT: {
            const double stat =
                wald_statistic(*zeta_specified, *sigma, test.ridge);
            outcomes[t][r] =
                stat > ctx.chi_threshold_p ? Outcome::Reject : Outcome::Accept;
            break;
          }
          case TestKind::WaldTStar: {
            const double stat =
                wald_statistic(*zeta_starred, *sigma, test.ridge);
            outcomes[t][r] =
                stat > ctx.chi_threshold_p1 ? Outcome::Reject : Outcome::Accept;
            break;
          }
        }
      } catch (const domain_error&) {
        outcomes[t][r] = Outcome::Failure;
      } catch (const singularity_error&) {
        outcomes[t][r] = Outcome::Failure;
      }
    }
  } catch (const domain_error&) {
    for (auto& per_test : outcomes) per_test[r] = Outcome::Failure;
  }
}

}  // namespace

McCell aggregate_cell(Model model, TestKind test, std::size_t p, int k,
                      Hypothesis hyp, const std::vector<Outcome>& outcomes) {
  McCell cell;
  cell.model = model;
  cell.test = test;
  cell.p = p;
  cell.k = k;
  cell.hypothesis = hyp;
  cell.replications = static_cast<int>(outcomes.size());
  for (Outcome o : outcomes) {
    if (o == Outcome::Reject) ++cell.rejections;
    if (o == Outcome::Failure) ++cell.failures;
  }
  const int successes = cell.replications - cell.failures;
  cell.valid = cell.replications > 0 && 2 * cell.failures <= cell.replications;
  if (cell.valid && successes > 0) {
    cell.rejection_rate =
        static_cast<double>(cell.rejections) / static_cast<double>(successes);
    cell.mc_stderr = std::sqrt(cell.rejection_rate *
                               (1.0 - cell.rejection_rate) / successes);
  } else {
    cell.valid = false;
  }
  return cell;
}

McReport run_experiment(const ExperimentConfig& config) {
  validate_config(config);

  const int threads =
      config.threads > 0
          ? config.threads
          : std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
  const std::size_t reps = static_cast<std::size_t>(config.replications);

  McReport report;
  report.n = config.n;
  report.alpha = config.alpha.value();
  report.replications = config.replications;
  report.hypothesis = config.hypothesis;
  report.master_seed = config.master_seed;

  for (Model model : config.models) {
    for (std::size_t p : config.p_values) {
      // Model-formula weightings depend only on (model, p); build them
      // once per dimension.
      std::vector<std::optional<PrecisionMatrix>> model_omegas(
          config.tests.size());
      for (std::size_t t = 0; t < config.tests.size(); ++t) {
        const TestChoice& test = config.tests[t];
        if (test.kind != TestKind::MaxTOmega) continue;
        if (test.omega_source == OmegaSource::ModelFormula)
          model_omegas[t] = approx_omega_from_R(model_tail_dependence(model, p),
                                                test.ridge);
        else if (test.omega_source == OmegaSource::File)
          model_omegas[t] = config.supplied_omega;
      }

      for (int k : config.k_values) {
        CellContext ctx{config,
                        model,
                        p,
                        k,
                        KChoice::uniform(k, p, config.n),
                        NullSpec::specified(std::vector<double>(p, 1.0)),
                        needs_for(config.tests),
                        model_omegas,
                        std::nullopt,
                        chi_square_quantile(
                            Probability(1.0 - config.alpha.value()),
                            static_cast<int>(p)),
                        chi_square_quantile(
                            Probability(1.0 - config.alpha.value()),
                            static_cast<int>(p) - 1),
                        calibrate(0.0, p, config.alpha).threshold};
        if (config.hypothesis == Hypothesis::Alternative &&
            config.fixed_alternative)
          ctx.fixed_alt =
              draw_alternative(p, ctx.ks, SeedSpec{config.master_seed, 0});

        // Per-replication empirical-inverse weighting happens inside
        // the replication; handled there via a per-rep sigma.  All
        // other sources are fixed for the cell.
        std::vector<std::vector<Outcome>> outcomes(
            config.tests.size(), std::vector<Outcome>(reps, Outcome::Failure));

        std::atomic<std::uint64_t> next{0};
        std::exception_ptr first_error = nullptr;
        std::mutex error_mutex;
        auto worker = [&]() {
          for (;;) {
            const std::uint64_t rep = next.fetch_add(1);
            if (rep >= reps) return;
            try {
              run_replication(ctx, rep, outcomes);
            } catch (...) {
              std::lock_guard<std::mutex> lock(error_mutex);
              if (!first_error) first_error = std::current_exception();
              return;
            }
          }
        };

        if (threads == 1) {
          worker();
        } else {
          std::vector<std::thread> pool;
          const int spawn =
              static_cast<int>(std::min<std::size_t>(threads, reps));
          pool.reserve(spawn);
          for (int t = 0; t < spawn; ++t) pool.emplace_back(worker);
          for (std::thread& th : pool) th.join();
        }
        if (first_error) std::rethrow_exception(first_error);

        for (std::size_t t = 0; t < config.tests.size(); ++t)
          report.cells.push_back(aggregate_cell(model, config.tests[t].kind, p,
                                                k, config.hypothesis,
                                                outcomes[t]));
      }
    }
  }
  return report;
}

std::string mc_report_csv(const McReport& report) {
  std::ostringstream out;
  out << "model,test,p,k,hypothesis,rejection_rate,mc_stderr,replications,"
         "failures\n";
  for (const McCell& cell : report.cells) {
    out << model_letter(cell.model) << ',' << test_kind_name(cell.test) << ','
        << cell.p << ',' << cell.k << ',' << hypothesis_name(cell.hypothesis)
        << ',';
    if (cell.valid)
      out << format_double(cell.rejection_rate) << ','
          << format_double(cell.mc_stderr);
    else
      out << ',';
    out << ',' << cell.replications << ',' << cell.failures << '\n';
  }
  return out.str();
}

std::string mc_report_json(const McReport& report) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["kind"] = "mc_report";
  j["n"] = report.n;
  j["alpha"] = report.alpha;
  j["replications"] = report.replications;
  j["hypothesis"] = hypothesis_name(report.hypothesis);
  j["master_seed"] = report.master_seed;
  j["cells"] = nlohmann::json::array();
  for (const McCell& cell : report.cells) {
    nlohmann::json c;
    c["model"] = std::string(1, model_letter(cell.model));
    c["test"] = test_kind_name(cell.test);
    c["p"] = cell.p;
    c["k"] = cell.k;
    c["hypothesis"] = hypothesis_name(cell.hypothesis);
    c["valid"] = cell.valid;
    if (cell.valid) {
      c["rejection_rate"] = cell.rejection_rate;
      c["mc_stderr"] = cell.mc_stderr;
    }
    c["replications"] = cell.replications;
    c["failures"] = cell.failures;
    j["cells"].push_back(std::move(c));
  }
  return j.dump(2) + "\n";
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(field);
      field.clear();
    } else if (ch != '\r') {
      field.push_back(ch);
    }
  }
  fields.push_back(field);
  return fields;
}

double parse_rate(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw data_error("cannot parse " + what + " '" + text + "'");
  }
}

}  // namespace

McReport parse_mc_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw data_error("empty report");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::string expected =
      "model,test,p,k,hypothesis,rejection_rate,mc_stderr,replications,"
      "failures";
  if (line != expected)
    throw data_error("unexpected report header: " + line);

  McReport report;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 9)
      throw data_error("report row has " + std::to_string(fields.size()) +
                       " fields: " + line);
    McCell cell;
    if (fields[0].size() != 1)
      throw data_error("bad model field '" + fields[0] + "'");
    try {
      cell.model = parse_model(fields[0][0]);
      cell.test = parse_test_kind(fields[1]);
      cell.hypothesis = parse_hypothesis(fields[4]);
    } catch (const parameter_error& e) {
      throw data_error("report row '" + line + "': " + e.what());
    }
    cell.p = static_cast<std::size_t>(parse_rate(fields[2], "dimension"));
    cell.k = static_cast<int>(parse_rate(fields[3], "tail fraction"));
    cell.valid = !fields[5].empty();
    if (cell.valid) {
      cell.rejection_rate = parse_rate(fields[5], "rejection rate");
      cell.mc_stderr = parse_rate(fields[6], "standard error");
    }
    cell.replications = static_cast<int>(parse_rate(fields[7], "replications"));
    cell.failures = static_cast<int>(parse_rate(fields[8], "failures"));
    if (cell.valid)
      cell.rejections = static_cast<int>(std::lround(
          cell.rejection_rate * (cell.replications - cell.failures)));
    report.cells.push_back(cell);
  }
  report.replications =
      report.cells.empty() ? 0 : report.cells.front().replications;
  report.hypothesis =
      report.cells.empty() ? Hypothesis::Null : report.cells.front().hypothesis;
  return report;
}

TableDiff compare_tables(const McReport& report,
                         const std::string& reference_csv_path,
                         double tolerance) {
  if (!(tolerance >= 0.0)) throw parameter_error("tolerance must be >= 0");
  std::ifstream in(reference_csv_path);
  if (!in)
    throw data_error("cannot open reference table: " + reference_csv_path);
  std::stringstream buffer;
  buffer << in.rdbuf();

  std::istringstream lines(buffer.str());
  std::string line;
  if (!std::getline(lines, line))
    throw data_error(reference_csv_path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "model,test,p,k,hypothesis,rate")
    throw data_error(reference_csv_path + ": unexpected header: " + line);

  using Key = std::tuple<char, std::string, std::size_t, int, std::string>;
  std::map<Key, double> reference;
  while (std::getline(lines, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 6)
      throw data_error(reference_csv_path + ": bad row: " + line);
    const Key key{fields[0].at(0), fields[1],
                  static_cast<std::size_t>(parse_rate(fields[2], "dimension")),
                  static_cast<int>(parse_rate(fields[3], "tail fraction")),
                  fields[4]};
    reference[key] = parse_rate(fields[5], "rate");
  }

  TableDiff diff;
  diff.tolerance = tolerance;
  for (const McCell& cell : report.cells) {
    if (!cell.valid) continue;
    const std::string test = test_kind_name(cell.test);
    const std::string hyp = hypothesis_name(cell.hypothesis);
    Key key{model_letter(cell.model), test, cell.p, cell.k, hyp};
    auto it = reference.find(key);
    if (it == reference.end() && cell.hypothesis == Hypothesis::Alternative) {
      // Power tables archive the larger tail fraction under either of
      // the two labels in circulation; accept the twin.
      const int twin = cell.k == 80 ? 100 : (cell.k == 100 ? 80 : cell.k);
      if (twin != cell.k) {
        std::get<3>(key) = twin;
        it = reference.find(key);
      }
    }
    if (it == reference.end())
      throw parameter_error("reference table has no row for model " +
                            std::string(1, model_letter(cell.model)) + " " +
                            test + " p=" + std::to_string(cell.p) +
                            " k=" + std::to_string(cell.k) + " " + hyp);
    CellDiff cd;
    cd.cell = cell;
    cd.reference_rate = it->second;
    cd.deviation = std::fabs(cell.rejection_rate - it->second);
    cd.within = cd.deviation <= tolerance + 1e-12;
    diff.max_deviation = std::max(diff.max_deviation, cd.deviation);
    if (!cd.within) ++diff.flagged;
    diff.cells.push_back(std::move(cd));
  }
  return diff;
}

std::string table_diff_text(const TableDiff& diff) {
  std::ostringstream out;
  out << "tolerance " << format_double(diff.tolerance) << "\n";
  for (const CellDiff& cd : diff.cells) {
    out << model_letter(cd.cell.model) << ' ' << test_kind_name(cd.cell.test)
        << " p=" << cd.cell.p << " k=" << cd.cell.k << ' '
        << hypothesis_name(cd.cell.hypothesis) << ": rate "
        << format_double(cd.cell.rejection_rate) << " reference "
        << format_double(cd.reference_rate) << " deviation "
        << format_double(cd.deviation) << (cd.within ? " ok" : " FLAGGED")
        << "\n";
  }
  out << diff.cells.size() << " cells compared, " << diff.flagged
      << " outside tolerance, max deviation "
      << format_double(diff.max_deviation) << "\n";
  return out.str();
}

}  // namespace evt
