#include "evt/maxtest.hpp"

#include <cmath>
#include <string>

namespace evt {

NullSpec NullSpec::specified(std::vector<double> g0) {
  if (g0.empty()) throw parameter_error("null specification is empty");
  for (std::size_t j = 0; j < g0.size(); ++j)
    if (!(g0[j] > 0.0) || !std::isfinite(g0[j]))
      throw parameter_error("null index for dimension " + std::to_string(j) +
                            " must be a positive real, got " +
                            std::to_string(g0[j]));
  NullSpec spec;
  spec.kind = Kind::Specified;
  spec.gamma0 = std::move(g0);
  return spec;
}

std::string test_kind_name(TestKind kind) {
  switch (kind) {
    case TestKind::MaxT: return "T";
    case TestKind::MaxTStar: return "Tstar";
    case TestKind::MaxTOmega: return "TOmega";
    case TestKind::WaldT: return "TW";
    case TestKind::WaldTStar: return "TWstar";
  }
  throw parameter_error("unknown test kind");
}

TestKind parse_test_kind(const std::string& name) {
  if (name == "T") return TestKind::MaxT;
  if (name == "Tstar") return TestKind::MaxTStar;
  if (name == "TOmega") return TestKind::MaxTOmega;
  if (name == "TW") return TestKind::WaldT;
  if (name == "TWstar") return TestKind::WaldTStar;
  throw parameter_error("unknown test name '" + name +
                        "' (expected T, Tstar, TOmega, TW or TWstar)");
}

void require_test_matches_null(TestKind kind, NullSpec::Kind null_kind) {
  const bool starred =
      kind == TestKind::MaxTStar || kind == TestKind::WaldTStar;
  if (starred && null_kind != NullSpec::Kind::Equal)
    throw parameter_error("test " + test_kind_name(kind) +
                          " is for the equality null; drop the specified "
                          "indices or pick T, TOmega or TW");
  if (!starred && null_kind != NullSpec::Kind::Specified)
    throw parameter_error("test " + test_kind_name(kind) +
                          " needs specified null indices; with the equality "
                          "null pick Tstar or TWstar");
}

namespace {

MaxStatistic max_of_contributions(std::vector<double> contribs) {
  MaxStatistic stat;
  stat.argmax = 0;
  stat.value = contribs.front();
  for (std::size_t j = 1; j < contribs.size(); ++j) {
    if (contribs[j] > stat.value) {
      stat.value = contribs[j];
      stat.argmax = j;
    }
  }
  stat.contribs = std::move(contribs);
  return stat;
}

}  // namespace

MaxStatistic statistic_T(const HillEstimates& estimates,
                         std::span<const double> gamma0) {
  const std::size_t p = estimates.p();
  if (p == 0) throw parameter_error("no dimensions to test");
  if (gamma0.size() != p)
    throw parameter_error("null vector has " + std::to_string(gamma0.size()) +
                          " entries for " + std::to_string(p) + " dimensions");
  std::vector<double> contribs(p);
  for (std::size_t j = 0; j < p; ++j) {
    if (!(gamma0[j] > 0.0))
      throw parameter_error("null index for dimension " + std::to_string(j) +
                            " must be positive");
    // Computed via zeta_j = sqrt(k_j) (gamma_hat_j / gamma0_j - 1), the
    // same arithmetic the weighted and Wald statistics use, so the
    // identity weighting reproduces T bit for bit.
    const double zeta =
        std::sqrt(static_cast<double>(estimates.k_choice.per_dim[j])) *
        (estimates.gamma_hat[j] / gamma0[j] - 1.0);
    contribs[j] = zeta * zeta;
  }
  return max_of_contributions(std::move(contribs));
}

StarStatistic statistic_T_star(const HillEstimates& estimates) {
  const std::size_t p = estimates.p();
  if (p == 0) throw parameter_error("no dimensions to test");
  double sum = 0.0;
  for (double g : estimates.gamma_hat) sum += g;
  const double gamma_bar = sum / static_cast<double>(p);
  if (gamma_bar == 0.0)
    throw domain_error("all Hill estimates degenerate: cross-dimension mean is zero");

  std::vector<double> contribs(p);
  for (std::size_t j = 0; j < p; ++j) {
    const double zeta =
        std::sqrt(static_cast<double>(estimates.k_choice.per_dim[j])) *
        (estimates.gamma_hat[j] / gamma_bar - 1.0);
    contribs[j] = zeta * zeta;
  }
  MaxStatistic base = max_of_contributions(std::move(contribs));

  StarStatistic stat;
  stat.value = base.value;
  stat.gamma_bar = gamma_bar;
  stat.contribs = std::move(base.contribs);
  stat.argmax = base.argmax;
  return stat;
}

Calibration calibrate(double statistic, std::size_t p, Probability alpha) {
  if (p < 2)
    throw parameter_error("Gumbel calibration needs dimension p >= 2");
  if (!(statistic >= 0.0))
    throw parameter_error("max-type statistic must be nonnegative");
  const double a = alpha.value();
  if (a <= 0.0 || a >= 1.0)
    throw parameter_error("test level must lie strictly inside (0,1)");

  const double log_p = std::log(static_cast<double>(p));
  const double centering = 2.0 * log_p - std::log(log_p);

  Calibration cal;
  cal.normalized = statistic - centering;
  cal.threshold = centering + gumbel_test_quantile(alpha);
  cal.p_value = Probability::clamped(1.0 - gumbel_limit_cdf(cal.normalized));
  cal.reject = statistic >= cal.threshold;
  return cal;
}

TestReport run_max_test(const DataMatrix& data, const KChoice& ks,
                        const NullSpec& null, Probability alpha) {
  const HillEstimates estimates = hill_estimates(data, ks);

  TestReport report;
  report.family = TestFamily::MaxGumbel;
  report.alpha = alpha;
  if (null.kind == NullSpec::Kind::Specified) {
    MaxStatistic stat = statistic_T(estimates, null.gamma0);
    report.statistic = stat.value;
    report.per_dim_contrib = std::move(stat.contribs);
    report.argmax_dim = stat.argmax;
  } else {
    StarStatistic stat = statistic_T_star(estimates);
    report.statistic = stat.value;
    report.per_dim_contrib = std::move(stat.contribs);
    report.argmax_dim = stat.argmax;
    report.gamma_bar = stat.gamma_bar;
  }

  const Calibration cal = calibrate(report.statistic, data.cols(), alpha);
  report.normalized = cal.normalized;
  report.threshold = cal.threshold;
  report.p_value = cal.p_value;
  report.reject = cal.reject;
  return report;
}

}  // namespace evt
