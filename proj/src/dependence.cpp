#include "evt/dependence.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>

namespace evt {

TailDepMatrix tail_dependence_matrix(const DataMatrix& data, int k) {
  const std::size_t n = data.rows();
  const std::size_t p = data.cols();
  const std::size_t words = (n + 63) / 64;

  TailDepMatrix out;
  out.sigma = SymMatrix(p);
  out.k = k;
  out.n = n;

  // One exceedance bitmask per column, so pair counts reduce to
  // AND + popcount over 64-observation words.
  std::vector<std::uint64_t> masks(p * words, 0);
  for (std::size_t j = 0; j < p; ++j) {
    const auto column = data.column(j);
    const double threshold = top_order_statistics(column, k).threshold();
    std::uint64_t* mask = masks.data() + j * words;
    std::size_t count = 0;
    for (std::size_t s = 0; s < n; ++s) {
      if (column[s] > threshold) {
        mask[s >> 6] |= std::uint64_t{1} << (s & 63);
        ++count;
      }
    }
    if (count != static_cast<std::size_t>(k))
      out.tied_threshold_dims.push_back(j);
  }

  for (std::size_t i = 0; i < p; ++i) {
    const std::uint64_t* mi = masks.data() + i * words;
    for (std::size_t j = i; j < p; ++j) {
      const std::uint64_t* mj = masks.data() + j * words;
      std::size_t joint = 0;
      for (std::size_t w = 0; w < words; ++w)
        joint += static_cast<std::size_t>(std::popcount(mi[w] & mj[w]));
      // Plain division so a full count of k lands on exactly 1.
      const double value = static_cast<double>(joint) / static_cast<double>(k);
      out.sigma.at(i, j) = value;
      out.sigma.at(j, i) = value;
    }
  }
  return out;
}

ZetaVector zeta_vector(const HillEstimates& estimates, const NullSpec& null) {
  const std::size_t p = estimates.p();
  if (p == 0) throw parameter_error("no dimensions");

  ZetaVector z;
  z.values.resize(p);
  if (null.kind == NullSpec::Kind::Specified) {
    if (null.gamma0.size() != p)
      throw parameter_error("null vector has " +
                            std::to_string(null.gamma0.size()) +
                            " entries for " + std::to_string(p) +
                            " dimensions");
    for (std::size_t j = 0; j < p; ++j) {
      const double root_k =
          std::sqrt(static_cast<double>(estimates.k_choice.per_dim[j]));
      z.values[j] = root_k * (estimates.gamma_hat[j] / null.gamma0[j] - 1.0);
    }
  } else {
    double sum = 0.0;
    for (double g : estimates.gamma_hat) sum += g;
    const double gamma_bar = sum / static_cast<double>(p);
    if (gamma_bar == 0.0)
      throw domain_error(
          "all Hill estimates degenerate: cross-dimension mean is zero");
    z.starred = true;
    z.gamma_bar = gamma_bar;
    for (std::size_t j = 0; j < p; ++j) {
      const double root_k =
          std::sqrt(static_cast<double>(estimates.k_choice.per_dim[j]));
      z.values[j] = root_k * (estimates.gamma_hat[j] / gamma_bar - 1.0);
    }
  }
  return z;
}

PrecisionMatrix identity_omega(std::size_t p) {
  PrecisionMatrix omega;
  omega.omega = SymMatrix::identity(p);
  omega.source = PrecisionMatrix::Source::Identity;
  return omega;
}

PrecisionMatrix load_omega(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open weighting matrix file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream fields(line);
    std::vector<double> row;
    double v;
    while (fields >> v) row.push_back(v);
    if (!fields.eof())
      throw data_error(path + ": non-numeric token on line " +
                       std::to_string(rows.size() + 1));
    if (!row.empty()) rows.push_back(std::move(row));
  }
  const std::size_t p = rows.size();
  if (p == 0) throw data_error(path + ": empty matrix");
  for (std::size_t i = 0; i < p; ++i)
    if (rows[i].size() != p)
      throw data_error(path + ": row " + std::to_string(i + 1) + " has " +
                       std::to_string(rows[i].size()) + " entries, expected " +
                       std::to_string(p));

  PrecisionMatrix omega;
  omega.omega = SymMatrix(p);
  omega.source = PrecisionMatrix::Source::File;
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j) {
      if (!std::isfinite(rows[i][j]))
        throw data_error(path + ": non-finite entry at (" +
                         std::to_string(i + 1) + "," + std::to_string(j + 1) +
                         ")");
      if (std::fabs(rows[i][j] - rows[j][i]) > 1e-8)
        throw data_error(path + ": asymmetric at (" + std::to_string(i + 1) +
                         "," + std::to_string(j + 1) + "): " +
                         std::to_string(rows[i][j]) + " vs " +
                         std::to_string(rows[j][i]));
      omega.omega.at(i, j) = rows[i][j];
    }
  return omega;
}

PrecisionMatrix approx_omega_from_R(const SymMatrix& r, double ridge) {
  PrecisionMatrix omega;
  omega.omega = cholesky_inverse(cholesky_factor(r, ridge));
  omega.source = PrecisionMatrix::Source::ModelFormula;
  omega.ridge = ridge;
  return omega;
}

MaxStatistic statistic_T_omega(const ZetaVector& z,
                               const PrecisionMatrix& omega) {
  const std::size_t p = z.values.size();
  if (p == 0) throw parameter_error("no dimensions");
  if (omega.p() != p)
    throw parameter_error("weighting matrix is " + std::to_string(omega.p()) +
                          "-dimensional but zeta has " + std::to_string(p) +
                          " entries");

  MaxStatistic stat;
  stat.contribs.resize(p);
  for (std::size_t j = 0; j < p; ++j) {
    const double w_jj = omega.omega.at(j, j);
    if (!(w_jj > 0.0))
      throw parameter_error("weighting matrix has non-positive diagonal at " +
                            std::to_string(j));
    double eta = 0.0;
    for (std::size_t t = 0; t < p; ++t)
      eta += omega.omega.at(j, t) * z.values[t];
    stat.contribs[j] = eta * eta / w_jj;
  }
  stat.value = stat.contribs.front();
  stat.argmax = 0;
  for (std::size_t j = 1; j < p; ++j) {
    if (stat.contribs[j] > stat.value) {
      stat.value = stat.contribs[j];
      stat.argmax = j;
    }
  }
  return stat;
}

double wald_statistic(const ZetaVector& z, const TailDepMatrix& sigma,
                      double ridge) {
  if (z.values.size() != sigma.p())
    throw parameter_error("zeta and dependence matrix dimensions differ");
  if (ridge < 0.0) throw parameter_error("ridge must be nonnegative");
  return inverse_quadratic_form(sigma.sigma, z.values, ridge);
}

namespace {

TestReport finish_wald(const ZetaVector& z, double statistic, int df,
                       Probability alpha) {
  TestReport report;
  report.family = TestFamily::WaldChiSquare;
  report.alpha = alpha;
  report.statistic = statistic;
  report.normalized = statistic;
  report.df = df;
  report.threshold =
      chi_square_quantile(Probability(1.0 - alpha.value()), df);
  report.p_value =
      Probability::clamped(1.0 - chi_square_cdf(statistic, df).value());
  report.reject = statistic > report.threshold;
  if (z.starred) report.gamma_bar = z.gamma_bar;

  const std::size_t p = z.values.size();
  report.per_dim_contrib.resize(p);
  report.argmax_dim = 0;
  for (std::size_t j = 0; j < p; ++j) {
    report.per_dim_contrib[j] = z.values[j] * z.values[j];
    if (report.per_dim_contrib[j] > report.per_dim_contrib[report.argmax_dim])
      report.argmax_dim = j;
  }
  return report;
}

}  // namespace

TestReport wald_test(const DataMatrix& data, const KChoice& ks,
                     const NullSpec& null, Probability alpha, double ridge) {
  const int k = ks.uniform_k();
  const std::size_t p = data.cols();
  if (null.kind == NullSpec::Kind::Equal && p < 2)
    throw parameter_error("equality null needs at least 2 dimensions");

  const HillEstimates estimates = hill_estimates(data, ks);
  const ZetaVector z = zeta_vector(estimates, null);
  const TailDepMatrix sigma = tail_dependence_matrix(data, k);
  const double statistic = wald_statistic(z, sigma, ridge);
  const int df = null.kind == NullSpec::Kind::Specified
                     ? static_cast<int>(p)
                     : static_cast<int>(p) - 1;
  return finish_wald(z, statistic, df, alpha);
}

TestReport run_omega_max_test(const DataMatrix& data, const KChoice& ks,
                              const NullSpec& null, Probability alpha,
                              const PrecisionMatrix& omega) {
  const HillEstimates estimates = hill_estimates(data, ks);
  const ZetaVector z = zeta_vector(estimates, null);
  MaxStatistic stat = statistic_T_omega(z, omega);

  TestReport report;
  report.family = TestFamily::MaxGumbel;
  report.alpha = alpha;
  report.statistic = stat.value;
  report.per_dim_contrib = std::move(stat.contribs);
  report.argmax_dim = stat.argmax;
  if (z.starred) report.gamma_bar = z.gamma_bar;

  const Calibration cal = calibrate(report.statistic, data.cols(), alpha);
  report.normalized = cal.normalized;
  report.threshold = cal.threshold;
  report.p_value = cal.p_value;
  report.reject = cal.reject;
  return report;
}

}  // namespace evt
