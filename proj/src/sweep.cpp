#include "evt/sweep.hpp"

#include <string>

namespace evt {

SweepResult sweep_k(const DataMatrix& data, int k_min, int k_max, int step,
                    const NullSpec& null, const std::vector<TestKind>& tests,
                    Probability alpha, double ridge,
                    const std::optional<PrecisionMatrix>& omega) {
  const std::size_t n = data.rows();
  if (step < 1) throw parameter_error("sweep step must be >= 1");
  if (k_min < 1 || k_min > k_max)
    throw parameter_error("need 1 <= k_min <= k_max, got " +
                          std::to_string(k_min) + ".." + std::to_string(k_max));
  if (static_cast<std::size_t>(k_max) > n - 1)
    throw parameter_error("k_max = " + std::to_string(k_max) +
                          " exceeds n-1 = " + std::to_string(n - 1));
  if (tests.empty()) throw parameter_error("no tests selected");
  for (TestKind kind : tests) require_test_matches_null(kind, null.kind);
  if (ridge < 0.0) throw parameter_error("ridge must be nonnegative");
  if (omega && omega->p() != data.cols())
    throw parameter_error("weighting matrix dimension " +
                          std::to_string(omega->p()) +
                          " does not match the data (" +
                          std::to_string(data.cols()) + ")");

  SweepResult result;
  result.alpha = alpha.value();
  for (int k = k_min; k <= k_max; k += step) result.k_grid.push_back(k);
  for (TestKind kind : tests) {
    SweepCurve curve;
    curve.test = kind;
    curve.p_values.reserve(result.k_grid.size());
    curve.gap_reasons.reserve(result.k_grid.size());
    result.curves.push_back(std::move(curve));
  }

  for (int k : result.k_grid) {
    const KChoice ks = KChoice::uniform(k, data.cols(), n);
    for (std::size_t t = 0; t < tests.size(); ++t) {
      SweepCurve& curve = result.curves[t];
      try {
        TestReport report;
        switch (tests[t]) {
          case TestKind::MaxT:
          case TestKind::MaxTStar:
            report = run_max_test(data, ks, null, alpha);
            break;
          case TestKind::MaxTOmega: {
            if (omega) {
              report = run_omega_max_test(data, ks, null, alpha, *omega);
            } else {
              const TailDepMatrix sigma = tail_dependence_matrix(data, k);
              PrecisionMatrix inv = approx_omega_from_R(sigma.sigma, ridge);
              inv.source = PrecisionMatrix::Source::EmpiricalInverse;
              report = run_omega_max_test(data, ks, null, alpha, inv);
            }
            break;
          }
          case TestKind::WaldT:
          case TestKind::WaldTStar:
            report = wald_test(data, ks, null, alpha, ridge);
            break;
        }
        curve.p_values.push_back(report.p_value.value());
        curve.gap_reasons.emplace_back();
      } catch (const domain_error& e) {
        curve.p_values.push_back(std::nullopt);
        curve.gap_reasons.emplace_back(e.what());
      } catch (const singularity_error& e) {
        curve.p_values.push_back(std::nullopt);
        curve.gap_reasons.emplace_back(e.what());
      }
    }
  }
  return result;
}

}  // namespace evt
