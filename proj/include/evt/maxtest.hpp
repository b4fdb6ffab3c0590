#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evt/data_matrix.hpp"
#include "evt/hill.hpp"
#include "evt/numerics.hpp"

namespace evt {

// Null hypothesis: either fully specified per-dimension indices
// gamma0_j > 0, or equality of all indices with the common value left
// unspecified (estimated by the cross-dimension mean).
struct NullSpec {
  enum class Kind { Specified, Equal };

  Kind kind = Kind::Equal;
  std::vector<double> gamma0;  // Specified only

  static NullSpec specified(std::vector<double> g0);
  static NullSpec equal() { return NullSpec{}; }
};

// The five test statistics the library knows how to compute.
enum class TestKind { MaxT, MaxTStar, MaxTOmega, WaldT, WaldTStar };

std::string test_kind_name(TestKind kind);
TestKind parse_test_kind(const std::string& name);

// The starred tests go with the equality null, the rest with a fully
// specified null; throws parameter_error on a mismatch.
void require_test_matches_null(TestKind kind, NullSpec::Kind null_kind);

// A max-type statistic with its per-dimension contributions.  argmax is
// the smallest 0-based index attaining the maximum.
struct MaxStatistic {
  double value = 0.0;
  std::vector<double> contribs;
  std::size_t argmax = 0;
};

struct StarStatistic {
  double value = 0.0;
  double gamma_bar = 0.0;
  std::vector<double> contribs;
  std::size_t argmax = 0;
};

// T = max_j k_j (gamma_hat_j / gamma0_j - 1)^2.
MaxStatistic statistic_T(const HillEstimates& estimates,
                         std::span<const double> gamma0);

// Same with gamma0 replaced by the mean of the estimates; throws
// domain_error if that mean is zero (all Hill estimates degenerate).
StarStatistic statistic_T_star(const HillEstimates& estimates);

// Gumbel calibration of a max-type statistic for dimension p >= 2 at
// level alpha in (0,1):
//   normalized = T - 2 log p + log log p,
//   threshold  = 2 log p - log log p + q_alpha,
//   p_value    = 1 - Gumbel(normalized),
// rejecting when T >= threshold.
struct Calibration {
  double normalized = 0.0;
  double threshold = 0.0;
  Probability p_value;
  bool reject = false;
};

Calibration calibrate(double statistic, std::size_t p, Probability alpha);

enum class TestFamily { MaxGumbel, WaldChiSquare };

// Everything a caller needs to report a decision.  The three decision
// fields are kept mutually consistent: reject holds exactly when the
// statistic clears the threshold, equivalently when the p-value falls
// to alpha or below (up to rounding of the normalization).
struct TestReport {
  TestFamily family = TestFamily::MaxGumbel;
  double statistic = 0.0;
  double normalized = 0.0;  // max-type only; equals statistic for Wald
  double threshold = 0.0;
  Probability p_value;
  Probability alpha;
  bool reject = false;
  std::vector<double> per_dim_contrib;
  std::size_t argmax_dim = 0;
  std::optional<double> gamma_bar;  // present for the starred variants
  std::optional<int> df;            // present for the Wald family
};

// Hill estimation, max statistic, calibration in one step.
TestReport run_max_test(const DataMatrix& data, const KChoice& ks,
                        const NullSpec& null, Probability alpha);

}  // namespace evt
