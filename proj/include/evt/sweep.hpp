#pragma once

#include <optional>
#include <string>
#include <vector>

#include "evt/dataset.hpp"
#include "evt/dependence.hpp"
#include "evt/maxtest.hpp"

namespace evt {

// p-values of the chosen tests across a grid of tail fractions.  A k at
// which a test fails (degenerate estimates, singular dependence matrix)
// is recorded as a gap with the reason kept for the report.
struct SweepCurve {
  TestKind test = TestKind::MaxTStar;
  std::vector<std::optional<double>> p_values;  // aligned with k_grid
  std::vector<std::string> gap_reasons;         // empty string where ok
};

struct SweepResult {
  std::vector<int> k_grid;
  std::vector<SweepCurve> curves;
  double alpha = 0.0;
};

// Runs each test at every k in {k_min, k_min+step, ..., <= k_max}.
// MaxTOmega uses the supplied weighting when given, otherwise the
// inverse of the empirical tail dependence matrix at each k.
SweepResult sweep_k(const DataMatrix& data, int k_min, int k_max, int step,
                    const NullSpec& null, const std::vector<TestKind>& tests,
                    Probability alpha, double ridge = 0.0,
                    const std::optional<PrecisionMatrix>& omega = std::nullopt);

}  // namespace evt
