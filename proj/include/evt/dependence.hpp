#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "evt/data_matrix.hpp"
#include "evt/hill.hpp"
#include "evt/linalg.hpp"
#include "evt/maxtest.hpp"
#include "evt/numerics.hpp"

namespace evt {

// Empirical tail dependence matrix
//   Sigma_ij = (1/k) #{ s : X_s^(i) > X^(i)_{n-k,n}, X_s^(j) > X^(j)_{n-k,n} },
// counting strict exceedances of the per-column thresholds.  On
// continuous data the diagonal is exactly 1; ties at a threshold pull
// the count below k and the affected dimensions are recorded.
struct TailDepMatrix {
  SymMatrix sigma;
  int k = 0;
  std::size_t n = 0;
  std::vector<std::size_t> tied_threshold_dims;

  std::size_t p() const { return sigma.p; }
  double at(std::size_t i, std::size_t j) const { return sigma.at(i, j); }
};

TailDepMatrix tail_dependence_matrix(const DataMatrix& data, int k);

// Normalized deviations from the null:
//   zeta_j = sqrt(k_j) (gamma_hat_j / gamma0_j - 1),
// with gamma0 replaced by the mean estimate for the Equal null.
struct ZetaVector {
  std::vector<double> values;
  bool starred = false;          // Equal null
  double gamma_bar = 0.0;        // meaningful when starred
};

ZetaVector zeta_vector(const HillEstimates& estimates, const NullSpec& null);

// A p x p weighting matrix for the weighted max statistic, tagged with
// where it came from.
struct PrecisionMatrix {
  enum class Source { Identity, ModelFormula, File, EmpiricalInverse };

  SymMatrix omega;
  Source source = Source::Identity;
  double ridge = 0.0;

  std::size_t p() const { return omega.p; }
};

PrecisionMatrix identity_omega(std::size_t p);

// Reads a dense whitespace-separated p x p matrix; rejects non-square
// input and asymmetry beyond 1e-8.
PrecisionMatrix load_omega(const std::string& path);

// Omega = (R + ridge I)^{-1} for a theoretical tail dependence matrix R.
PrecisionMatrix approx_omega_from_R(const SymMatrix& r, double ridge = 0.0);

// Weighted max statistic: eta = Omega zeta, T = max_j eta_j^2 / omega_jj.
// With the identity weighting this reproduces the unweighted statistic
// exactly.
MaxStatistic statistic_T_omega(const ZetaVector& z, const PrecisionMatrix& omega);

// Wald quadratic form zeta^T (Sigma + ridge I)^{-1} zeta.
double wald_statistic(const ZetaVector& z, const TailDepMatrix& sigma,
                      double ridge = 0.0);

// Full Wald test against chi-square with p (specified null) or p-1
// (equality null) degrees of freedom, rejecting on strict exceedance of
// the upper-alpha quantile.  Requires a uniform k across dimensions.
TestReport wald_test(const DataMatrix& data, const KChoice& ks,
                     const NullSpec& null, Probability alpha,
                     double ridge = 0.0);

// Weighted max-type test: zeta, T_Omega, Gumbel calibration.
TestReport run_omega_max_test(const DataMatrix& data, const KChoice& ks,
                              const NullSpec& null, Probability alpha,
                              const PrecisionMatrix& omega);

}  // namespace evt
