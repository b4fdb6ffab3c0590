#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "evt/data_matrix.hpp"
#include "evt/numerics.hpp"

namespace evt {

// Per-dimension tail sample fractions k_j, tied to the sample size they
// were chosen for.
struct KChoice {
  std::vector<int> per_dim;
  std::size_t n = 0;

  static KChoice uniform(int k, std::size_t p, std::size_t n);

  std::size_t p() const { return per_dim.size(); }
  bool is_uniform() const;

  // The common k; throws parameter_error if the choice is not uniform.
  int uniform_k() const;
};

// Hill estimates for each dimension together with the tail thresholds
// X_{n-k_j,n} they were computed over.
struct HillEstimates {
  std::vector<double> gamma_hat;
  std::vector<double> thresholds;
  KChoice k_choice;

  std::size_t p() const { return gamma_hat.size(); }
};

// Hill estimator over the k upper order statistics:
//   (1/k) sum_{i=1..k} log(X_{n-i+1,n} / X_{n-k,n}).
// Returns the estimate and the threshold X_{n-k,n}; the threshold must
// be strictly positive or a domain_error is thrown.
std::pair<double, double> hill_estimate(std::span<const double> sample, int k);

// Column-wise application; error messages name the offending dimension
// (0-based).
HillEstimates hill_estimates(const DataMatrix& data, const KChoice& ks);

// Asymptotic interval gamma_hat * (1 -+ z_{1-(1-level)/2} / sqrt(k)).
std::pair<double, double> hill_confidence_interval(double gamma_hat, int k,
                                                   Probability level);

// Advisory check that the tail sample sizes are not hopelessly small
// relative to the dimension; returns a warning string or nothing.
std::optional<std::string> tail_size_warning(const KChoice& ks);

}  // namespace evt
