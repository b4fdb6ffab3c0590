#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "evt/errors.hpp"

namespace evt {

// A probability in [0,1].  Construction validates the range; the value
// converts back to double implicitly so arithmetic stays painless.
class Probability {
 public:
  constexpr Probability() = default;

  explicit Probability(double v) : v_(v) {
    if (!(v >= 0.0 && v <= 1.0))
      throw parameter_error("probability out of [0,1]: " + std::to_string(v));
  }

  // Accepts values a hair outside [0,1] (rounding dust from special
  // functions) and clamps them instead of throwing.
  static Probability clamped(double v) {
    Probability p;
    p.v_ = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
    return p;
  }

  constexpr double value() const { return v_; }
  constexpr operator double() const { return v_; }

 private:
  double v_ = 0.0;
};

// The k+1 largest values of a sample, descending, so that
// values.front() is the maximum and values.back() is the (k+1)-th
// largest, i.e. the tail threshold X_{n-k,n}.
struct TopOrderStats {
  std::vector<double> values;
  int k = 0;
  std::size_t n = 0;

  double threshold() const { return values.back(); }
};

// Requires 1 <= k <= n-1 and finite entries.
TopOrderStats top_order_statistics(std::span<const double> sample, int k);

// Student-t distribution with real df > 0.  df == 1 dispatches to the
// closed-form Cauchy expressions.  x = +inf / -inf map to 1 / 0.
Probability student_t_cdf(double x, double df);
double student_t_quantile(Probability u, double df);

// P(X > x) for the standard Cauchy, computed without cancellation for
// large x.
double cauchy_survival(double x);

// Upper-tail quantile: the x >= 0 with P(X > x) = s, s in (0, 1/2].
// Keeps full relative precision where 1 - u would lose it.
double student_t_upper_quantile(double survival, double df);

// Chi-square distribution with integer df >= 1.
Probability chi_square_cdf(double x, int df);
double chi_square_quantile(Probability u, int df);

// Standard Frechet: F(x) = exp(-1/x) for x > 0, 0 otherwise.
Probability frechet1_cdf(double x);
double frechet1_quantile(Probability u);

// Limit law of the normalized maximum statistic: exp(-exp(-x/2)/sqrt(pi)).
Probability gumbel_limit_cdf(double x);

// Upper-alpha quantile of that law:
//   q = -log(pi) - 2 log log(1/(1-alpha)),  alpha in (0,1).
double gumbel_test_quantile(Probability alpha);

double standard_normal_quantile(Probability u);

// Regularized incomplete beta I_x(a,b) and lower gamma P(a,x); exposed
// for cross-checking against quadrature.
double regularized_incomplete_beta(double x, double a, double b);
double regularized_lower_gamma(double a, double x);

namespace detail {
// General beta-function evaluation of the t CDF, bypassing the df == 1
// closed form; used to verify the dispatch agrees with the Cauchy
// formulas.
double student_t_cdf_beta(double x, double df);
}  // namespace detail

}  // namespace evt
