#include "evt/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace evt {

namespace {

constexpr double kPi = 3.14159265358979323846264338328;
constexpr double kSqrtPi = 1.77245385090551602729816748334;
constexpr double kSqrt2Pi = 2.50662827463100050241576528481;
constexpr int kMaxContinuedFractionIter = 500;

// Modified Lentz evaluation of the continued fraction for the
// incomplete beta function (Numerical Recipes 6.4).
double beta_continued_fraction(double x, double a, double b) {
  constexpr double tiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxContinuedFractionIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  return h;
}

double lower_gamma_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n <= kMaxContinuedFractionIter; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double upper_gamma_continued_fraction(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxContinuedFractionIter; ++i) {
    const double an = -static_cast<double>(i) * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

void require_finite_df(double df) {
  if (!(df > 0.0) || !std::isfinite(df))
    throw parameter_error("degrees of freedom must be positive and finite");
}

// Student-t density, safe against x*x overflow (returns 0 there).
double student_t_pdf(double x, double df) {
  const double x2 = x * x;
  if (!std::isfinite(x2)) return 0.0;
  const double log_pdf = std::lgamma(0.5 * (df + 1.0)) -
                         std::lgamma(0.5 * df) -
                         0.5 * std::log(df * kPi) -
                         0.5 * (df + 1.0) * std::log1p(x2 / df);
  return std::exp(log_pdf);
}

// P(X > x) for x >= 0 under Student-t, at full relative precision.
double student_t_upper_survival(double x, double df) {
  if (df == 1.0) return cauchy_survival(x);
  const double x2 = x * x;
  if (!std::isfinite(x2)) return 0.0;
  return 0.5 * regularized_incomplete_beta(df / (df + x2), 0.5 * df, 0.5);
}

}  // namespace

double regularized_incomplete_beta(double x, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0))
    throw parameter_error("incomplete beta needs positive shape parameters");
  if (!(x >= 0.0 && x <= 1.0))
    throw parameter_error("incomplete beta argument out of [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) -
                           std::lgamma(b) + a * std::log(x) +
                           b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0))
    return front * beta_continued_fraction(x, a, b) / a;
  return 1.0 - front * beta_continued_fraction(1.0 - x, b, a) / b;
}

double regularized_lower_gamma(double a, double x) {
  if (!(a > 0.0)) throw parameter_error("incomplete gamma needs a > 0");
  if (!(x >= 0.0)) throw parameter_error("incomplete gamma needs x >= 0");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return lower_gamma_series(a, x);
  return 1.0 - upper_gamma_continued_fraction(a, x);
}

TopOrderStats top_order_statistics(std::span<const double> sample, int k) {
  const std::size_t n = sample.size();
  if (n < 2) throw parameter_error("need at least 2 observations");
  if (k < 1 || static_cast<std::size_t>(k) > n - 1)
    throw parameter_error("tail fraction k must satisfy 1 <= k <= n-1, got " +
                          std::to_string(k) + " with n = " + std::to_string(n));
  for (double v : sample)
    if (!std::isfinite(v))
      throw domain_error("sample contains a non-finite value");

  std::vector<double> work(sample.begin(), sample.end());
  const auto cut = work.begin() + (k + 1);
  std::nth_element(work.begin(), work.begin() + k, work.end(),
                   std::greater<double>());
  std::sort(work.begin(), cut, std::greater<double>());
  work.resize(static_cast<std::size_t>(k) + 1);

  TopOrderStats out;
  out.values = std::move(work);
  out.k = k;
  out.n = n;
  return out;
}

double cauchy_survival(double x) {
  // atan2 keeps full precision in both tails where 1/2 - atan(x)/pi
  // would cancel.
  return std::atan2(1.0, x) / kPi;
}

namespace detail {
double student_t_cdf_beta(double x, double df) {
  require_finite_df(df);
  if (std::isnan(x)) throw parameter_error("t CDF at NaN");
  if (std::isinf(x)) return x > 0.0 ? 1.0 : 0.0;
  const double x2 = x * x;
  const double tail =
      std::isfinite(x2)
          ? 0.5 * regularized_incomplete_beta(df / (df + x2), 0.5 * df, 0.5)
          : 0.0;
  return x >= 0.0 ? 1.0 - tail : tail;
}
}  // namespace detail

Probability student_t_cdf(double x, double df) {
  require_finite_df(df);
  if (std::isnan(x)) throw parameter_error("t CDF at NaN");
  if (df == 1.0) {
    if (std::isinf(x)) return Probability(x > 0.0 ? 1.0 : 0.0);
    return Probability::clamped(0.5 + std::atan(x) / kPi);
  }
  return Probability::clamped(detail::student_t_cdf_beta(x, df));
}

double student_t_upper_quantile(double survival, double df) {
  require_finite_df(df);
  if (!(survival > 0.0 && survival <= 0.5))
    throw parameter_error("upper-tail quantile needs survival in (0, 1/2]");
  if (survival == 0.5) return 0.0;
  if (df == 1.0) return 1.0 / std::tan(kPi * survival);

  double lo = 0.0;
  double hi = 1.0;
  while (student_t_upper_survival(hi, df) > survival) {
    lo = hi;
    hi *= 8.0;
    if (hi > 1e300) return hi;
  }

  // Power-law tail constant: P(X > x) ~ C x^{-df}.
  const double log_c = std::lgamma(0.5 * (df + 1.0)) - std::lgamma(0.5 * df) +
                       (0.5 * df - 1.0) * std::log(df) - std::log(kSqrtPi);
  double x = survival < 0.25
                 ? std::exp((log_c - std::log(survival)) / df)
                 : 0.5 * (lo + hi);
  if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);

  for (int iter = 0; iter < 200; ++iter) {
    const double f = student_t_upper_survival(x, df) - survival;
    if (f >= 0.0)
      lo = x;
    else
      hi = x;
    if (std::fabs(f) <= survival * 1e-12 + 5e-17) break;
    const double deriv = student_t_pdf(x, df);
    double next = deriv > 0.0 ? x + f / deriv : lo + 0.5 * (hi - lo);
    if (!(next > lo && next < hi)) next = lo + 0.5 * (hi - lo);
    if (hi - lo <= 1e-15 * (1.0 + std::fabs(x))) {
      x = next;
      break;
    }
    x = next;
  }
  return x;
}

double student_t_quantile(Probability u, double df) {
  require_finite_df(df);
  const double p = u.value();
  if (p == 0.0 || p == 1.0)
    throw parameter_error("t quantile is infinite at 0 and 1");
  if (p == 0.5) return 0.0;
  const double s = p < 0.5 ? p : 1.0 - p;
  const double x = student_t_upper_quantile(s, df);
  return p < 0.5 ? -x : x;
}

Probability chi_square_cdf(double x, int df) {
  if (df < 1) throw parameter_error("chi-square df must be >= 1");
  if (std::isnan(x)) throw parameter_error("chi-square CDF at NaN");
  if (x <= 0.0) return Probability(0.0);
  if (std::isinf(x)) return Probability(1.0);
  return Probability::clamped(regularized_lower_gamma(0.5 * df, 0.5 * x));
}

double chi_square_quantile(Probability u, int df) {
  if (df < 1) throw parameter_error("chi-square df must be >= 1");
  const double p = u.value();
  if (p == 1.0) throw parameter_error("chi-square quantile is infinite at 1");
  if (p == 0.0) return 0.0;

  const double a = 0.5 * df;
  const double nd = static_cast<double>(df);

  // Wilson-Hilferty start, with a small-quantile series fallback.
  double x;
  {
    const double z = standard_normal_quantile(Probability(p));
    const double t = 1.0 - 2.0 / (9.0 * nd) + z * std::sqrt(2.0 / (9.0 * nd));
    x = t > 0.0 ? nd * t * t * t
                : 2.0 * std::exp((std::log(p) + std::lgamma(a + 1.0)) / a);
  }
  if (!(x > 0.0) || !std::isfinite(x)) x = nd;

  double lo = 0.0;
  double hi = std::max(2.0 * x, 1.0);
  while (regularized_lower_gamma(a, 0.5 * hi) < p) {
    lo = hi;
    hi *= 4.0;
    if (hi > 1e300) return hi;
  }
  if (!(x > lo && x < hi)) x = lo + 0.5 * (hi - lo);

  for (int iter = 0; iter < 200; ++iter) {
    const double f = regularized_lower_gamma(a, 0.5 * x) - p;
    if (f <= 0.0)
      lo = x;
    else
      hi = x;
    if (std::fabs(f) <= 1e-14 + p * 1e-13) break;
    const double log_pdf =
        (a - 1.0) * std::log(0.5 * x) - 0.5 * x - std::lgamma(a);
    const double deriv = 0.5 * std::exp(log_pdf);
    double next = deriv > 0.0 && std::isfinite(deriv) ? x - f / deriv
                                                      : lo + 0.5 * (hi - lo);
    if (!(next > lo && next < hi)) next = lo + 0.5 * (hi - lo);
    if (hi - lo <= 1e-15 * (1.0 + std::fabs(x))) {
      x = next;
      break;
    }
    x = next;
  }
  return x;
}

Probability frechet1_cdf(double x) {
  if (std::isnan(x)) throw parameter_error("Frechet CDF at NaN");
  if (x <= 0.0) return Probability(0.0);
  return Probability::clamped(std::exp(-1.0 / x));
}

double frechet1_quantile(Probability u) {
  const double p = u.value();
  if (p == 0.0 || p == 1.0)
    throw parameter_error("Frechet quantile needs u in (0,1)");
  return -1.0 / std::log(p);
}

Probability gumbel_limit_cdf(double x) {
  if (std::isnan(x)) throw parameter_error("Gumbel CDF at NaN");
  return Probability::clamped(std::exp(-std::exp(-0.5 * x) / kSqrtPi));
}

double gumbel_test_quantile(Probability alpha) {
  const double a = alpha.value();
  if (a <= 0.0 || a >= 1.0)
    throw parameter_error("test level must lie strictly inside (0,1)");
  // q = -log(pi) - 2 log log(1/(1-alpha)); log1p keeps small levels
  // exact.
  return -std::log(kPi) - 2.0 * std::log(-std::log1p(-a));
}

double standard_normal_quantile(Probability u) {
  const double p = u.value();
  if (p == 0.0 || p == 1.0)
    throw parameter_error("normal quantile is infinite at 0 and 1");

  // Acklam's rational approximation, then one Halley step through erfc
  // to squeeze out full double accuracy.
  static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                  -2.759285104469687e+02, 1.383577518672690e+02,
                                  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                  -1.556989798598866e+02, 6.680131188771972e+01,
                                  -1.328068155288572e+01};
  static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                  -2.400758277161838e+00, -2.549732539343734e+00,
                                  4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                  2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  const double err = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double step = err * kSqrt2Pi * std::exp(0.5 * x * x);
  return x - step / (1.0 + 0.5 * x * step);
}

}  // namespace evt
