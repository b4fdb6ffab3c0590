#include "evt/hill.hpp"

#include <cmath>
#include <string>

namespace evt {

KChoice KChoice::uniform(int k, std::size_t p, std::size_t n) {
  if (p == 0) throw parameter_error("dimension must be positive");
  if (n < 2) throw parameter_error("need at least 2 observations");
  if (k < 1 || static_cast<std::size_t>(k) > n - 1)
    throw parameter_error("tail fraction k must satisfy 1 <= k <= n-1, got " +
                          std::to_string(k) + " with n = " + std::to_string(n));
  KChoice ks;
  ks.per_dim.assign(p, k);
  ks.n = n;
  return ks;
}

bool KChoice::is_uniform() const {
  if (per_dim.empty()) return true;
  for (int k : per_dim)
    if (k != per_dim.front()) return false;
  return true;
}

int KChoice::uniform_k() const {
  if (per_dim.empty() || !is_uniform())
    throw parameter_error("operation requires one common k across dimensions");
  return per_dim.front();
}

std::pair<double, double> hill_estimate(std::span<const double> sample, int k) {
  const TopOrderStats top = top_order_statistics(sample, k);
  const double threshold = top.threshold();
  if (!(threshold > 0.0))
    throw domain_error("Hill estimator undefined: tail threshold " +
                       std::to_string(threshold) + " is not positive");
  double sum = 0.0;
  for (int i = 0; i < k; ++i)
    sum += std::log(top.values[static_cast<std::size_t>(i)] / threshold);
  return {sum / k, threshold};
}

HillEstimates hill_estimates(const DataMatrix& data, const KChoice& ks) {
  if (ks.p() != data.cols())
    throw parameter_error("k choice covers " + std::to_string(ks.p()) +
                          " dimensions but the data has " +
                          std::to_string(data.cols()));
  if (ks.n != data.rows())
    throw parameter_error("k choice was made for n = " + std::to_string(ks.n) +
                          " but the data has " + std::to_string(data.rows()) +
                          " rows");
  HillEstimates est;
  est.k_choice = ks;
  est.gamma_hat.reserve(data.cols());
  est.thresholds.reserve(data.cols());
  for (std::size_t j = 0; j < data.cols(); ++j) {
    try {
      const auto [gamma, threshold] =
          hill_estimate(data.column(j), ks.per_dim[j]);
      est.gamma_hat.push_back(gamma);
      est.thresholds.push_back(threshold);
    } catch (const error& e) {
      throw domain_error("dimension " + std::to_string(j) + ": " + e.what());
    }
  }
  return est;
}

std::pair<double, double> hill_confidence_interval(double gamma_hat, int k,
                                                   Probability level) {
  if (k < 1) throw parameter_error("confidence interval needs k >= 1");
  const double lv = level.value();
  if (lv <= 0.0 || lv >= 1.0)
    throw parameter_error("confidence level must lie strictly inside (0,1)");
  const double z = standard_normal_quantile(Probability(0.5 + 0.5 * lv));
  const double half_width = z / std::sqrt(static_cast<double>(k));
  return {gamma_hat * (1.0 - half_width), gamma_hat * (1.0 + half_width)};
}

std::optional<std::string> tail_size_warning(const KChoice& ks) {
  if (ks.p() < 2) return std::nullopt;
  // The Gumbel calibration needs k to grow a fair bit faster than
  // log^5(p) / something moderate; flag choices that are clearly below
  // any such regime.
  const double lp = std::log(static_cast<double>(ks.p()));
  const double needed = lp * lp * lp * lp * lp / 100.0;
  int k_min = ks.per_dim.front();
  for (int k : ks.per_dim) k_min = std::min(k_min, k);
  if (static_cast<double>(k_min) < needed) {
    return "tail sample size " + std::to_string(k_min) +
           " is small for dimension " + std::to_string(ks.p()) +
           "; the Gumbel calibration may be inaccurate";
  }
  return std::nullopt;
}

}  // namespace evt
