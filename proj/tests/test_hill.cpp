#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "evt/data_matrix.hpp"
#include "evt/errors.hpp"
#include "evt/hill.hpp"
#include "evt/rng.hpp"

using namespace evt;

namespace {

// Pareto(gamma) sample: U^(-gamma) has survival function x^(-1/gamma).
std::vector<double> pareto_sample(std::size_t n, double gamma,
                                  RandomStream& rng) {
  std::vector<double> x(n);
  for (auto& v : x) v = std::pow(rng.next_uniform(), -gamma);
  return x;
}

}  // namespace

TEST_CASE("hill estimate on a tiny hand-computed sample") {
  const std::vector<double> sample{1.0, 2.0, 4.0, 8.0};
  const auto [gamma, threshold] = hill_estimate(sample, 2);
  // Top three order statistics 8, 4, 2: mean of log(8/2), log(4/2).
  CHECK(gamma == (std::log(4.0) + std::log(2.0)) / 2.0);
  CHECK(gamma == doctest::Approx(1.5 * std::log(2.0)).epsilon(1e-15));
  CHECK(threshold == 2.0);
}

TEST_CASE("hill estimate ignores everything below the top k+1 values") {
  const std::vector<double> small{10.0, 9.0, 7.0, 5.0};
  const std::vector<double> large{0.5, 10.0, 3.0, 9.0, 1.0, 7.0, 2.0};
  const auto a = hill_estimate(small, 2);
  const auto b = hill_estimate(large, 2);
  CHECK(a.first == b.first);
  CHECK(a.second == b.second);
}

TEST_CASE("hill estimate of a constant tail is zero") {
  const std::vector<double> sample{5.0, 5.0, 5.0, 5.0};
  const auto [gamma, threshold] = hill_estimate(sample, 2);
  CHECK(gamma == 0.0);
  CHECK(threshold == 5.0);
}

TEST_CASE("hill estimate rejects non-positive tail thresholds") {
  CHECK_THROWS_AS(hill_estimate(std::vector<double>{-1.0, -2.0, 0.0, 1.0}, 2),
                  domain_error);
  CHECK_THROWS_AS(hill_estimate(std::vector<double>{0.0, 0.0, 1.0, 2.0}, 3),
                  domain_error);
  // Negative values below the threshold are fine; only the tail matters.
  CHECK_NOTHROW(hill_estimate(std::vector<double>{-3.0, 1.0, 2.0, 4.0}, 2));
}

TEST_CASE("hill estimate validates k and finiteness") {
  const std::vector<double> sample{1.0, 2.0, 3.0, 4.0};
  CHECK_THROWS_AS(hill_estimate(sample, 0), parameter_error);
  CHECK_THROWS_AS(hill_estimate(sample, 4), parameter_error);
  CHECK_THROWS_AS(hill_estimate(sample, -1), parameter_error);
  CHECK_NOTHROW(hill_estimate(sample, 3));

  const double nan = std::nan("");
  CHECK_THROWS_AS(hill_estimate(std::vector<double>{1.0, nan, 3.0, 4.0}, 2),
                  domain_error);
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(hill_estimate(std::vector<double>{1.0, inf, 3.0, 4.0}, 2),
                  domain_error);
}

TEST_CASE("hill estimate is scale invariant and power equivariant") {
  RandomStream rng(SeedSpec{2024, 7}, StreamPurpose::Generic);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 8 + rng.next_uint_below(33);
    const int k = 1 + static_cast<int>(rng.next_uint_below(n - 1));
    std::vector<double> x(n);
    for (auto& v : x) v = std::exp(rng.next_normal());

    const double base = hill_estimate(x, k).first;

    const double c = std::exp(2.0 * rng.next_normal());
    std::vector<double> scaled = x;
    for (auto& v : scaled) v *= c;
    CHECK(hill_estimate(scaled, k).first ==
          doctest::Approx(base).epsilon(1e-12));

    const double a = 0.3 + 2.7 * rng.next_uniform();
    std::vector<double> powered = x;
    for (auto& v : powered) v = std::pow(v, a);
    CHECK(hill_estimate(powered, k).first ==
          doctest::Approx(a * base).epsilon(1e-10));
  }
}

TEST_CASE("hill estimate is unbiased on exact Pareto tails") {
  const double gamma = 0.5;
  const std::size_t n = 4000;
  const int k = 400;
  const int reps = 120;

  double mean = 0.0;
  double mean_norm = 0.0;
  double var_norm = 0.0;
  std::vector<double> norms(reps);
  for (int r = 0; r < reps; ++r) {
    RandomStream rng(SeedSpec{777, static_cast<std::uint64_t>(r)},
                     StreamPurpose::Generic);
    const auto x = pareto_sample(n, gamma, rng);
    const double est = hill_estimate(x, k).first;
    mean += est;
    norms[r] = std::sqrt(static_cast<double>(k)) * (est / gamma - 1.0);
    mean_norm += norms[r];
  }
  mean /= reps;
  mean_norm /= reps;
  for (double z : norms) var_norm += (z - mean_norm) * (z - mean_norm);
  var_norm /= reps - 1;

  // sqrt(k) (gamma_hat / gamma - 1) is asymptotically standard normal.
  CHECK(mean == doctest::Approx(gamma).epsilon(0.02));
  CHECK(std::fabs(mean_norm) < 0.4);
  CHECK(var_norm > 0.6);
  CHECK(var_norm < 1.5);
}

TEST_CASE("column-wise estimates match per-column calls") {
  RandomStream rng(SeedSpec{11, 0}, StreamPurpose::Generic);
  DataMatrix data(50, 3);
  for (std::size_t j = 0; j < 3; ++j)
    for (std::size_t i = 0; i < 50; ++i)
      data.at(i, j) = std::pow(rng.next_uniform(), -0.8);

  const auto ks = KChoice::uniform(10, 3, 50);
  const auto est = hill_estimates(data, ks);
  REQUIRE(est.p() == 3);
  REQUIRE(est.thresholds.size() == 3);
  for (std::size_t j = 0; j < 3; ++j) {
    const auto [g, t] = hill_estimate(data.column(j), 10);
    CHECK(est.gamma_hat[j] == g);
    CHECK(est.thresholds[j] == t);
  }
  CHECK(est.k_choice.is_uniform());
  CHECK(est.k_choice.uniform_k() == 10);
}

TEST_CASE("column-wise estimates name the offending dimension") {
  DataMatrix data(4, 2);
  const double good[] = {1.0, 2.0, 4.0, 8.0};
  const double bad[] = {-1.0, -2.0, 0.0, 1.0};
  for (std::size_t i = 0; i < 4; ++i) {
    data.at(i, 0) = good[i];
    data.at(i, 1) = bad[i];
  }
  try {
    hill_estimates(data, KChoice::uniform(2, 2, 4));
    FAIL("expected domain_error");
  } catch (const domain_error& e) {
    CHECK(std::string(e.what()).find("dimension 1") != std::string::npos);
  }
}

TEST_CASE("k choice validation") {
  CHECK_THROWS_AS(KChoice::uniform(0, 2, 10), parameter_error);
  CHECK_THROWS_AS(KChoice::uniform(10, 2, 10), parameter_error);
  CHECK_THROWS_AS(KChoice::uniform(5, 0, 10), parameter_error);

  const auto ks = KChoice::uniform(3, 2, 10);
  CHECK(ks.per_dim == std::vector<int>{3, 3});
  CHECK(ks.n == 10);
  CHECK(ks.is_uniform());
  CHECK(ks.uniform_k() == 3);

  KChoice mixed;
  mixed.per_dim = {3, 5};
  mixed.n = 10;
  CHECK_FALSE(mixed.is_uniform());
  CHECK_THROWS_AS(mixed.uniform_k(), parameter_error);

  const auto est = [&] {
    DataMatrix data(10, 2);
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t i = 0; i < 10; ++i)
        data.at(i, j) = static_cast<double>(i + j + 1);
    return hill_estimates(data, mixed);
  }();
  CHECK(est.k_choice.per_dim == std::vector<int>{3, 5});
}

TEST_CASE("confidence interval brackets the estimate symmetrically") {
  const auto [lo1, hi1] = hill_confidence_interval(1.0, 100, Probability(0.95));
  CHECK(lo1 == doctest::Approx(0.8040036015459946).epsilon(1e-14));
  CHECK(hi1 == doctest::Approx(1.1959963984540054).epsilon(1e-14));

  const auto [lo2, hi2] = hill_confidence_interval(2.0, 400, Probability(0.95));
  CHECK(lo2 == doctest::Approx(1.8040036015459946).epsilon(1e-14));
  CHECK(hi2 == doctest::Approx(2.1959963984540053).epsilon(1e-14));

  const auto [lo0, hi0] = hill_confidence_interval(0.0, 50, Probability(0.9));
  CHECK(lo0 == 0.0);
  CHECK(hi0 == 0.0);

  CHECK_THROWS_AS(hill_confidence_interval(1.0, 0, Probability(0.95)),
                  parameter_error);
  CHECK_THROWS_AS(hill_confidence_interval(1.0, 100, Probability(0.0)),
                  parameter_error);
  CHECK_THROWS_AS(hill_confidence_interval(1.0, 100, Probability(1.0)),
                  parameter_error);
}

TEST_CASE("confidence interval covers the truth at roughly nominal rate") {
  const double gamma = 1.0;
  const std::size_t n = 4000;
  const int k = 400;
  const int reps = 200;
  int covered = 0;
  for (int r = 0; r < reps; ++r) {
    RandomStream rng(SeedSpec{31337, static_cast<std::uint64_t>(r)},
                     StreamPurpose::Generic);
    const auto x = pareto_sample(n, gamma, rng);
    const double est = hill_estimate(x, k).first;
    const auto [lo, hi] = hill_confidence_interval(est, k, Probability(0.9));
    if (lo <= gamma && gamma <= hi) ++covered;
  }
  const double coverage = static_cast<double>(covered) / reps;
  CHECK(coverage > 0.82);
  CHECK(coverage < 0.97);
}

TEST_CASE("tail size warning fires only for tiny k relative to p") {
  // k = 50, p = 50: log(50)^5 / 100 is about 9.2, well below 50.
  CHECK_FALSE(tail_size_warning(KChoice::uniform(50, 50, 1000)).has_value());
  CHECK_FALSE(tail_size_warning(KChoice::uniform(80, 100, 1000)).has_value());

  // k = 5, p = 100: log(100)^5 / 100 is about 20.7.
  const auto warn = tail_size_warning(KChoice::uniform(5, 100, 1000));
  REQUIRE(warn.has_value());
  CHECK_FALSE(warn->empty());

  CHECK(tail_size_warning(KChoice::uniform(10, 1000, 2000)).has_value());

  // The smallest k and the dimension drive the check: at p = 2 the
  // requirement is negligible even for k = 5.
  KChoice mixed;
  mixed.per_dim = {5, 200};
  mixed.n = 1000;
  CHECK_FALSE(tail_size_warning(mixed).has_value());
  CHECK_FALSE(tail_size_warning(KChoice::uniform(5, 2, 1000)).has_value());
}
