#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <set>
#include <vector>

#include "evt/dependence.hpp"
#include "evt/errors.hpp"
#include "evt/hill.hpp"
#include "evt/numerics.hpp"
#include "evt/simulate.hpp"

using namespace evt;

namespace {

double empirical_fraction(std::span<const double> x, double threshold) {
  std::size_t count = 0;
  for (double v : x)
    if (v > threshold) ++count;
  return static_cast<double>(count) / static_cast<double>(x.size());
}

// Kolmogorov-Smirnov distance of a sample against the uniform CDF.
double ks_uniform(std::vector<double> u) {
  std::sort(u.begin(), u.end());
  const auto n = static_cast<double>(u.size());
  double d = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double hi = (static_cast<double>(i) + 1.0) / n - u[i];
    const double lo = u[i] - static_cast<double>(i) / n;
    d = std::max(d, std::max(hi, lo));
  }
  return d;
}

ModelSpec spec_for(Model m, std::size_t n, std::size_t p, double gamma) {
  ModelSpec spec;
  spec.model = m;
  spec.n = n;
  spec.p = p;
  spec.gamma.assign(p, gamma);
  return spec;
}

}  // namespace

TEST_CASE("model letters round-trip") {
  for (Model m : {Model::A, Model::B, Model::C, Model::D})
    CHECK(parse_model(model_letter(m)) == m);
  CHECK(parse_model('a') == Model::A);
  CHECK(parse_model('d') == Model::D);
  CHECK_THROWS_AS(parse_model('E'), parameter_error);
  CHECK_THROWS_AS(parse_model(' '), parameter_error);
}

TEST_CASE("generation validates its specification") {
  CHECK_THROWS_AS(generate(spec_for(Model::A, 1, 2, 1.0), SeedSpec{}),
                  parameter_error);
  CHECK_THROWS_AS(generate(spec_for(Model::A, 10, 0, 1.0), SeedSpec{}),
                  parameter_error);
  auto bad_len = spec_for(Model::A, 10, 3, 1.0);
  bad_len.gamma.pop_back();
  CHECK_THROWS_AS(generate(bad_len, SeedSpec{}), parameter_error);
  auto bad_gamma = spec_for(Model::B, 10, 2, 1.0);
  bad_gamma.gamma[1] = 0.0;
  CHECK_THROWS_AS(generate(bad_gamma, SeedSpec{}), parameter_error);
  bad_gamma.gamma[1] = -0.5;
  CHECK_THROWS_AS(generate(bad_gamma, SeedSpec{}), parameter_error);
}

TEST_CASE("generation is deterministic in the seed") {
  const auto spec = spec_for(Model::C, 50, 7, 1.2);
  const auto a = generate(spec, SeedSpec{42, 3});
  const auto b = generate(spec, SeedSpec{42, 3});
  CHECK(a.matrix == b.matrix);
  const auto c = generate(spec, SeedSpec{42, 4});
  CHECK_FALSE(a.matrix == c.matrix);
  const auto d = generate(spec, SeedSpec{43, 3});
  CHECK_FALSE(a.matrix == d.matrix);
}

TEST_CASE("cauchy pairs have standard cauchy margins and positive association") {
  const std::size_t count = 20000;
  const auto pairs = bivariate_cauchy_pairs(count, 0.7, SeedSpec{7, 0});
  REQUIRE(pairs.size() == count);

  std::size_t first_above1 = 0, second_above1 = 0, both_positive = 0;
  for (const auto& [x, y] : pairs) {
    if (x > 1.0) ++first_above1;
    if (y > 1.0) ++second_above1;
    if (x > 0.0 && y > 0.0) ++both_positive;
  }
  const auto frac = [count](std::size_t c) {
    return static_cast<double>(c) / static_cast<double>(count);
  };
  // P(X > 1) = 1/4 for a standard Cauchy coordinate.
  CHECK(frac(first_above1) == doctest::Approx(0.25).epsilon(0.06));
  CHECK(frac(second_above1) == doctest::Approx(0.25).epsilon(0.06));
  // Orthant probability of the underlying normals:
  // 1/4 + asin(0.7) / (2 pi).
  const double orthant = 0.25 + std::asin(0.7) / (2.0 * std::acos(-1.0));
  CHECK(frac(both_positive) == doctest::Approx(orthant).epsilon(0.04));

  CHECK_THROWS_AS(bivariate_cauchy_pairs(10, 1.0, SeedSpec{}),
                  parameter_error);
  CHECK_THROWS_AS(bivariate_cauchy_pairs(10, -1.0, SeedSpec{}),
                  parameter_error);
}

TEST_CASE("pair models couple coordinates within a pair only") {
  const auto result = generate(spec_for(Model::A, 5000, 3, 1.0), SeedSpec{8, 0});
  const auto& m = result.matrix;
  std::size_t same01 = 0, same02 = 0;
  for (std::size_t s = 0; s < 5000; ++s) {
    if ((m.at(s, 0) > 0.0) == (m.at(s, 1) > 0.0)) ++same01;
    if ((m.at(s, 0) > 0.0) == (m.at(s, 2) > 0.0)) ++same02;
  }
  const double within = static_cast<double>(same01) / 5000.0;
  const double across = static_cast<double>(same02) / 5000.0;
  // Sign agreement 1/2 + asin(0.7)/pi within a pair, 1/2 across pairs.
  const double expected = 0.5 + std::asin(0.7) / std::acos(-1.0);
  CHECK(within == doctest::Approx(expected).epsilon(0.04));
  CHECK(across == doctest::Approx(0.5).epsilon(0.06));
}

TEST_CASE("model A margins follow the target t distribution") {
  // gamma = 1 leaves the latent Cauchy untouched.
  const auto cauchy = generate(spec_for(Model::A, 8000, 1, 1.0), SeedSpec{9, 0});
  CHECK(empirical_fraction(cauchy.matrix.column(0), 1.0) ==
        doctest::Approx(0.25).epsilon(0.08));

  // gamma = 1/2 gives t with 2 degrees of freedom:
  // P(X > 1) = 1/2 (1 - 1/sqrt(3)).
  const auto t2 = generate(spec_for(Model::A, 8000, 1, 0.5), SeedSpec{10, 0});
  const double p_above1 = 0.5 * (1.0 - 1.0 / std::sqrt(3.0));
  CHECK(empirical_fraction(t2.matrix.column(0), 1.0) ==
        doctest::Approx(p_above1).epsilon(0.10));

  // Symmetry of the margins.
  CHECK(empirical_fraction(t2.matrix.column(0), 0.0) ==
        doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("model B margins are exact Pareto-type transforms") {
  const double gamma = 0.8;
  const auto result = generate(spec_for(Model::B, 5000, 1, gamma),
                               SeedSpec{11, 0});
  // X^(-1/gamma) recovers the underlying uniform.
  std::vector<double> u;
  u.reserve(5000);
  for (double v : result.matrix.column(0)) {
    REQUIRE(v > 0.0);
    u.push_back(std::pow(v, -1.0 / gamma));
  }
  CHECK(ks_uniform(std::move(u)) < 2.2 / std::sqrt(5000.0));
}

TEST_CASE("model B tail index matches gamma") {
  const auto result = generate(spec_for(Model::B, 20000, 1, 0.8),
                               SeedSpec{12, 0});
  const auto [gamma_hat, threshold] =
      hill_estimate(result.matrix.column(0), 500);
  CHECK(gamma_hat == doctest::Approx(0.8).epsilon(0.15));
  CHECK(threshold > 0.0);
}

TEST_CASE("model C margins are Frechet with the index folded in") {
  const auto unit = generate(spec_for(Model::C, 5000, 1, 1.0), SeedSpec{13, 0});
  // P(X <= 1) = exp(-1) for a unit Frechet margin.
  CHECK(1.0 - empirical_fraction(unit.matrix.column(0), 1.0) ==
        doctest::Approx(std::exp(-1.0)).epsilon(0.05));

  const auto squared = generate(spec_for(Model::C, 5000, 1, 2.0),
                                SeedSpec{13, 0});
  // With gamma = 2, P(X <= 4) = P(latent <= 2) = exp(-1/2).
  CHECK(1.0 - empirical_fraction(squared.matrix.column(0), 4.0) ==
        doctest::Approx(std::exp(-0.5)).epsilon(0.05));
}

TEST_CASE("factor models share factors between adjacent dimensions only") {
  const auto result = generate(spec_for(Model::C, 4000, 5, 1.0),
                               SeedSpec{14, 0});
  const auto dep = tail_dependence_matrix(result.matrix, 200);
  for (std::size_t j = 0; j < 5; ++j) CHECK(dep.at(j, j) == 1.0);
  for (std::size_t j = 0; j + 1 < 5; ++j)
    CHECK(dep.at(j, j + 1) == doctest::Approx(0.5).epsilon(0.25));
  // Disjoint factors: joint exceedances at the independence level k/n.
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = i + 2; j < 5; ++j) CHECK(dep.at(i, j) < 0.2);
}

TEST_CASE("model D margins are exact Pareto at the unit null") {
  const auto result = generate(spec_for(Model::D, 5000, 1, 1.0),
                               SeedSpec{15, 0});
  // P(X > t) = 1/t for t >= 1.
  CHECK(empirical_fraction(result.matrix.column(0), 2.0) ==
        doctest::Approx(0.5).epsilon(0.05));
  CHECK(empirical_fraction(result.matrix.column(0), 10.0) ==
        doctest::Approx(0.1).epsilon(0.12));
  for (double v : result.matrix.column(0)) REQUIRE(v >= 1.0);
}

TEST_CASE("model D exponent conventions differ away from the null") {
  // At gamma = 1 the two conventions coincide.
  auto spec = spec_for(Model::D, 200, 2, 1.0);
  const auto plain = generate(spec, SeedSpec{16, 0});
  spec.model_d_pareto_exponent = true;
  const auto flagged = generate(spec, SeedSpec{16, 0});
  CHECK(plain.matrix == flagged.matrix);

  // At gamma = 2 the default margin has tail index 1/2 and the
  // alternative convention has tail index 2.
  auto wide = spec_for(Model::D, 20000, 1, 2.0);
  const auto inverse_index = generate(wide, SeedSpec{17, 0});
  wide.model_d_pareto_exponent = true;
  const auto direct_index = generate(wide, SeedSpec{17, 0});
  CHECK(hill_estimate(inverse_index.matrix.column(0), 500).first ==
        doctest::Approx(0.5).epsilon(0.2));
  CHECK(hill_estimate(direct_index.matrix.column(0), 500).first ==
        doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("overflowing transforms saturate and are counted") {
  // Extreme gamma drives the Pareto transform past the double range.
  const auto result = generate(spec_for(Model::B, 200, 1, 400.0),
                               SeedSpec{18, 0});
  CHECK(result.saturated > 0);
  for (double v : result.matrix.column(0)) CHECK(std::isfinite(v));
}

TEST_CASE("alternative support size grows like the fourth root") {
  const auto ks50 = KChoice::uniform(50, 50, 1000);
  CHECK(draw_alternative(50, ks50, SeedSpec{1, 0}).second.m == 2);
  const auto ks80 = KChoice::uniform(50, 80, 1000);
  CHECK(draw_alternative(80, ks80, SeedSpec{1, 0}).second.m == 2);
  const auto ks100 = KChoice::uniform(50, 100, 1000);
  CHECK(draw_alternative(100, ks100, SeedSpec{1, 0}).second.m == 3);
  const auto ks16 = KChoice::uniform(50, 16, 1000);
  CHECK(draw_alternative(16, ks16, SeedSpec{1, 0}).second.m == 2);
  const auto ks15 = KChoice::uniform(50, 15, 1000);
  CHECK(draw_alternative(15, ks15, SeedSpec{1, 0}).second.m == 1);
  const auto ks2 = KChoice::uniform(100, 2, 1000);
  CHECK(draw_alternative(2, ks2, SeedSpec{1, 0}).second.m == 1);
}

TEST_CASE("alternative draws perturb a sorted sparse support") {
  const auto ks = KChoice::uniform(50, 50, 1000);
  const double magnitude = 2.0 * std::sqrt(std::log(50.0) / 50.0);
  CHECK(magnitude == doctest::Approx(0.5594299245073074).epsilon(1e-14));

  bool saw_positive = false, saw_negative = false;
  for (std::uint64_t stream = 0; stream < 64; ++stream) {
    const auto [gamma, alt] = draw_alternative(50, ks, SeedSpec{99, stream});
    REQUIRE(alt.support.size() == 2);
    REQUIRE(alt.deltas.size() == 2);
    CHECK(std::is_sorted(alt.support.begin(), alt.support.end()));
    CHECK(alt.support[0] != alt.support[1]);
    for (std::size_t idx : alt.support) CHECK(idx < 50);

    std::set<std::size_t> support(alt.support.begin(), alt.support.end());
    for (std::size_t j = 0; j < 50; ++j) {
      if (support.count(j) == 0) CHECK(gamma[j] == 1.0);
    }
    for (std::size_t s = 0; s < 2; ++s) {
      CHECK(std::fabs(alt.deltas[s]) ==
            doctest::Approx(magnitude).epsilon(1e-14));
      CHECK(gamma[alt.support[s]] == 1.0 + alt.deltas[s]);
      (alt.deltas[s] > 0.0 ? saw_positive : saw_negative) = true;
    }
  }
  CHECK(saw_positive);
  CHECK(saw_negative);

  const auto first = draw_alternative(50, ks, SeedSpec{99, 5});
  const auto again = draw_alternative(50, ks, SeedSpec{99, 5});
  CHECK(first.first == again.first);

  const double mag100 = 2.0 * std::sqrt(std::log(100.0) / 80.0);
  CHECK(mag100 == doctest::Approx(0.4798525912188081).epsilon(1e-14));
}

TEST_CASE("alternative draws reject indices pushed below zero") {
  // 1 + delta <= 0 once 2 sqrt(log(p)/k) >= 1; k = 4 at p = 1000 is far
  // past that, so a negative sign must eventually surface the error.
  const auto ks = KChoice::uniform(4, 1000, 1000);
  bool threw = false;
  for (std::uint64_t stream = 0; stream < 50 && !threw; ++stream) {
    try {
      draw_alternative(1000, ks, SeedSpec{3, stream});
    } catch (const domain_error&) {
      threw = true;
    }
  }
  CHECK(threw);

  CHECK_THROWS_AS(draw_alternative(1, KChoice::uniform(2, 1, 10), SeedSpec{}),
                  parameter_error);
  CHECK_THROWS_AS(draw_alternative(50, KChoice::uniform(5, 49, 100), SeedSpec{}),
                  parameter_error);
}

TEST_CASE("tail dependence coefficient of an elliptical cauchy pair") {
  CHECK(elliptical_t1_tail_dependence(0.0) ==
        doctest::Approx(0.29289321881345254).epsilon(1e-14));
  CHECK(elliptical_t1_tail_dependence(0.7) ==
        doctest::Approx(0.6127016653792583).epsilon(1e-14));
  CHECK(elliptical_t1_tail_dependence(1.0) == doctest::Approx(1.0));
  CHECK(elliptical_t1_tail_dependence(0.0) ==
        doctest::Approx(1.0 - std::sqrt(0.5)).epsilon(1e-14));
  CHECK_THROWS_AS(elliptical_t1_tail_dependence(-1.0), parameter_error);
}

TEST_CASE("theoretical dependence pattern mirrors the latent structure") {
  const auto r_pairs = model_tail_dependence(Model::A, 5);
  const double lambda = elliptical_t1_tail_dependence(0.7);
  for (std::size_t j = 0; j < 5; ++j) CHECK(r_pairs.at(j, j) == 1.0);
  CHECK(r_pairs.at(0, 1) == lambda);
  CHECK(r_pairs.at(2, 3) == lambda);
  CHECK(r_pairs.at(1, 2) == 0.0);
  CHECK(r_pairs.at(3, 4) == 0.0);
  CHECK(r_pairs.at(0, 2) == 0.0);

  const auto r_band = model_tail_dependence(Model::D, 4);
  for (std::size_t j = 0; j + 1 < 4; ++j) {
    CHECK(r_band.at(j, j + 1) == 0.5);
    CHECK(r_band.at(j + 1, j) == 0.5);
  }
  CHECK(r_band.at(0, 2) == 0.0);
  CHECK(r_band.at(0, 3) == 0.0);

  // The empirical matrix of model A data should approach the pattern.
  const auto data = generate(spec_for(Model::A, 4000, 4, 1.0), SeedSpec{20, 0});
  const auto dep = tail_dependence_matrix(data.matrix, 400);
  CHECK(dep.at(0, 1) == doctest::Approx(lambda).epsilon(0.2));
  CHECK(dep.at(2, 3) == doctest::Approx(lambda).epsilon(0.2));
  CHECK(dep.at(0, 2) < 0.35);
}

TEST_CASE("empirical and theoretical dependence agree for the band model") {
  const auto data = generate(spec_for(Model::C, 5000, 3, 1.0), SeedSpec{21, 0});
  const auto dep = tail_dependence_matrix(data.matrix, 500);
  CHECK(dep.at(0, 1) == doctest::Approx(0.5).epsilon(0.2));
  CHECK(dep.at(1, 2) == doctest::Approx(0.5).epsilon(0.2));
}
