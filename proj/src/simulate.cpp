#include "evt/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "evt/numerics.hpp"

namespace evt {

namespace {

constexpr double kPairOffdiag = 0.7;

void validate_spec(const ModelSpec& spec) {
  if (spec.n < 2) throw parameter_error("need at least 2 observations");
  if (spec.p < 1) throw parameter_error("dimension must be positive");
  if (spec.gamma.size() != spec.p)
    throw parameter_error("gamma has " + std::to_string(spec.gamma.size()) +
                          " entries for dimension " + std::to_string(spec.p));
  for (std::size_t j = 0; j < spec.p; ++j)
    if (!(spec.gamma[j] > 0.0) || !std::isfinite(spec.gamma[j]))
      throw parameter_error("extreme value index for dimension " +
                            std::to_string(j) + " must be a positive real");
}

double saturate(double v, std::uint64_t& count) {
  if (std::isfinite(v)) return v;
  ++count;
  return std::numeric_limits<double>::max();
}

// Latent field of models A and B: coordinate pairs of a bivariate
// Cauchy, dimensions (0,1), (2,3), ...; an odd last dimension keeps
// only the first coordinate of its pair.
void fill_cauchy_pairs(DataMatrix& latent, RandomStream& stream) {
  const std::size_t n = latent.rows();
  const std::size_t p = latent.cols();
  const double slope = std::sqrt(1.0 - kPairOffdiag * kPairOffdiag);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t j = 0; j < p; j += 2) {
      const double z1 = stream.next_normal();
      const double z2 = stream.next_normal();
      const double w = std::fabs(stream.next_normal());
      latent.at(s, j) = z1 / w;
      if (j + 1 < p)
        latent.at(s, j + 1) = (kPairOffdiag * z1 + slope * z2) / w;
    }
  }
}

// Latent field of models C and D: X_j = max(Z_j, Z_{j+1}) / 2 over
// p + 1 iid unit Frechet factors, giving adjacent-dimension dependence.
void fill_frechet_band(DataMatrix& latent, RandomStream& stream) {
  const std::size_t n = latent.rows();
  const std::size_t p = latent.cols();
  std::vector<double> factors(p + 1);
  for (std::size_t s = 0; s < n; ++s) {
    for (double& z : factors) z = -1.0 / std::log(stream.next_uniform());
    for (std::size_t j = 0; j < p; ++j)
      latent.at(s, j) = std::max(factors[j], factors[j + 1]) / 2.0;
  }
}

// St_{1/gamma}^{-1}(St_1(x)): t margins with df = 1/gamma.  Solved
// through the survival function so deep tails keep relative precision.
double transform_t_margin(double x, double gamma) {
  if (gamma == 1.0) return x;
  const double df = 1.0 / gamma;
  if (x == 0.0) return 0.0;
  const double tail = cauchy_survival(std::fabs(x));
  const double magnitude =
      tail >= 0.5 ? 0.0 : student_t_upper_quantile(tail, df);
  return x < 0.0 ? -magnitude : magnitude;
}

}  // namespace

char model_letter(Model m) {
  switch (m) {
    case Model::A: return 'A';
    case Model::B: return 'B';
    case Model::C: return 'C';
    case Model::D: return 'D';
  }
  throw parameter_error("unknown model");
}

Model parse_model(char letter) {
  switch (letter) {
    case 'A': case 'a': return Model::A;
    case 'B': case 'b': return Model::B;
    case 'C': case 'c': return Model::C;
    case 'D': case 'd': return Model::D;
  }
  throw parameter_error(std::string("unknown model '") + letter +
                        "' (expected A, B, C or D)");
}

std::vector<std::pair<double, double>> bivariate_cauchy_pairs(
    std::size_t count, double offdiag, const SeedSpec& seed) {
  if (!(offdiag > -1.0 && offdiag < 1.0))
    throw parameter_error("pair correlation must lie strictly inside (-1,1)");
  RandomStream stream(seed, StreamPurpose::DataGeneration);
  const double slope = std::sqrt(1.0 - offdiag * offdiag);
  std::vector<std::pair<double, double>> pairs;
  pairs.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double z1 = stream.next_normal();
    const double z2 = stream.next_normal();
    const double w = std::fabs(stream.next_normal());
    pairs.emplace_back(z1 / w, (offdiag * z1 + slope * z2) / w);
  }
  return pairs;
}

GenerationResult generate(const ModelSpec& spec, const SeedSpec& seed) {
  validate_spec(spec);

  GenerationResult out{DataMatrix(spec.n, spec.p), 0};
  RandomStream stream(seed, StreamPurpose::DataGeneration);

  const bool pair_model = spec.model == Model::A || spec.model == Model::B;
  if (pair_model)
    fill_cauchy_pairs(out.matrix, stream);
  else
    fill_frechet_band(out.matrix, stream);

  for (std::size_t j = 0; j < spec.p; ++j) {
    const double gamma = spec.gamma[j];
    auto column = out.matrix.column(j);
    switch (spec.model) {
      case Model::A:
        for (double& x : column) x = transform_t_margin(x, gamma);
        break;
      case Model::B:
        // (1 - St_1(x))^(-gamma), with the survival factor computed
        // directly.
        for (double& x : column)
          x = saturate(std::pow(cauchy_survival(x), -gamma), out.saturated);
        break;
      case Model::C:
        if (gamma != 1.0)
          for (double& x : column)
            x = saturate(std::pow(x, gamma), out.saturated);
        break;
      case Model::D: {
        // (1 - Frechet(x))^e with e = -1/gamma (default) or -gamma.
        const double e =
            spec.model_d_pareto_exponent ? -gamma : -1.0 / gamma;
        for (double& x : column)
          x = saturate(std::pow(-std::expm1(-1.0 / x), e), out.saturated);
        break;
      }
    }
  }
  return out;
}

std::pair<std::vector<double>, AltSpec> draw_alternative(std::size_t p,
                                                         const KChoice& ks,
                                                         const SeedSpec& seed) {
  if (p < 2) throw parameter_error("alternative needs dimension p >= 2");
  if (ks.p() != p)
    throw parameter_error("k choice covers " + std::to_string(ks.p()) +
                          " dimensions but p = " + std::to_string(p));

  AltSpec alt;
  alt.m = 1;
  while (static_cast<std::size_t>(alt.m + 1) * (alt.m + 1) * (alt.m + 1) *
             (alt.m + 1) <=
         p)
    ++alt.m;

  RandomStream stream(seed, StreamPurpose::AlternativeDraw);
  while (alt.support.size() < static_cast<std::size_t>(alt.m)) {
    const auto idx = static_cast<std::size_t>(stream.next_uint_below(p));
    if (std::find(alt.support.begin(), alt.support.end(), idx) ==
        alt.support.end())
      alt.support.push_back(idx);
  }
  std::sort(alt.support.begin(), alt.support.end());

  std::vector<double> gamma(p, 1.0);
  const double log_p = std::log(static_cast<double>(p));
  alt.deltas.reserve(alt.support.size());
  for (std::size_t idx : alt.support) {
    const double magnitude = 2.0 * std::sqrt(log_p / ks.per_dim[idx]);
    const double delta = (stream.next_bits() & 1u) ? magnitude : -magnitude;
    alt.deltas.push_back(delta);
    gamma[idx] = 1.0 + delta;
    if (!(gamma[idx] > 0.0))
      throw domain_error("alternative index 1 + delta = " +
                         std::to_string(gamma[idx]) + " at dimension " +
                         std::to_string(idx) +
                         " is not positive; k is too small for this p");
  }
  return {std::move(gamma), std::move(alt)};
}

double elliptical_t1_tail_dependence(double rho) {
  if (!(rho > -1.0 && rho <= 1.0))
    throw parameter_error("correlation must lie in (-1,1]");
  const double x = std::sqrt(2.0 * (1.0 - rho) / (1.0 + rho));
  // Closed-form t CDF with 2 degrees of freedom:
  //   T_2(x) = 1/2 + x / (2 sqrt(2 + x^2)).
  const double t2 = 0.5 + x / (2.0 * std::sqrt(2.0 + x * x));
  return 2.0 * (1.0 - t2);
}

SymMatrix model_tail_dependence(Model m, std::size_t p, double offdiag) {
  if (p < 1) throw parameter_error("dimension must be positive");
  SymMatrix r = SymMatrix::identity(p);
  if (m == Model::A || m == Model::B) {
    const double lambda = elliptical_t1_tail_dependence(offdiag);
    for (std::size_t j = 0; j + 1 < p; j += 2) {
      r.at(j, j + 1) = lambda;
      r.at(j + 1, j) = lambda;
    }
  } else {
    for (std::size_t j = 0; j + 1 < p; ++j) {
      r.at(j, j + 1) = 0.5;
      r.at(j + 1, j) = 0.5;
    }
  }
  return r;
}

}  // namespace evt
