#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "evt/data_matrix.hpp"
#include "evt/hill.hpp"
#include "evt/linalg.hpp"
#include "evt/rng.hpp"

namespace evt {

// The four data-generating processes used in the size/power studies.
// All have per-dimension extreme value index gamma_j:
//   A: dependent pairs of bivariate Cauchy coordinates pushed through
//      St_{1/gamma}^{-1}(St_1(.)), so margins are t with df 1/gamma;
//   B: the same pairs mapped to Pareto-type margins (1 - St_1(.))^(-gamma);
//   C: a moving-maximum of iid unit Frechet factors, raised to gamma;
//   D: the same latent field with inverted-survival margins
//      (1 - Frechet(.))^(-1/gamma).
enum class Model { A, B, C, D };

char model_letter(Model m);
Model parse_model(char letter);

struct ModelSpec {
  Model model = Model::A;
  std::size_t n = 0;
  std::size_t p = 0;
  std::vector<double> gamma;  // size p, all > 0

  // Model D margin exponent.  The default raises the uniformized latent
  // variable to -1/gamma_j, giving extreme value index 1/gamma_j (equal
  // to gamma_j on the homogeneous unit null).  Setting this uses
  // -gamma_j instead, matching model B's convention so the index is
  // gamma_j itself under any gamma.
  bool model_d_pareto_exponent = false;
};

struct GenerationResult {
  DataMatrix matrix;
  // Count of transformed values that overflowed to infinity and were
  // saturated to the largest finite double.
  std::uint64_t saturated = 0;
};

// Correlated standard Cauchy pairs: ratios of a correlated bivariate
// normal (off-diagonal offdiag) to an independent half-normal.
std::vector<std::pair<double, double>> bivariate_cauchy_pairs(
    std::size_t count, double offdiag, const SeedSpec& seed);

// Draws an n x p sample of the given model.  Deterministic in the seed:
// the same SeedSpec always produces the identical matrix regardless of
// what else has been generated.
GenerationResult generate(const ModelSpec& spec, const SeedSpec& seed);

// Sparse deviation from the homogeneous null: m = floor(p^(1/4))
// dimensions drawn without replacement get gamma_j = 1 + delta_j with
// |delta_j| = 2 sqrt(log(p) / k_j) and a fair random sign; the rest
// stay at 1.
struct AltSpec {
  int m = 0;
  std::vector<std::size_t> support;  // ascending
  std::vector<double> deltas;        // aligned with support
};

std::pair<std::vector<double>, AltSpec> draw_alternative(std::size_t p,
                                                         const KChoice& ks,
                                                         const SeedSpec& seed);

// Tail dependence coefficient of a bivariate elliptical t_1 pair with
// correlation rho: 2 (1 - T_2(sqrt(2 (1-rho)/(1+rho)))) with the
// closed-form two-degrees-of-freedom CDF.
double elliptical_t1_tail_dependence(double rho);

// Theoretical tail dependence matrix R of a model's null: pairwise
// blocks of lambda(offdiag) for A and B, a tridiagonal band of 1/2 for
// C and D.
SymMatrix model_tail_dependence(Model m, std::size_t p, double offdiag = 0.7);

}  // namespace evt
