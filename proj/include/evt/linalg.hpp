#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "evt/errors.hpp"

namespace evt {

// Dense symmetric p x p matrix, row-major full storage.
struct SymMatrix {
  std::size_t p = 0;
  std::vector<double> a;  // p * p entries

  SymMatrix() = default;
  explicit SymMatrix(std::size_t dim) : p(dim), a(dim * dim, 0.0) {}

  double& at(std::size_t i, std::size_t j) { return a[i * p + j]; }
  double at(std::size_t i, std::size_t j) const { return a[i * p + j]; }

  static SymMatrix identity(std::size_t dim);
};

// Lower-triangular Cholesky factor with the smallest pivot seen, for
// conditioning diagnostics.
struct Cholesky {
  std::size_t p = 0;
  std::vector<double> lower;  // row-major, upper part unused
  double smallest_pivot = 0.0;

  // Solves L L^T x = b.
  std::vector<double> solve(std::span<const double> b) const;
};

// Factors A (+ ridge on the diagonal when ridge > 0).  Throws
// singularity_error, naming the pivot value and index, when a pivot
// falls to pivot_tol or below.
Cholesky cholesky_factor(const SymMatrix& m, double ridge = 0.0,
                         double pivot_tol = 1e-10);

// b^T A^{-1} b via one factorization and solve.
double inverse_quadratic_form(const SymMatrix& m, std::span<const double> b,
                              double ridge = 0.0);

// Explicit inverse; only used where a whole precision matrix is needed.
SymMatrix cholesky_inverse(const Cholesky& factor);

}  // namespace evt
