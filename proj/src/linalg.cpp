#include "evt/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace evt {

SymMatrix SymMatrix::identity(std::size_t dim) {
  SymMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m.at(i, i) = 1.0;
  return m;
}

Cholesky cholesky_factor(const SymMatrix& m, double ridge, double pivot_tol) {
  const std::size_t p = m.p;
  if (p == 0) throw parameter_error("cannot factor an empty matrix");
  if (ridge < 0.0) throw parameter_error("ridge must be nonnegative");

  Cholesky f;
  f.p = p;
  f.lower.assign(p * p, 0.0);
  f.smallest_pivot = std::numeric_limits<double>::infinity();

  auto l = [&](std::size_t i, std::size_t j) -> double& {
    return f.lower[i * p + j];
  };

  for (std::size_t j = 0; j < p; ++j) {
    double diag = m.at(j, j) + ridge;
    for (std::size_t t = 0; t < j; ++t) diag -= l(j, t) * l(j, t);
    f.smallest_pivot = std::min(f.smallest_pivot, diag);
    if (!(diag > pivot_tol))
      throw singularity_error(
          "matrix is not positive definite: pivot " + std::to_string(diag) +
              " at index " + std::to_string(j) +
              (ridge > 0.0 ? " (ridge " + std::to_string(ridge) + ")" : ""),
          diag, j);
    const double root = std::sqrt(diag);
    l(j, j) = root;
    for (std::size_t i = j + 1; i < p; ++i) {
      double sum = m.at(i, j);
      for (std::size_t t = 0; t < j; ++t) sum -= l(i, t) * l(j, t);
      l(i, j) = sum / root;
    }
  }
  return f;
}

std::vector<double> Cholesky::solve(std::span<const double> b) const {
  if (b.size() != p)
    throw parameter_error("right-hand side length " + std::to_string(b.size()) +
                          " does not match dimension " + std::to_string(p));
  std::vector<double> x(b.begin(), b.end());
  // Forward substitution L y = b.
  for (std::size_t i = 0; i < p; ++i) {
    double sum = x[i];
    for (std::size_t t = 0; t < i; ++t) sum -= lower[i * p + t] * x[t];
    x[i] = sum / lower[i * p + i];
  }
  // Back substitution L^T x = y.
  for (std::size_t ii = p; ii-- > 0;) {
    double sum = x[ii];
    for (std::size_t t = ii + 1; t < p; ++t) sum -= lower[t * p + ii] * x[t];
    x[ii] = sum / lower[ii * p + ii];
  }
  return x;
}

double inverse_quadratic_form(const SymMatrix& m, std::span<const double> b,
                              double ridge) {
  const Cholesky f = cholesky_factor(m, ridge);
  const std::vector<double> x = f.solve(b);
  double q = 0.0;
  for (std::size_t i = 0; i < m.p; ++i) q += b[i] * x[i];
  return q;
}

SymMatrix cholesky_inverse(const Cholesky& factor) {
  const std::size_t p = factor.p;
  SymMatrix inv(p);
  std::vector<double> e(p, 0.0);
  for (std::size_t j = 0; j < p; ++j) {
    e[j] = 1.0;
    const std::vector<double> col = factor.solve(e);
    e[j] = 0.0;
    for (std::size_t i = 0; i < p; ++i) inv.at(i, j) = col[i];
  }
  // Symmetrize away substitution round-off.
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j) {
      const double avg = 0.5 * (inv.at(i, j) + inv.at(j, i));
      inv.at(i, j) = avg;
      inv.at(j, i) = avg;
    }
  return inv;
}

}  // namespace evt
