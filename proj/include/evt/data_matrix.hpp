#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "evt/errors.hpp"

namespace evt {

// Column-major n x p matrix of observations: n rows (sample points),
// p columns (dimensions).  Column-major so per-dimension tail work gets
// contiguous memory.
class DataMatrix {
 public:
  DataMatrix() = default;

  DataMatrix(std::size_t n, std::size_t p) : n_(n), p_(p), data_(n * p, 0.0) {
    if (n == 0 || p == 0)
      throw parameter_error("data matrix dimensions must be positive");
  }

  std::size_t rows() const { return n_; }
  std::size_t cols() const { return p_; }

  double& at(std::size_t row, std::size_t col) { return data_[col * n_ + row]; }
  double at(std::size_t row, std::size_t col) const {
    return data_[col * n_ + row];
  }

  std::span<const double> column(std::size_t j) const {
    return {data_.data() + j * n_, n_};
  }
  std::span<double> column(std::size_t j) {
    return {data_.data() + j * n_, n_};
  }

  bool operator==(const DataMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::size_t p_ = 0;
  std::vector<double> data_;
};

}  // namespace evt
