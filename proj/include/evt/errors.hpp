#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace evt {

// Base class for all library errors.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid argument to an operation (bad k, empty input, mismatched lengths).
class parameter_error : public error {
 public:
  using error::error;
};

// Malformed input data (CSV parse failures, bad matrix files).
class data_error : public error {
 public:
  using error::error;
};

// Input is syntactically valid but mathematically unusable
// (non-positive tail threshold, degenerate estimates).
class domain_error : public error {
 public:
  using error::error;
};

// A symmetric factorization failed; carries the offending pivot.
class singularity_error : public error {
 public:
  singularity_error(const std::string& msg, double smallest_pivot,
                    std::size_t pivot_index)
      : error(msg),
        smallest_pivot_(smallest_pivot),
        pivot_index_(pivot_index) {}

  double smallest_pivot() const { return smallest_pivot_; }
  std::size_t pivot_index() const { return pivot_index_; }

 private:
  double smallest_pivot_;
  std::size_t pivot_index_;
};

}  // namespace evt
