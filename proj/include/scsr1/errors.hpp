#pragma once

#include <stdexcept>
#include <string>

namespace scsr1 {

/// Malformed arguments: dimension mismatch, non-finite data, delta <= 0.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Cholesky hit a pivot below the rank tolerance. `pivot()` is the 0-based
/// position of the failing pivot.
class RankDeficient : public std::runtime_error {
 public:
  explicit RankDeficient(int pivot)
      : std::runtime_error("rank-deficient matrix at pivot " +
                           std::to_string(pivot)),
        pivot_(pivot) {}
  int pivot() const noexcept { return pivot_; }

 private:
  int pivot_;
};

class SingularMatrix : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The middle matrix of the compact representation does not exist.
class CompactUndefined : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConvergenceFailure : public std::runtime_error {
 public:
  ConvergenceFailure(const std::string& what, double last_iterate)
      : std::runtime_error(what), last_iterate_(last_iterate) {}
  double last_iterate() const noexcept { return last_iterate_; }

 private:
  double last_iterate_;
};

class GenerationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace scsr1
