#pragma once

#include <stdexcept>
#include <string>

namespace spinent {

/// Requested Hilbert space exceeds what the exact-diagonalization path can hold.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative solver stopped before meeting its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double best_residual)
      : std::runtime_error(what), best_residual_(best_residual) {}

  /// Residual (Lanczos) or last energy change (iDMRG) at the point of failure.
  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

/// Eigenvalue of a matrix that must be positive came out clearly negative.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace spinent
