#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sbadmm {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Incompatible grid shapes, malformed kernels, degenerate grids.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Rejected parameter values (non-positive penalties, inconsistent cases).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// rho*lambda_i + eta*omega_i vanishes at some frequency.
class SingularHessianError : public Error {
 public:
  SingularHessianError(std::size_t freq_row, std::size_t freq_col, double value)
      : Error("singular Hessian at frequency (" + std::to_string(freq_row) +
              ", " + std::to_string(freq_col) + "): eigenvalue " +
              std::to_string(value)),
        freq_row_(freq_row),
        freq_col_(freq_col) {}

  std::size_t freq_row() const { return freq_row_; }
  std::size_t freq_col() const { return freq_col_; }

 private:
  std::size_t freq_row_;
  std::size_t freq_col_;
};

// Both Gram spectra vanish at a frequency; the split S = [A; C] loses rank.
class RankDeficiencyError : public Error {
 public:
  using Error::Error;
};

// Inner or outer iteration failure (CG breakdown, non-finite values,
// divergence guard).
class SolverError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace sbadmm
