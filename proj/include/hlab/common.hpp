#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace hlab {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr cplx kI{0.0, 1.0};

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A tensor or eigensolver would exceed the configured memory/size caps.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

/// A numerical diagnostic (drift, non-contraction, ...) tripped.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

/// Malformed or unreadable persisted data.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Size caps shared by all tensor-producing operations.
///
/// `max_elements` bounds the number of complex entries of any dense tensor
/// (wavefunctions and marginal kernels). `max_eigen_rows` bounds the matrix
/// dimension handed to the dense Hermitian eigensolver. The environment
/// variable HLAB_BUDGET, when set to a positive integer, replaces
/// `max_elements`.
struct Budget {
  std::size_t max_elements = std::size_t{1} << 24;
  std::size_t max_eigen_rows = 4096;

  static Budget current();
  /// Process-wide override; pass std::nullopt-like zero to restore defaults.
  static void set_override(std::size_t max_elements);

  void check_elements(std::size_t count, const std::string& what) const;
  void check_eigen_rows(std::size_t rows, const std::string& what) const;
};

/// Integer power with overflow detection (throws BudgetExceeded on overflow).
std::size_t checked_pow(std::size_t base, std::size_t exponent);

}  // namespace hlab
