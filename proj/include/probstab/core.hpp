#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace probstab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class ErrorKind {
  SignMismatch,
  IndexOutOfRange,
  BudgetTooLarge,
  InvalidParameter,
  EmptyInput,
  UnsupportedVariant,
  DimensionMismatch,
  InvalidDims,
  NonpositiveC,
  AssumptionViolated,
  UnsupportedFilter,
  InstanceTooLarge,
  ParseError,
  InvariantViolation,
  IoError,
};

const char* to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` carries the failure class.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Sum of squared entries.
inline double frobenius_norm_sq(const Matrix& m) { return m.squaredNorm(); }

/// Frobenius inner product <A, B> = sum_ij A_ij B_ij.
inline double frobenius_inner(const Matrix& a, const Matrix& b) {
  return a.cwiseProduct(b).sum();
}

}  // namespace probstab
