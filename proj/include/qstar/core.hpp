#pragma once

// Scalar and matrix aliases, tolerance policy and the error type shared by
// every qstar module.

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qstar {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr cplx I_unit{0.0, 1.0};

/// Numerical thresholds. All values are relative to a natural scale of the
/// quantity being tested (top eigenvalue, Frobenius norm, right-hand side).
struct Tolerances {
  double psd = 1e-8;         // min eigenvalue >= -psd * top eigenvalue
  double rank = 1e-10;       // singular values above rank * sigma_max count
  double membership = 1e-9;  // span membership residual / ||element||_F
  double weak = 1e-8;        // weak-product residual / ||rhs||
  double cross_check = 1e-8; // agreement between independent norm routes
  double residual = 1e-9;    // axiom and invariance residuals
};

enum class ErrorKind {
  InvalidArgument,
  MissingUnit,
  DependentBasis,
  ClosureViolation,
  NotInA0,
  EmptyFamily,
  NotIps,
  ZeroForm,
  FamilyNotBalanced,
  NotSufficient,
  CharacterizationMismatch,
  NotWellDefined,
  AmbiguousProduct,
  BadExponent,
  BadMeasure,
  UnitRequired,
  ParseError,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::MissingUnit: return "MissingUnit";
    case ErrorKind::DependentBasis: return "DependentBasis";
    case ErrorKind::ClosureViolation: return "ClosureViolation";
    case ErrorKind::NotInA0: return "NotInA0";
    case ErrorKind::EmptyFamily: return "EmptyFamily";
    case ErrorKind::NotIps: return "NotIps";
    case ErrorKind::ZeroForm: return "ZeroForm";
    case ErrorKind::FamilyNotBalanced: return "FamilyNotBalanced";
    case ErrorKind::NotSufficient: return "NotSufficient";
    case ErrorKind::CharacterizationMismatch: return "CharacterizationMismatch";
    case ErrorKind::NotWellDefined: return "NotWellDefined";
    case ErrorKind::AmbiguousProduct: return "AmbiguousProduct";
    case ErrorKind::BadExponent: return "BadExponent";
    case ErrorKind::BadMeasure: return "BadMeasure";
    case ErrorKind::UnitRequired: return "UnitRequired";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

} // namespace qstar
