#pragma once

#include <stdexcept>
#include <string>

namespace sepfactory {

enum class ErrorCode {
  NotHermitian,
  NoConvergence,
  NotPSD,
  DimensionMismatch,
  NonFinite,
  ZeroTrace,
  ZeroOperator,
  RangeMismatch,
  PreconditionFailed,
  NotCommuting,
  NotSemiSsppt,
  Unsolvable,
  ConditionFailed,
  NormalityFailed,
  DegenerateDraw,
  NotContraction,
  Format,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::ZeroTrace: return "ZeroTrace";
    case ErrorCode::ZeroOperator: return "ZeroOperator";
    case ErrorCode::RangeMismatch: return "RangeMismatch";
    case ErrorCode::PreconditionFailed: return "PreconditionFailed";
    case ErrorCode::NotCommuting: return "NotCommuting";
    case ErrorCode::NotSemiSsppt: return "NotSemiSsppt";
    case ErrorCode::Unsolvable: return "Unsolvable";
    case ErrorCode::ConditionFailed: return "ConditionFailed";
    case ErrorCode::NormalityFailed: return "NormalityFailed";
    case ErrorCode::DegenerateDraw: return "DegenerateDraw";
    case ErrorCode::NotContraction: return "NotContraction";
    case ErrorCode::Format: return "Format";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised when row i of a block-triangular factor cannot be written as
/// S_ij * U_ii. Indices are 1-based, matching the operator-matrix notation.
class RangeMismatch : public Error {
 public:
  RangeMismatch(int row, int col, double residual)
      : Error(ErrorCode::RangeMismatch,
              "block (" + std::to_string(row) + "," + std::to_string(col) +
                  ") is not in the range of its diagonal block (residual " +
                  std::to_string(residual) + ")"),
        row_(row),
        col_(col),
        residual_(residual) {}

  int row() const noexcept { return row_; }
  int col() const noexcept { return col_; }
  double residual() const noexcept { return residual_; }

 private:
  int row_;
  int col_;
  double residual_;
};

}  // namespace sepfactory
