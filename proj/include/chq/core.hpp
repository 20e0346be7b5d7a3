// Common types, tolerances and error reporting for the consistent-histories engine.
#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace chq {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Which off-diagonal part of the decoherence functional must vanish.
enum class Consistency {
  Medium,  ///< Re D(h_i, h_j) = 0
  Strong,  ///< D(h_i, h_j) = 0
};

inline std::string_view to_string(Consistency c) {
  return c == Consistency::Medium ? "medium" : "strong";
}

struct Tolerances {
  double eps = 1e-10;    // invariant checks (hermiticity, idempotence, unitarity, membership)
  double eps_c = 1e-9;   // consistency residuals
  Consistency condition = Consistency::Medium;
};

enum class Errc {
  NotNormalized,
  NotAProjector,
  NotUnitary,
  SpaceMismatch,
  MixedKinds,
  NonOrthonormalInputs,
  NonOrthonormalOutputs,
  TooManyVectors,
  DynamicsMismatch,
  InvalidHistory,
  NotExhaustive,
  NonOrthogonal,
  NonCommutingSlot,
  Inconsistent,
  UnknownTime,
  UnknownLabel,
  ParseError,
  InvalidArgument,
};

inline std::string_view to_string(Errc e) {
  switch (e) {
    case Errc::NotNormalized: return "NotNormalized";
    case Errc::NotAProjector: return "NotAProjector";
    case Errc::NotUnitary: return "NotUnitary";
    case Errc::SpaceMismatch: return "SpaceMismatch";
    case Errc::MixedKinds: return "MixedKinds";
    case Errc::NonOrthonormalInputs: return "NonOrthonormalInputs";
    case Errc::NonOrthonormalOutputs: return "NonOrthonormalOutputs";
    case Errc::TooManyVectors: return "TooManyVectors";
    case Errc::DynamicsMismatch: return "DynamicsMismatch";
    case Errc::InvalidHistory: return "InvalidHistory";
    case Errc::NotExhaustive: return "NotExhaustive";
    case Errc::NonOrthogonal: return "NonOrthogonal";
    case Errc::NonCommutingSlot: return "NonCommutingSlot";
    case Errc::Inconsistent: return "Inconsistent";
    case Errc::UnknownTime: return "UnknownTime";
    case Errc::UnknownLabel: return "UnknownLabel";
    case Errc::ParseError: return "ParseError";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Syntax error in a scenario file or event expression; line/column are 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t line, std::size_t column)
      : Error(Errc::ParseError, "line " + std::to_string(line) + ", column " +
                                    std::to_string(column) + ": " + msg),
        line_(line),
        column_(column),
        message_(msg) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  const std::string& message() const noexcept { return message_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string message_;
};

inline double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double max_abs(const Vector& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

}  // namespace chq
