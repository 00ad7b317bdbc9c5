#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace dfo {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Absolute 1e-6 or relative 1e-9, whichever is looser.
inline bool approx_equal(double a, double b, double abs_tol = 1e-6, double rel_tol = 1e-9) {
  if (a == b) return true;
  double diff = std::abs(a - b);
  return diff <= abs_tol || diff <= rel_tol * std::max(std::abs(a), std::abs(b));
}

enum class RowSense { LessEqual, Equal, GreaterEqual };

const char* to_string(RowSense sense);

/// Norm index p for the support ball. p = 1 and p = inf are tagged; anything
/// else is a real exponent strictly between them.
struct Norm {
  enum class Kind { One, Real, Inf };
  Kind kind = Kind::One;
  double p = 1.0;

  static Norm one() { return {Kind::One, 1.0}; }
  static Norm inf() { return {Kind::Inf, kInf}; }
  static Norm real(double p);

  bool is_polyhedral() const { return kind != Kind::Real; }
  Norm dual() const;
  double value(const VectorXd& v) const;
  std::string label() const;
  bool operator==(const Norm& o) const { return kind == o.kind && (kind != Kind::Real || p == o.p); }
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class InfeasibleRecourse : public Error {
 public:
  using Error::Error;
};

/// Raised by a compiler whose hypotheses fail; carries the reference label
/// that justifies the refusal.
class CompileError : public Error {
 public:
  enum class Code {
    NotRepresentable,
    Unsupported,
    UnsupportedNorm,
    MissingBounds,
    MissingLambda,
    VertexCapExceeded,
    DegenerateBounds,
    WrongRoute
  };
  CompileError(Code code, std::string citation, const std::string& message)
      : Error(message), code_(code), citation_(std::move(citation)) {}
  Code code() const { return code_; }
  const std::string& citation() const { return citation_; }

 private:
  Code code_;
  std::string citation_;
};

const char* to_string(CompileError::Code code);

}  // namespace dfo
