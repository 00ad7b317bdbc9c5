#include "dfo/common.hpp"

#include <sstream>

namespace dfo {

Norm Norm::real(double p) {
  if (p == 1.0) return one();
  if (std::isinf(p)) return inf();
  if (!(p > 1.0)) throw std::invalid_argument("norm exponent must be >= 1");
  return {Kind::Real, p};
}

Norm Norm::dual() const {
  switch (kind) {
    case Kind::One: return inf();
    case Kind::Inf: return one();
    case Kind::Real: return real(p / (p - 1.0));
  }
  return *this;
}

double Norm::value(const VectorXd& v) const {
  if (v.size() == 0) return 0.0;
  switch (kind) {
    case Kind::One: return v.lpNorm<1>();
    case Kind::Inf: return v.lpNorm<Eigen::Infinity>();
    case Kind::Real: {
      double s = 0.0;
      double mx = v.cwiseAbs().maxCoeff();
      if (mx == 0.0) return 0.0;
      for (double e : v) s += std::pow(std::abs(e) / mx, p);
      return mx * std::pow(s, 1.0 / p);
    }
  }
  return 0.0;
}

std::string Norm::label() const {
  switch (kind) {
    case Kind::One: return "1";
    case Kind::Inf: return "inf";
    case Kind::Real: {
      std::ostringstream os;
      os << p;
      return os.str();
    }
  }
  return "?";
}

const char* to_string(CompileError::Code code) {
  switch (code) {
    case CompileError::Code::NotRepresentable: return "NotRepresentable";
    case CompileError::Code::Unsupported: return "Unsupported";
    case CompileError::Code::UnsupportedNorm: return "UnsupportedNorm";
    case CompileError::Code::MissingBounds: return "MissingBounds";
    case CompileError::Code::MissingLambda: return "MissingLambda";
    case CompileError::Code::VertexCapExceeded: return "VertexCapExceeded";
    case CompileError::Code::DegenerateBounds: return "DegenerateBounds";
    case CompileError::Code::WrongRoute: return "WrongRoute";
  }
  return "?";
}

}  // namespace dfo
