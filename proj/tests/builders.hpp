#pragma once

#include "dfo/model.hpp"

#include <initializer_list>
#include <vector>

namespace dfo::test {

inline VectorXd vec(std::initializer_list<double> v) {
  VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

inline MatrixXd mat(std::initializer_list<std::initializer_list<double>> rows, Eigen::Index cols = -1) {
  const Eigen::Index r = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index c = r > 0 ? static_cast<Eigen::Index>(rows.begin()->size()) : (cols < 0 ? 0 : cols);
  MatrixXd out(r, c);
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (double x : row) out(i, j++) = x;
    ++i;
  }
  return out;
}

inline DecisionSet box(int n, double l, double u) {
  return DecisionSet::box(VectorXd::Constant(n, l), VectorXd::Constant(n, u));
}

/// a(x) = A x + a0, b(x) = B x + b0.
inline AffinePiece piece(const MatrixXd& A, const VectorXd& a0, const MatrixXd& B, double b0) {
  return {AffineMap(A, a0), AffineMap(B, VectorXd::Constant(1, b0))};
}

/// Constant a-map value a0 and constant b0 over n decisions.
inline AffinePiece const_piece(const VectorXd& a0, double b0, int n) {
  return piece(MatrixXd::Zero(a0.size(), n), a0, MatrixXd::Zero(1, n), b0);
}

inline PiecewiseAffineRecourse recourse(std::vector<AffinePiece> pieces, RecourseMode mode) {
  PiecewiseAffineRecourse r;
  r.pieces = std::move(pieces);
  r.mode = mode;
  return r;
}

inline std::vector<VectorXd> scalars(std::initializer_list<double> v) {
  std::vector<VectorXd> out;
  for (double x : v) out.push_back(VectorXd::Constant(1, x));
  return out;
}

/// Q(x, xi) = xi over one decision in [0, 1], scenarios carry the values.
inline DFOProblem value_problem(AmbiguitySet set) {
  DFOProblem p;
  p.decisions = box(1, 0.0, 1.0);
  p.recourse = recourse({const_piece(vec({1.0}), 0.0, 1)}, RecourseMode::ConcaveMin);
  p.ambiguity = std::move(set);
  return p;
}

inline FinitePolyhedral finite(std::vector<VectorXd> scenarios, const MatrixXd& D, const VectorXd& d) {
  FinitePolyhedral s;
  s.scenarios = std::move(scenarios);
  s.D = D;
  s.d = d;
  return s;
}

inline FinitePolyhedral simplex(std::vector<VectorXd> scenarios) {
  const auto N = static_cast<Eigen::Index>(scenarios.size());
  return finite(std::move(scenarios), MatrixXd::Zero(0, N), VectorXd::Zero(0));
}

/// p0 = e/N, lbar = -q/N, ubar = ubar_common.
inline IntervalPolyhedral uniform_interval(std::vector<VectorXd> scenarios, int q, int ubar) {
  const int N = static_cast<int>(scenarios.size());
  IntervalPolyhedral s;
  s.scenarios = std::move(scenarios);
  s.p0 = VectorXd::Constant(N, 1.0 / N);
  s.lbar = Eigen::VectorXi::Constant(N, -q / N);
  s.ubar = Eigen::VectorXi::Constant(N, ubar);
  s.q = q;
  return s;
}

}  // namespace dfo::test
