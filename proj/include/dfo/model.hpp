#pragma once

#include "dfo/common.hpp"

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace dfo {

/// x -> matrix * x + offset.
template <typename Scalar>
struct AffineMapT {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Matrix matrix;
  Vector offset;

  AffineMapT() = default;
  AffineMapT(Matrix m, Vector o) : matrix(std::move(m)), offset(std::move(o)) {}

  static AffineMapT constant(const Vector& value, Eigen::Index n) {
    return AffineMapT(Matrix::Zero(value.size(), n), value);
  }

  Eigen::Index rows() const { return offset.size(); }
  Eigen::Index cols() const { return matrix.cols(); }

  template <typename Derived>
  Vector operator()(const Eigen::MatrixBase<Derived>& x) const {
    return matrix * x + offset;
  }

  bool row_is_constant(Eigen::Index i) const { return matrix.cols() == 0 || matrix.row(i).isZero(0); }
  bool is_constant() const { return matrix.size() == 0 || matrix.isZero(0); }
};

using AffineMap = AffineMapT<double>;

/// Componentwise interval hull of map([l, u]); tight on boxes.
template <typename Scalar>
std::pair<typename AffineMapT<Scalar>::Vector, typename AffineMapT<Scalar>::Vector> propagate_bounds(
    const AffineMapT<Scalar>& map, const typename AffineMapT<Scalar>::Vector& l,
    const typename AffineMapT<Scalar>::Vector& u) {
  using Vector = typename AffineMapT<Scalar>::Vector;
  Vector lo = map.offset;
  Vector hi = map.offset;
  for (Eigen::Index i = 0; i < map.rows(); ++i) {
    for (Eigen::Index j = 0; j < map.cols(); ++j) {
      Scalar a = map.matrix(i, j);
      if (a == Scalar(0)) continue;
      Scalar p = a * l(j), q = a * u(j);
      lo(i) += std::min(p, q);
      hi(i) += std::max(p, q);
    }
  }
  return {lo, hi};
}

/// X = {x : D_x x <= d_x, lower <= x <= upper}.
struct DecisionSet {
  MatrixXd ineq_matrix;
  VectorXd ineq_rhs;
  VectorXd lower;
  VectorXd upper;

  static DecisionSet box(const VectorXd& l, const VectorXd& u) {
    return {MatrixXd::Zero(0, l.size()), VectorXd::Zero(0), l, u};
  }
  int dim() const { return static_cast<int>(lower.size()); }
  bool contains(const VectorXd& x, double tol = 1e-7) const;
};

enum class RecourseMode { ConcaveMin, ConvexMax };

struct AffinePiece {
  AffineMap a;  // R^n -> R^m
  AffineMap b;  // R^n -> R
};

/// Q(x, xi) = min_k or max_k of xi' a_k(x) + b_k(x).
struct PiecewiseAffineRecourse {
  std::vector<AffinePiece> pieces;
  RecourseMode mode = RecourseMode::ConcaveMin;
  std::optional<std::vector<std::vector<int>>> block_structure;

  int num_pieces() const { return static_cast<int>(pieces.size()); }
  int xi_dim() const { return pieces.empty() ? 0 : static_cast<int>(pieces.front().a.rows()); }
  double piece_value(int k, const VectorXd& x, const VectorXd& xi) const;
  double value(const VectorXd& x, const VectorXd& xi) const;
};

/// Q(x, xi) = min cost'y s.t. W y + T_x x + T_xi xi (sense) rhs, y >= lower.
struct LPRecourse {
  VectorXd cost;
  MatrixXd recourse_matrix;
  MatrixXd tech_x;
  MatrixXd tech_xi;
  VectorXd rhs;
  std::vector<RowSense> senses;
  VectorXd lower;

  int num_second_stage() const { return static_cast<int>(cost.size()); }
  int num_rows() const { return static_cast<int>(rhs.size()); }
  int xi_dim() const { return static_cast<int>(tech_xi.cols()); }
};

using Recourse = std::variant<PiecewiseAffineRecourse, LPRecourse>;

struct SupportBall {
  VectorXd center;
  double radius = 0.0;
  Norm norm;
};

struct WassersteinInf {
  std::vector<VectorXd> samples;
  double radius = 0.0;
  Norm norm;
};

/// {p >= 0 : D p <= d, e'p = 1} over the listed scenarios. big_m is an optional
/// user bound on the dual multipliers and reduced costs of the inner LP.
struct FinitePolyhedral {
  std::vector<VectorXd> scenarios;
  MatrixXd D;
  VectorXd d;
  std::optional<double> big_m;
};

/// {p0 + psi/q : lbar <= psi <= ubar, e'psi = 0}.
struct IntervalPolyhedral {
  std::vector<VectorXd> scenarios;
  VectorXd p0;
  Eigen::VectorXi lbar;
  Eigen::VectorXi ubar;
  int q = 1;
};

/// {p >= 0 : e'p = 1, ||p - p0||_2 <= radius}.
struct L2Ball {
  std::vector<VectorXd> scenarios;
  VectorXd p0;
  double radius = 0.0;
};

using AmbiguitySet = std::variant<SupportBall, WassersteinInf, FinitePolyhedral, IntervalPolyhedral, L2Ball>;

struct DFOProblem {
  DecisionSet decisions;
  Recourse recourse;
  AmbiguitySet ambiguity;
  std::optional<double> hurwicz_lambda;

  int n() const { return decisions.dim(); }
  int xi_dim() const;
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

ValidationReport validate(const DFOProblem& problem);

/// Exact for piecewise recourse; LP optimum for LPRecourse.
/// Throws InfeasibleRecourse when the recourse LP is infeasible.
double evaluate_recourse(const Recourse& recourse, const VectorXd& x, const VectorXd& xi);
double evaluate_recourse(const DFOProblem& problem, const VectorXd& x, const VectorXd& xi);

/// Scenarios of a scenario-based ambiguity set; empty for ball-type sets.
const std::vector<VectorXd>* scenarios_of(const AmbiguitySet& set);

class CapExceeded : public Error {
 public:
  CapExceeded(std::size_t count, const std::string& message) : Error(message), count_(count) {}
  std::size_t count() const { return count_; }

 private:
  std::size_t count_;
};

/// Vertices of {x : A x <= b, Aeq x = beq, lower <= x <= upper} by enumerating
/// square active sets. Throws CapExceeded above max_vertices vertices or when
/// the number of candidate active sets exceeds max_candidates.
std::vector<VectorXd> enumerate_polytope_vertices(const MatrixXd& A, const VectorXd& b, const MatrixXd& Aeq,
                                                  const VectorXd& beq, const VectorXd& lower,
                                                  const VectorXd& upper, std::size_t max_vertices = 10000,
                                                  double max_candidates = 5e6);

/// Vertices of the decision polytope.
std::vector<VectorXd> decision_vertices(const DecisionSet& X, std::size_t cap = 10000);

}  // namespace dfo
