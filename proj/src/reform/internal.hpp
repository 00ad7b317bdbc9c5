#pragma once

#include "dfo/reform.hpp"

#include <string>
#include <utility>
#include <vector>

namespace dfo::detail {

template <typename... Ts>
struct Overload : Ts... {
  using Ts::operator()...;
};
template <typename... Ts>
Overload(Ts...) -> Overload<Ts...>;

std::vector<int> add_decisions(ProgramBuilder& b, const DecisionSet& X);
LinExpr affine_expr(const AffineMap& map, int row, const std::vector<int>& x);
LinExpr piece_expr(const AffinePiece& piece, const VectorXd& xi, const std::vector<int>& x);
std::pair<VectorXd, VectorXd> box_bounds(const AffineMap& map, const DecisionSet& X);

void add_member(CompiledProgram& out, const ProgramBuilder& b, const std::string& label);

const PiecewiseAffineRecourse& piecewise(const DFOProblem& problem, const std::string& citation);

/// Adds v >= Q(x, xi). A finite lower bound of v is needed for concave
/// recourse, where the selection of the active piece uses big-M rows.
void add_scenario_epigraph(ProgramBuilder& b, const DFOProblem& problem, const std::vector<int>& x,
                           const VectorXd& xi, int v, double v_lower, BigMLedger& ledger, const std::string& tag);

/// Probability set {p >= 0 : D p <= d, e'p = 1}.
struct InnerPolytope {
  MatrixXd D;
  VectorXd d;
};

InnerPolytope interval_as_polytope(const IntervalPolyhedral& set);

/// Objective expression d'a + b of the dual of max_p v'p over the polytope.
LinExpr add_dro_block(ProgramBuilder& b, const std::vector<int>& v, const InnerPolytope& P);

/// Objective expression of the complementarity encoding of min_p v'p over the
/// finite polyhedral set; v must carry bounds [L, U].
LinExpr add_kkt_block(ProgramBuilder& b, const std::vector<int>& v, const FinitePolyhedral& set,
                      const ScenarioBounds& bounds, BigMLedger& ledger);

/// Convex piecewise recourse over balls of a common radius around each center,
/// averaged with the given weights.
CompiledProgram build_convex(const DFOProblem& problem, const std::vector<VectorXd>& centers, double radius,
                             Norm norm, const std::string& context);

/// Label of the convex route that build_convex would take, or the error it would raise.
struct ConvexRoute {
  enum class Kind { Constant, Shared, Block, None } kind = Kind::None;
  VerdictStatus status = VerdictStatus::Unknown;
  std::string citation;
  std::string detail;
  std::vector<double> block_norms;  // C_k for the block route with p = 1
};

ConvexRoute convex_route(const DFOProblem& problem, double radius, Norm norm);

Witness concave_witness(const DFOProblem& problem, const std::vector<VectorXd>& centers, double radius, Norm norm);
Witness convex_witness(const DFOProblem& problem, const VectorXd& center, double radius, Norm norm);
Witness l2_ball_witness(int N, double theta);

/// Interval member programs (one per (j, tau) or per j in the uniform case).
struct IntervalMember {
  ProgramBuilder builder;
  LinExpr objective;
  std::vector<int> nu;
  std::string label;
};

struct IntervalPlan {
  std::vector<IntervalMember> members;
  std::string citation;
  BigMLedger ledger;
  std::map<std::string, double> notes;
};

bool interval_uniform(const IntervalPolyhedral& set);
IntervalPlan plan_interval(const DFOProblem& problem);

}  // namespace dfo::detail
