#pragma once

#include "dfo/model.hpp"

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace dfo::oracle {

/// Vertices of {x : A x <= b, Aeq x = beq, lower <= x <= upper}.
struct VertexSet {
  std::vector<VectorXd> vertices;
  std::string source;
};

/// All basic feasible solutions over n-subsets of the inequality rows and
/// bound rows, deduplicated at 1e-7. Throws CapExceeded above cap vertices.
VertexSet enumerate_vertices(const MatrixXd& A, const VectorXd& b, const MatrixXd& Aeq, const VectorXd& beq,
                             const VectorXd& lower, const VectorXd& upper, std::size_t cap = 20000);

struct OracleOptions {
  int grid_points = 21;
  std::size_t vertex_cap = 20000;
};

struct OracleValue {
  double value = 0.0;
  bool exact = true;
  std::string route;
  double resolution = 0.0;  // grid spacing for approximate routes
};

/// Ground truth by enumeration. Hurwicz problems combine the favorable and
/// robust inner values. Throws Error when no brute-force route applies.
OracleValue oracle_value(const DFOProblem& problem, const OracleOptions& options = {});

class InfeasibleWeights : public Error {
 public:
  using Error::Error;
};

struct GreedyResult {
  double value = 0.0;
  VectorXd weights;
};

/// min_p values'p over {p0 + psi : l <= psi <= u, e'psi = 0} by filling the
/// cheapest scenarios up to their caps.
GreedyResult greedy_interval_inf(const VectorXd& values, const VectorXd& p0, const VectorXd& l, const VectorXd& u);

/// True iff there are at least three points, all members, pairwise distinct,
/// and every pairwise midpoint is a non-member.
bool check_midpoint_certificate(const std::function<bool(const VectorXd&)>& membership,
                                const std::vector<VectorXd>& points);

struct SetPartition {
  VectorXd w;
};

/// max ||x||_{p*} over {D x <= d} intersected with the box [-bound, bound]^n.
struct NormMax {
  MatrixXd D;
  VectorXd d;
  Norm p;
  double bound = 10.0;
};

/// Is there x in {-1, 1}^n with D x <= d? D has n columns.
struct BinaryFeasibility {
  MatrixXd D;
  VectorXd d;
};

using HardnessKind = std::variant<SetPartition, NormMax, BinaryFeasibility>;

struct HardnessInstance {
  DFOProblem problem;
  std::optional<double> threshold;  // optimal value on yes-instances
  std::string description;
};

HardnessInstance gen_hardness_instance(const HardnessKind& kind);

}  // namespace dfo::oracle
