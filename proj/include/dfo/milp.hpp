#pragma once

#include "dfo/common.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace dfo {

/// Minimization program over bounded variables:
///   min c'x + offset  s.t.  rows_i x (sense_i) rhs_i,  lower <= x <= upper,
/// with an integrality mask.
struct LinearProgram {
  VectorXd objective;
  double objective_offset = 0.0;
  MatrixXd rows;
  std::vector<RowSense> senses;
  VectorXd rhs;
  VectorXd lower;
  VectorXd upper;
  std::vector<bool> integer;
  std::vector<std::string> var_names;
  std::vector<std::string> row_names;

  int num_vars() const { return static_cast<int>(objective.size()); }
  int num_rows() const { return static_cast<int>(rhs.size()); }
  bool has_integers() const;
  /// Throws std::invalid_argument on inconsistent dimensions or infinite
  /// bounds on integer variables.
  void check() const;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, NodeLimit, TimeLimit };

const char* to_string(SolveStatus status);

struct Solution {
  SolveStatus status = SolveStatus::Infeasible;
  VectorXd x;
  double objective = kInf;
  double bound = -kInf;
  VectorXd duals;  // one per row, LP only
  long nodes = 0;
  long iterations = 0;

  bool ok() const { return status == SolveStatus::Optimal; }
};

struct SolverConfig {
  double feas_tol = 1e-9;
  double opt_tol = 1e-9;
  double int_tol = 1e-6;
  double gap_tol = 1e-6;
  long node_limit = 1'000'000;
  double time_limit_s = kInf;
  int workers = 1;
};

Solution solve_lp(const LinearProgram& lp, const SolverConfig& config = {});

Solution solve_milp(const LinearProgram& milp, const SolverConfig& config = {});

/// solve_lp or solve_milp depending on the integrality mask.
Solution solve(const LinearProgram& program, const SolverConfig& config = {});

struct BatchResult {
  Solution best;
  int argmin = -1;
  std::vector<Solution> members;
  std::vector<int> excluded;  // infeasible members treated as +inf
  bool warning() const { return !excluded.empty(); }
};

class AllMembersFailed : public Error {
 public:
  AllMembersFailed(int failing_index, const std::string& message)
      : Error(message), failing_index_(failing_index) {}
  int failing_index() const { return failing_index_; }

 private:
  int failing_index_;
};

/// Min-reduction over independent members with lowest-index ties.
BatchResult solve_batch(const std::vector<LinearProgram>& batch, const SolverConfig& config = {});

/// Maximum violation of rows, bounds and integrality at x.
double primal_residual(const LinearProgram& lp, const VectorXd& x, bool integrality = true);

/// Fixed-format MPS. Names longer than eight characters must be mangled by
/// the caller; see io.hpp.
void write_mps_raw(std::ostream& out, const LinearProgram& lp, const std::string& name);
LinearProgram read_mps(std::istream& in);

}  // namespace dfo
