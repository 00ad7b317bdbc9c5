#pragma once

#include "dfo/milp.hpp"
#include "dfo/model.hpp"
#include "dfo/program.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dfo {

enum class VerdictStatus { Tractable, MICPR, NotMICPR, Unknown };

const char* to_string(VerdictStatus status);

/// Finite point set offered as evidence for a non-representability claim.
struct Witness {
  std::vector<VectorXd> points;
  std::function<bool(const VectorXd&)> membership;
  std::string description;
};

enum class Method { Auto, Enumerate, Kkt, Interval, Wasserstein, Sdfo };

std::optional<Method> parse_method(const std::string& text);
const char* to_string(Method method);

struct Verdict {
  VerdictStatus status = VerdictStatus::Unknown;
  std::string citation;
  std::string detail;
  std::optional<Witness> witness;
};

struct BigMEntry {
  std::string name;
  double value = 0.0;
  std::string formula;
  std::string citation;
};

struct BigMLedger {
  std::vector<BigMEntry> entries;
  void add(std::string name, double value, std::string formula, std::string citation);
  double max_value() const;
};

struct CompiledProgram {
  enum class Kind { Batch, Single };
  Kind kind = Kind::Single;
  std::vector<LinearProgram> programs;
  std::vector<std::vector<Provenance>> provenance;  // one list per program
  std::vector<std::string> labels;                  // one per program
  BigMLedger big_m;
  std::string citation;
  int num_decisions = 0;  // the first num_decisions variables of every program are x
  std::map<std::string, double> notes;
};

struct CompiledResult {
  SolveStatus status = SolveStatus::Infeasible;
  double value = kInf;
  VectorXd x;
  int argmin = 0;
  std::string label;
  std::vector<int> excluded;
};

CompiledResult solve_compiled(const CompiledProgram& compiled, const SolverConfig& config = {});

Verdict classify(const DFOProblem& problem);

/// Rows of the two-valued McCormick block tying s = lambda * gamma, where
/// lambda = lambda_l + (lambda_u - lambda_l) * binary.
void build_mccormick(ProgramBuilder& builder, double lambda_l, double lambda_u, double gamma_l, double gamma_u,
                     int s, int binary, const LinExpr& gamma);

/// Adds t with t >= -||components||_p for p in {1, inf}; components range
/// over [lower, upper]. Returns the id of t.
int build_reverse_norm_epigraph(ProgramBuilder& builder, Norm p, const std::vector<LinExpr>& components,
                                const VectorXd& lower, const VectorXd& upper, BigMLedger* ledger,
                                const std::string& tag);

/// Standalone block over (x, t) for x in the box [l, u]; minimizes t.
LinearProgram reverse_norm_epigraph_program(Norm p, const AffineMap& map, const VectorXd& l, const VectorXd& u);

CompiledProgram compile_concave_sdfo(const DFOProblem& problem);
CompiledProgram compile_convex_sdfo(const DFOProblem& problem);
double dual_inner_value_convex(const DFOProblem& problem, const VectorXd& x);
CompiledProgram compile_wasserstein(const DFOProblem& problem);
CompiledProgram compile_finite_enumeration(const DFOProblem& problem, std::size_t vertex_cap = 10000);
CompiledProgram compile_finite_kkt(const DFOProblem& problem);
CompiledProgram compile_interval_polyhedral(const DFOProblem& problem);
CompiledProgram compile_hurwicz(const DFOProblem& problem);

/// Worst case over the ambiguity set (finite or interval polyhedral).
CompiledProgram compile_dro(const DFOProblem& problem);
/// Nominal distribution: p0, uniform weights, the ball center, or the
/// Wasserstein samples at radius zero.
CompiledProgram compile_saa(const DFOProblem& problem);

/// Route selection; Auto prefers tractable batches over MILP routes.
CompiledProgram compile(const DFOProblem& problem, Method method = Method::Auto);

struct ScenarioBounds {
  VectorXd lower;
  VectorXd upper;
};

/// Lower and upper bounds of Q(x, xi) over X for each scenario.
ScenarioBounds scenario_value_bounds(const DFOProblem& problem, const std::vector<VectorXd>& scenarios);

/// Vertices of {p >= 0 : D p <= d, e'p = 1} via basic feasible solutions of
/// the standard form.
std::vector<VectorXd> ambiguity_vertices(const MatrixXd& D, const VectorXd& d, int N, std::size_t cap = 10000);

/// Norm actually used: with a one-dimensional uncertainty every p-norm is |.|.
Norm effective_norm(Norm p, int m);

}  // namespace dfo
