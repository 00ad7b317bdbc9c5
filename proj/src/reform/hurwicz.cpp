#include "internal.hpp"

namespace dfo {

using detail::add_decisions;
using detail::add_member;
using detail::add_scenario_epigraph;

CompiledProgram compile_hurwicz(const DFOProblem& problem) {
  if (!problem.hurwicz_lambda) {
    throw CompileError(CompileError::Code::MissingLambda, "Eq 27", "Hurwicz route needs an optimism level");
  }
  const double lambda = *problem.hurwicz_lambda;
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw CompileError(CompileError::Code::MissingLambda, "Eq 27", "optimism level must lie in [0, 1]");
  }
  const bool finite = std::holds_alternative<FinitePolyhedral>(problem.ambiguity);
  const bool interval = std::holds_alternative<IntervalPolyhedral>(problem.ambiguity);
  if (!finite && !interval) {
    throw CompileError(CompileError::Code::WrongRoute, "Eq 27", "Hurwicz route needs a polyhedral ambiguity set");
  }
  if (lambda == 0.0) return compile_dro(problem);
  if (lambda == 1.0) return finite ? compile_finite_kkt(problem) : compile_interval_polyhedral(problem);

  CompiledProgram out;
  out.num_decisions = problem.n();
  out.citation = "Eq 27";
  out.notes["lambda"] = lambda;

  if (finite) {
    const auto& set = std::get<FinitePolyhedral>(problem.ambiguity);
    const int N = static_cast<int>(set.scenarios.size());
    ScenarioBounds bounds = scenario_value_bounds(problem, set.scenarios);
    out.kind = CompiledProgram::Kind::Single;
    ProgramBuilder b;
    auto x = add_decisions(b, problem.decisions);
    b.cite("Eq 27");
    std::vector<int> v;
    for (int i = 0; i < N; ++i) {
      v.push_back(b.add_var("v" + std::to_string(i), bounds.lower(i), bounds.upper(i)));
      add_scenario_epigraph(b, problem, x, set.scenarios[i], v[i], bounds.lower(i), out.big_m, "s" + std::to_string(i));
    }
    LinExpr favorable = detail::add_kkt_block(b, v, set, bounds, out.big_m);
    LinExpr robust = detail::add_dro_block(b, v, {set.D, set.d});
    b.set_objective(lambda * favorable + (1.0 - lambda) * robust);
    add_member(out, b, "single");
    return out;
  }

  const auto& set = std::get<IntervalPolyhedral>(problem.ambiguity);
  detail::IntervalPlan plan = detail::plan_interval(problem);
  const detail::InnerPolytope P = detail::interval_as_polytope(set);
  out.kind = CompiledProgram::Kind::Batch;
  out.big_m = plan.ledger;
  for (const auto& [k, value] : plan.notes) out.notes[k] = value;
  for (auto& m : plan.members) {
    LinExpr robust = detail::add_dro_block(m.builder, m.nu, P);
    m.builder.set_objective(lambda * m.objective + (1.0 - lambda) * robust);
    add_member(out, m.builder, m.label);
  }
  return out;
}

}  // namespace dfo
