#include "internal.hpp"

#include <cmath>

namespace dfo {

using detail::add_decisions;
using detail::add_member;
using detail::add_scenario_epigraph;

namespace {

const IntervalPolyhedral& interval_set(const DFOProblem& problem) {
  const auto* s = std::get_if<IntervalPolyhedral>(&problem.ambiguity);
  if (!s) throw CompileError(CompileError::Code::WrongRoute, "Cor 4.6", "this route needs an interval polyhedral set");
  return *s;
}

}  // namespace

namespace detail {

// p0 = e/N, lbar/q = -1/N and a common positive ubar.
bool interval_uniform(const IntervalPolyhedral& s) {
  const int N = static_cast<int>(s.p0.size());
  for (int i = 0; i < N; ++i) {
    if (std::abs(s.p0(i) - 1.0 / N) > 1e-12) return false;
    if (static_cast<long long>(s.lbar(i)) * N != -static_cast<long long>(s.q)) return false;
    if (s.ubar(i) != s.ubar(0)) return false;
  }
  return N > 0 && s.ubar(0) > 0;
}

IntervalPlan plan_interval(const DFOProblem& problem) {
  const auto& set = interval_set(problem);
  const int N = static_cast<int>(set.scenarios.size());
  const double q = set.q;
  ScenarioBounds bounds = scenario_value_bounds(problem, set.scenarios);
  IntervalPlan plan;
  const bool uniform = interval_uniform(set);
  plan.citation = uniform ? "Cor 4.7" : "Cor 4.6";

  long long floor_kappa = 0;
  double kappa = 0.0;
  if (uniform) {
    const long long num = static_cast<long long>(N) * set.q;
    const long long den = static_cast<long long>(set.ubar(0)) * N + set.q;
    floor_kappa = num / den;
    kappa = static_cast<double>(num) / static_cast<double>(den);
    plan.notes["kappa"] = kappa;
    plan.notes["floor_kappa"] = static_cast<double>(floor_kappa);
  }

  auto start = [&](int j, const std::string& label, std::vector<int>& z, std::vector<int>& eta) {
    IntervalMember m;
    m.label = label;
    ProgramBuilder& b = m.builder;
    auto x = add_decisions(b, problem.decisions);
    b.cite(plan.citation);
    for (int i = 0; i < N; ++i) {
      const std::string tag = "j" + std::to_string(j) + "s" + std::to_string(i);
      int nu = b.add_var("nu" + std::to_string(i), bounds.lower(i), bounds.upper(i));
      m.nu.push_back(nu);
      add_scenario_epigraph(b, problem, x, set.scenarios[i], nu, bounds.lower(i), plan.ledger, tag);
    }
    z.assign(N, -1);
    eta.assign(N, -1);
    for (int i = 0; i < N; ++i) {
      if (i == j) continue;
      z[i] = b.add_var("z" + std::to_string(i), 0.0, 1.0, true);
      eta[i] = b.add_var("eta" + std::to_string(i), std::min(0.0, bounds.lower(i)), std::max(0.0, bounds.upper(i)));
      b.cite("Def 2.3");
      build_mccormick(b, 0.0, 1.0, bounds.lower(i), bounds.upper(i), eta[i], z[i], b(m.nu[i]));
      b.cite(plan.citation);
    }
    return m;
  };

  for (int j = 0; j < N; ++j) {
    if (uniform) {
      std::vector<int> z, eta;
      IntervalMember m = start(j, "j=" + std::to_string(j), z, eta);
      ProgramBuilder& b = m.builder;
      LinExpr card;
      for (int i = 0; i < N; ++i) {
        if (i != j) card += b(z[i]);
      }
      b.add_eq(card, static_cast<double>(floor_kappa), "card");
      const double cap = static_cast<double>(set.ubar(0)) / q + 1.0 / N;
      for (int i = 0; i < N; ++i) {
        if (i != j) m.objective += cap * b(eta[i]);
      }
      m.objective += (1.0 - static_cast<double>(floor_kappa) / kappa) * b(m.nu[j]);
      plan.members.push_back(std::move(m));
      continue;
    }
    for (int tau = set.lbar(j); tau <= set.ubar(j); ++tau) {
      std::vector<int> z, eta;
      IntervalMember m = start(j, "j=" + std::to_string(j) + ",tau=" + std::to_string(tau), z, eta);
      ProgramBuilder& b = m.builder;
      LinExpr card;
      for (int i = 0; i < N; ++i) {
        if (i == j) continue;
        card -= LinExpr(static_cast<double>(set.lbar(i))) + static_cast<double>(set.ubar(i) - set.lbar(i)) * b(z[i]);
      }
      b.add_eq(card, static_cast<double>(tau), "card");
      for (int i = 0; i < N; ++i) {
        if (i == j) continue;
        const double base = set.p0(i) + set.lbar(i) / q;
        if (base != 0.0) m.objective += base * b(m.nu[i]);
        const double span = (set.ubar(i) - set.lbar(i)) / q;
        if (span != 0.0) m.objective += span * b(eta[i]);
      }
      m.objective += (set.p0(j) + tau / q) * b(m.nu[j]);
      plan.members.push_back(std::move(m));
    }
  }
  return plan;
}

}  // namespace detail

CompiledProgram compile_interval_polyhedral(const DFOProblem& problem) {
  detail::IntervalPlan plan = detail::plan_interval(problem);
  CompiledProgram out;
  out.kind = CompiledProgram::Kind::Batch;
  out.num_decisions = problem.n();
  out.citation = plan.citation;
  out.big_m = plan.ledger;
  out.notes = plan.notes;
  for (auto& m : plan.members) {
    m.builder.set_objective(m.objective);
    add_member(out, m.builder, m.label);
  }
  return out;
}

}  // namespace dfo
