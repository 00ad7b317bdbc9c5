#include "internal.hpp"

#include <algorithm>
#include <cmath>

namespace dfo {

using detail::add_decisions;
using detail::add_member;
using detail::affine_expr;

CompiledProgram compile_wasserstein(const DFOProblem& problem) {
  const auto* ws = std::get_if<WassersteinInf>(&problem.ambiguity);
  if (!ws) throw CompileError(CompileError::Code::WrongRoute, "Eq 17", "this route needs a Wasserstein ball");
  const auto& rec = detail::piecewise(problem, "Eq 17");
  const int m = rec.xi_dim();
  const int K = rec.num_pieces();
  const int N = static_cast<int>(ws->samples.size());
  const Norm p = effective_norm(ws->norm, m);
  const double theta = ws->radius;
  const DecisionSet& X = problem.decisions;

  if (rec.mode == RecourseMode::ConvexMax) {
    return detail::build_convex(problem, ws->samples, theta, ws->norm, " via Eq 19");
  }
  if (N == 1) {
    DFOProblem single = problem;
    single.ambiguity = SupportBall{ws->samples.front(), theta, ws->norm};
    try {
      CompiledProgram out = compile_concave_sdfo(single);
      out.citation += " via Eq 17";
      return out;
    } catch (const CompileError& e) {
      throw CompileError(e.code(), e.citation() + " via Eq 17", e.what());
    }
  }

  bool all_constant = true;
  for (const auto& piece : rec.pieces) all_constant = all_constant && piece.a.is_constant();
  if (theta > 0.0 && !all_constant && p.kind == Norm::Kind::Real) {
    throw CompileError(CompileError::Code::NotRepresentable, "Cor 4.3",
                       "p in (1, inf) with a decision-dependent uncertainty coefficient");
  }
  const Norm dual = p.dual();

  CompiledProgram out;
  out.kind = CompiledProgram::Kind::Single;
  out.num_decisions = X.dim();
  out.citation = "Thm 4.2";
  ProgramBuilder b;
  auto x = add_decisions(b, X);
  b.cite("Thm 4.2");

  std::vector<VectorXd> alo(K), ahi(K);
  std::vector<double> blo(K), bhi(K);
  for (int k = 0; k < K; ++k) {
    auto [l, u] = detail::box_bounds(rec.pieces[k].a, X);
    alo[k] = l;
    ahi[k] = u;
    auto [bl, bu] = detail::box_bounds(rec.pieces[k].b, X);
    blo[k] = bl(0);
    bhi[k] = bu(0);
  }

  // s = lambda * g as a variable, or a scaled binary when g is constant.
  auto product = [&](int lam, const AffineMap& map, int row, double lo, double hi, const std::string& name) -> LinExpr {
    if (map.row_is_constant(row)) return map.offset(row) * b(lam);
    int s = b.add_var(name, std::min({0.0, lo}), std::max({0.0, hi}));
    b.cite("Def 2.3");
    build_mccormick(b, 0.0, 1.0, lo, hi, s, lam, affine_expr(map, row, x));
    b.cite("Thm 4.2");
    return b(s);
  };

  LinExpr obj;
  const double w = 1.0 / N;
  for (int i = 0; i < N; ++i) {
    const VectorXd& zeta = ws->samples[i];
    LinExpr pick;
    for (int k = 0; k < K; ++k) {
      const std::string tag = "k" + std::to_string(k) + "i" + std::to_string(i);
      int lam = b.add_var("lam_" + tag, 0, 1, true);
      pick += b(lam);
      std::vector<LinExpr> sa(m);
      VectorXd slo(m), shi(m);
      for (int j = 0; j < m; ++j) {
        sa[j] = product(lam, rec.pieces[k].a, j, alo[k](j), ahi[k](j), "sa_" + tag + "_" + std::to_string(j));
        slo(j) = std::min(0.0, alo[k](j));
        shi(j) = std::max(0.0, ahi[k](j));
        if (zeta(j) != 0.0) obj += (w * zeta(j)) * sa[j];
      }
      obj += w * product(lam, rec.pieces[k].b, 0, blo[k], bhi[k], "sb_" + tag);
      if (theta == 0.0) continue;
      if (rec.pieces[k].a.is_constant()) {
        obj += (-w * theta * dual.value(rec.pieces[k].a.offset)) * b(lam);
      } else {
        int t = build_reverse_norm_epigraph(b, dual, sa, slo, shi, &out.big_m, "rn_" + tag);
        b.cite("Thm 4.2");
        obj += (w * theta) * b(t);
      }
    }
    b.add_eq(pick, 1.0, "assign" + std::to_string(i));
  }
  b.set_objective(obj);
  add_member(out, b, "single");
  return out;
}

}  // namespace dfo
