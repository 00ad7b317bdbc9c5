#include "internal.hpp"

#include <algorithm>
#include <cmath>

namespace dfo {

using detail::add_decisions;
using detail::add_member;
using detail::affine_expr;
using detail::piece_expr;

namespace {

const SupportBall& support_ball(const DFOProblem& problem, const std::string& citation) {
  const auto* s = std::get_if<SupportBall>(&problem.ambiguity);
  if (!s) throw CompileError(CompileError::Code::WrongRoute, citation, "this route needs a support ball");
  return *s;
}

bool maps_equal(const AffineMap& a, const AffineMap& b) {
  return a.matrix.rows() == b.matrix.rows() && a.matrix.cols() == b.matrix.cols() && a.matrix == b.matrix &&
         a.offset == b.offset;
}

// Dual-norm term of a piece: u_i >= |w_i| with sum for L1, t >= |w_i| for L-inf.
// Returns the expression equal at optimum to ||w||.
LinExpr add_norm_upper(ProgramBuilder& b, Norm norm, const std::vector<LinExpr>& w, const std::string& tag) {
  LinExpr out;
  if (w.empty()) return out;
  if (norm.kind == Norm::Kind::One) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      int u = b.add_var(tag + "_u" + std::to_string(i), 0.0, kInf);
      b.add_ge(b(u), w[i]);
      b.add_ge(b(u), -w[i]);
      out += b(u);
    }
  } else {
    int t = b.add_var(tag + "_t", 0.0, kInf);
    for (const auto& wi : w) {
      b.add_ge(b(t), wi);
      b.add_ge(b(t), -wi);
    }
    out = b(t);
  }
  return out;
}

}  // namespace

CompiledProgram compile_concave_sdfo(const DFOProblem& problem) {
  const auto& ball = support_ball(problem, "Eq 7");
  const auto& rec = detail::piecewise(problem, "Eq 7");
  if (rec.mode != RecourseMode::ConcaveMin) {
    throw CompileError(CompileError::Code::WrongRoute, "Eq 7", "concave route needs ConcaveMin recourse");
  }
  const int m = rec.xi_dim();
  const int K = rec.num_pieces();
  const Norm p = effective_norm(ball.norm, m);
  const Norm dual = p.dual();
  const double theta = ball.radius;
  const DecisionSet& X = problem.decisions;

  bool all_constant = true;
  for (const auto& piece : rec.pieces) all_constant = all_constant && piece.a.is_constant();

  CompiledProgram out;
  out.kind = CompiledProgram::Kind::Batch;
  out.num_decisions = X.dim();

  if (theta == 0.0 || all_constant) {
    out.citation = "Thm 3.1(i)";
    for (int k = 0; k < K; ++k) {
      ProgramBuilder b;
      auto x = add_decisions(b, X);
      double C = theta == 0.0 ? 0.0 : dual.value(rec.pieces[k].a.offset);
      b.set_objective(piece_expr(rec.pieces[k], ball.center, x) - theta * C);
      add_member(out, b, "k=" + std::to_string(k));
    }
    return out;
  }
  if (p.kind == Norm::Kind::Real) {
    throw CompileError(CompileError::Code::NotRepresentable, "Thm 3.3 case 2",
                       "p in (1, inf) with a decision-dependent uncertainty coefficient");
  }
  if (p.kind == Norm::Kind::One) {
    out.citation = "Thm 3.1(ii)";
    for (int k = 0; k < K; ++k) {
      for (int i = 0; i < m; ++i) {
        for (int sign : {1, -1}) {
          ProgramBuilder b;
          auto x = add_decisions(b, X);
          // -theta * sign * a_ki(x): the ball point xi0 - sign * theta * e_i.
          b.set_objective(piece_expr(rec.pieces[k], ball.center, x) - (sign * theta) * affine_expr(rec.pieces[k].a, i, x));
          add_member(out, b, "k=" + std::to_string(k) + ",i=" + std::to_string(i) + (sign > 0 ? ",-theta" : ",+theta"));
        }
      }
    }
    return out;
  }
  out.citation = "Thm 3.3 Cor";
  for (int k = 0; k < K; ++k) {
    ProgramBuilder b;
    auto x = add_decisions(b, X);
    const auto& a = rec.pieces[k].a;
    if (a.is_constant()) {
      b.set_objective(piece_expr(rec.pieces[k], ball.center, x) - theta * dual.value(a.offset));
    } else {
      b.cite("Thm 3.3 Cor");
      auto [lo, hi] = detail::box_bounds(a, X);
      std::vector<LinExpr> comps;
      for (int i = 0; i < m; ++i) comps.push_back(affine_expr(a, i, x));
      int t = build_reverse_norm_epigraph(b, dual, comps, lo, hi, &out.big_m, "k" + std::to_string(k));
      b.set_objective(piece_expr(rec.pieces[k], ball.center, x) + theta * b(t));
    }
    add_member(out, b, "k=" + std::to_string(k));
  }
  return out;
}

namespace detail {

ConvexRoute convex_route(const DFOProblem& problem, double radius, Norm norm) {
  const auto& rec = piecewise(problem, "Lemma 3.2");
  ConvexRoute route;
  const int m = rec.xi_dim();
  const Norm p = effective_norm(norm, m);
  bool all_constant = true;
  bool shared = true;
  for (const auto& piece : rec.pieces) {
    all_constant = all_constant && piece.a.is_constant();
    shared = shared && maps_equal(piece.a, rec.pieces.front().a);
  }
  if (radius == 0.0 || all_constant) {
    route.kind = ConvexRoute::Kind::Constant;
    if (p.kind == Norm::Kind::Real && radius > 0.0) {
      route.status = VerdictStatus::Unknown;
      route.citation = "Thm 3.4(i)";
      route.detail = "constant coefficients with p in (1, inf) need a conic program";
      return route;
    }
    route.status = VerdictStatus::Tractable;
    route.citation = "Thm 3.4(i)";
    route.detail = "decision-independent uncertainty coefficients";
    return route;
  }
  if (p.kind == Norm::Kind::Real) {
    route.status = VerdictStatus::NotMICPR;
    route.citation = "Prop 3.5";
    route.detail = "p in (1, inf) with a decision-dependent uncertainty coefficient";
    return route;
  }
  if (shared) {
    route.kind = ConvexRoute::Kind::Shared;
    route.status = p.kind == Norm::Kind::One ? VerdictStatus::Tractable : VerdictStatus::MICPR;
    route.citation = p.kind == Norm::Kind::One ? "Thm 3.4(ii)" : "Cor 3.6(i)";
    route.detail = "all pieces share the uncertainty coefficient map";
    return route;
  }
  if (rec.block_structure) {
    route.kind = ConvexRoute::Kind::Block;
    if (p.kind == Norm::Kind::Inf) {
      route.status = VerdictStatus::MICPR;
      route.citation = "Cor 3.6(ii)";
      route.detail = "disjoint block structure";
      return route;
    }
    // Constant block norm: either every row in the block is constant, or a
    // constant row dominates the interval bounds of all other rows.
    const auto& groups = *rec.block_structure;
    for (int k = 0; k < rec.num_pieces(); ++k) {
      const auto& a = rec.pieces[k].a;
      auto [lo, hi] = box_bounds(a, problem.decisions);
      double const_max = 0.0;
      double var_max = 0.0;
      bool any_var = false;
      for (int i : groups[k]) {
        if (a.row_is_constant(i)) {
          const_max = std::max(const_max, std::abs(a.offset(i)));
        } else {
          any_var = true;
          var_max = std::max({var_max, std::abs(lo(i)), std::abs(hi(i))});
        }
      }
      if (any_var && const_max < var_max) {
        route.kind = ConvexRoute::Kind::None;
        route.status = VerdictStatus::Unknown;
        route.citation = "Prop 3.4";
        route.detail = "p = 1 block structure without a constant block norm; NP-hard in general";
        route.block_norms.clear();
        return route;
      }
      route.block_norms.push_back(const_max);
    }
    route.status = VerdictStatus::Tractable;
    route.citation = "Thm 3.4(iii)";
    route.detail = "disjoint blocks with constant infinity-norm";
    return route;
  }
  route.kind = ConvexRoute::Kind::None;
  route.status = VerdictStatus::Unknown;
  route.citation = p.kind == Norm::Kind::One ? "Prop 3.4" : "Thm 3.6";
  route.detail = p.kind == Norm::Kind::One ? "p = 1 without a recognized structure; NP-hard in general"
                                           : "p = inf without shared maps or block structure";
  return route;
}

CompiledProgram build_convex(const DFOProblem& problem, const std::vector<VectorXd>& centers, double radius,
                             Norm norm, const std::string& context) {
  const auto& rec = piecewise(problem, "Lemma 3.2");
  const int m = rec.xi_dim();
  const int K = rec.num_pieces();
  const int S = static_cast<int>(centers.size());
  const double w = 1.0 / S;
  const Norm p = effective_norm(norm, m);
  const DecisionSet& X = problem.decisions;
  ConvexRoute route = convex_route(problem, radius, norm);

  CompiledProgram out;
  out.num_decisions = X.dim();
  out.citation = route.citation + context;
  auto refuse = [&](CompileError::Code code) { throw CompileError(code, route.citation, route.detail); };
  if (route.status == VerdictStatus::NotMICPR) refuse(CompileError::Code::NotRepresentable);
  if (route.status == VerdictStatus::Unknown) refuse(CompileError::Code::Unsupported);

  switch (route.kind) {
    case ConvexRoute::Kind::Constant: {
      out.kind = CompiledProgram::Kind::Single;
      ProgramBuilder b;
      auto x = add_decisions(b, X);
      b.cite(route.citation);
      LinExpr obj;
      for (int s = 0; s < S; ++s) {
        // Explicit uncertainty point in the ball around centers[s].
        std::vector<LinExpr> xi(m);
        if (radius == 0.0) {
          for (int i = 0; i < m; ++i) xi[i] = LinExpr(centers[s](i));
        } else if (p.kind == Norm::Kind::Inf) {
          for (int i = 0; i < m; ++i) {
            int v = b.add_var("xi" + std::to_string(s) + "_" + std::to_string(i), centers[s](i) - radius,
                              centers[s](i) + radius);
            xi[i] = b(v);
          }
        } else {
          LinExpr budget;
          for (int i = 0; i < m; ++i) {
            int up = b.add_var("xp" + std::to_string(s) + "_" + std::to_string(i), 0.0, kInf);
            int dn = b.add_var("xm" + std::to_string(s) + "_" + std::to_string(i), 0.0, kInf);
            xi[i] = LinExpr(centers[s](i)) + b(up) - b(dn);
            budget += b(up) + b(dn);
          }
          b.add_le(budget, radius, "budget" + std::to_string(s));
        }
        int eta = b.add_var("eta" + std::to_string(s), -kInf, kInf);
        for (int k = 0; k < K; ++k) {
          LinExpr row = affine_expr(rec.pieces[k].b, 0, x);
          for (int i = 0; i < m; ++i) row += rec.pieces[k].a.offset(i) * xi[i];
          b.add_ge(b(eta), row);
        }
        obj += w * b(eta);
      }
      b.set_objective(obj);
      add_member(out, b, "single");
      return out;
    }
    case ConvexRoute::Kind::Shared: {
      const AffineMap& a = rec.pieces.front().a;
      if (p.kind == Norm::Kind::One) {
        out.kind = CompiledProgram::Kind::Batch;
        for (int i = 0; i < m; ++i) {
          for (int sign : {1, -1}) {
            ProgramBuilder b;
            auto x = add_decisions(b, X);
            b.cite(route.citation);
            LinExpr obj = -(sign * radius) * affine_expr(a, i, x);
            for (int s = 0; s < S; ++s) {
              int eta = b.add_var("eta" + std::to_string(s), -kInf, kInf);
              for (int k = 0; k < K; ++k) b.add_ge(b(eta), piece_expr(rec.pieces[k], centers[s], x));
              obj += w * b(eta);
            }
            b.set_objective(obj);
            add_member(out, b, "i=" + std::to_string(i) + (sign > 0 ? ",-theta" : ",+theta"));
          }
        }
        return out;
      }
      out.kind = CompiledProgram::Kind::Single;
      ProgramBuilder b;
      auto x = add_decisions(b, X);
      b.cite(route.citation);
      auto [lo, hi] = detail::box_bounds(a, X);
      std::vector<LinExpr> comps;
      for (int i = 0; i < m; ++i) comps.push_back(affine_expr(a, i, x));
      int t = build_reverse_norm_epigraph(b, Norm::one(), comps, lo, hi, &out.big_m, "a");
      b.cite(route.citation);
      LinExpr obj;
      for (int s = 0; s < S; ++s) {
        int eta = b.add_var("eta" + std::to_string(s), -kInf, kInf);
        for (int k = 0; k < K; ++k) b.add_ge(b(eta), piece_expr(rec.pieces[k], centers[s], x) + radius * b(t));
        obj += w * b(eta);
      }
      b.set_objective(obj);
      add_member(out, b, "single");
      return out;
    }
    case ConvexRoute::Kind::Block: {
      const auto& groups = *rec.block_structure;
      out.kind = CompiledProgram::Kind::Single;
      ProgramBuilder b;
      auto x = add_decisions(b, X);
      b.cite(route.citation);
      LinExpr obj;
      if (p.kind == Norm::Kind::One) {
        for (int s = 0; s < S; ++s) {
          int beta = b.add_var("beta" + std::to_string(s), -kInf, kInf);
          LinExpr total;
          for (int k = 0; k < K; ++k) {
            int g = b.add_var("gamma" + std::to_string(s) + "_" + std::to_string(k), 0.0, kInf);
            total += b(g);
            b.add_ge(b(beta), piece_expr(rec.pieces[k], centers[s], x) - route.block_norms[k] * b(g));
          }
          b.add_eq(total, radius, "budget" + std::to_string(s));
          obj += w * b(beta);
        }
      } else {
        std::vector<LinExpr> tk(K);
        for (int k = 0; k < K; ++k) {
          const auto& a = rec.pieces[k].a;
          auto [lo, hi] = detail::box_bounds(a, X);
          std::vector<LinExpr> comps;
          VectorXd blo(groups[k].size()), bhi(groups[k].size());
          for (std::size_t r = 0; r < groups[k].size(); ++r) {
            comps.push_back(affine_expr(a, groups[k][r], x));
            blo(r) = lo(groups[k][r]);
            bhi(r) = hi(groups[k][r]);
          }
          if (comps.empty()) continue;
          int t = build_reverse_norm_epigraph(b, Norm::one(), comps, blo, bhi, &out.big_m, "blk" + std::to_string(k));
          tk[k] = b(t);
        }
        b.cite(route.citation);
        for (int s = 0; s < S; ++s) {
          int eta = b.add_var("eta" + std::to_string(s), -kInf, kInf);
          for (int k = 0; k < K; ++k) b.add_ge(b(eta), piece_expr(rec.pieces[k], centers[s], x) + radius * tk[k]);
          obj += w * b(eta);
        }
      }
      b.set_objective(obj);
      add_member(out, b, "single");
      return out;
    }
    case ConvexRoute::Kind::None:
      break;
  }
  refuse(CompileError::Code::Unsupported);
  return out;
}

}  // namespace detail

CompiledProgram compile_convex_sdfo(const DFOProblem& problem) {
  const auto& ball = support_ball(problem, "Lemma 3.2");
  const auto& rec = detail::piecewise(problem, "Lemma 3.2");
  if (rec.mode != RecourseMode::ConvexMax) {
    throw CompileError(CompileError::Code::WrongRoute, "Lemma 3.2", "convex route needs ConvexMax recourse");
  }
  return detail::build_convex(problem, {ball.center}, ball.radius, ball.norm, "");
}

double dual_inner_value_convex(const DFOProblem& problem, const VectorXd& x) {
  const auto& ball = support_ball(problem, "Lemma 3.2");
  const auto& rec = detail::piecewise(problem, "Lemma 3.2");
  const int m = rec.xi_dim();
  const int K = rec.num_pieces();
  const Norm p = effective_norm(ball.norm, m);
  if (p.kind == Norm::Kind::Real) {
    throw CompileError(CompileError::Code::UnsupportedNorm, "Lemma 3.2", "dual value needs p in {1, inf}");
  }
  ProgramBuilder b;
  b.cite("Lemma 3.2");
  auto lam = b.add_vars("lambda", K, 0.0, kInf);
  LinExpr sum, value;
  std::vector<LinExpr> w(m);
  for (int k = 0; k < K; ++k) {
    VectorXd ak = rec.pieces[k].a(x);
    double ck = ball.center.dot(ak) + rec.pieces[k].b(x)(0);
    sum += b(lam[k]);
    value += ck * b(lam[k]);
    for (int i = 0; i < m; ++i) w[i] += ak(i) * b(lam[k]);
  }
  b.add_eq(sum, 1.0, "simplex");
  LinExpr norm = add_norm_upper(b, p.dual(), w, "nrm");
  b.set_objective(-(value - ball.radius * norm));
  Solution s = solve_lp(b.build());
  if (!s.ok()) throw NumericalError("dual_inner_value_convex: LP not solved");
  return -s.objective;
}

}  // namespace dfo
