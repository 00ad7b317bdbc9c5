#include "internal.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dfo {

using detail::add_decisions;
using detail::add_member;
using detail::add_scenario_epigraph;
using detail::piece_expr;

namespace {

const FinitePolyhedral& finite_set(const DFOProblem& problem, const std::string& citation) {
  const auto* s = std::get_if<FinitePolyhedral>(&problem.ambiguity);
  if (!s) throw CompileError(CompileError::Code::WrongRoute, citation, "this route needs a finite polyhedral set");
  return *s;
}

bool concave_recourse(const DFOProblem& problem) {
  const auto* r = std::get_if<PiecewiseAffineRecourse>(&problem.recourse);
  return r && r->mode == RecourseMode::ConcaveMin && r->num_pieces() > 1;
}

// Lower bounds are only needed by the concave epigraph.
VectorXd epigraph_lower(const DFOProblem& problem, const std::vector<VectorXd>& scenarios) {
  if (!concave_recourse(problem)) return VectorXd::Constant(scenarios.size(), -kInf);
  return scenario_value_bounds(problem, scenarios).lower;
}

double lp_value(const ProgramBuilder& b) {
  Solution s = solve_lp(b.build());
  if (s.status == SolveStatus::Unbounded) throw Error("scenario bound: recourse unbounded over X");
  if (!s.ok()) throw Error("scenario bound: LP infeasible");
  return s.objective;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double out = 1.0;
  for (int i = 0; i < k; ++i) out = out * (n - i) / (i + 1);
  return out;
}

template <typename F>
void for_each_subset(int n, int k, F&& f) {
  if (k > n || k < 0) return;
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    f(idx);
    int pos = k - 1;
    while (pos >= 0 && idx[pos] == n - k + pos) --pos;
    if (pos < 0) return;
    ++idx[pos];
    for (int i = pos + 1; i < k; ++i) idx[i] = idx[i - 1] + 1;
  }
}

// Upper bounds on optimal dual multipliers and reduced costs of
// min_p v'p s.t. D p <= d, e'p = 1, p >= 0, over all vertices of the dual
// feasible region and all v in [L, U].
struct DualCertificate {
  bool ok = false;
  VectorXd alpha;
  VectorXd reduced;
};

double box_max(const VectorXd& coef, const VectorXd& L, const VectorXd& U) {
  double out = 0.0;
  for (int i = 0; i < coef.size(); ++i) out += std::max(coef(i) * L(i), coef(i) * U(i));
  return out;
}

DualCertificate certify_duals(const MatrixXd& D, const VectorXd& L, const VectorXd& U) {
  const int l = static_cast<int>(D.rows());
  const int N = static_cast<int>(D.cols());
  DualCertificate cert;
  double count = 0.0;
  for (int k = 0; k <= std::min(l, N - 1); ++k) count += binomial(l, k) * binomial(N, k + 1);
  if (count > 200000) return cert;
  cert.alpha = VectorXd::Zero(l);
  cert.reduced = VectorXd::Zero(N);
  for (int k = 0; k <= std::min(l, N - 1); ++k) {
    for_each_subset(l, k, [&](const std::vector<int>& J) {
      for_each_subset(N, k + 1, [&](const std::vector<int>& I) {
        MatrixXd A(k + 1, k + 1);
        for (int r = 0; r <= k; ++r) {
          for (int c = 0; c < k; ++c) A(r, c) = -D(J[c], I[r]);
          A(r, k) = 1.0;
        }
        Eigen::FullPivLU<MatrixXd> lu(A);
        lu.setThreshold(1e-10);
        if (!lu.isInvertible()) return;
        MatrixXd G = lu.inverse();  // (alpha_J, beta) = G v_I
        auto lift = [&](const Eigen::RowVectorXd& row) {
          VectorXd c = VectorXd::Zero(N);
          for (int r = 0; r <= k; ++r) c(I[r]) += row(r);
          return c;
        };
        for (int c = 0; c < k; ++c) {
          cert.alpha(J[c]) = std::max(cert.alpha(J[c]), box_max(lift(G.row(c)), L, U));
        }
        for (int i = 0; i < N; ++i) {
          Eigen::RowVectorXd row = -G.row(k);
          for (int c = 0; c < k; ++c) row += D(J[c], i) * G.row(c);
          VectorXd coef = lift(row);
          coef(i) += 1.0;
          cert.reduced(i) = std::max(cert.reduced(i), box_max(coef, L, U));
        }
      });
    });
  }
  cert.ok = true;
  return cert;
}

struct Candidate {
  double value;
  std::string formula;
  std::string citation;
};

// Smallest formula that is at least the certified bound, unless the
// certified bound is strictly smaller.
Candidate choose(const std::vector<Candidate>& formulas, std::optional<double> certified, const std::string& cert_formula) {
  std::optional<Candidate> best;
  std::string rejected;
  for (const auto& c : formulas) {
    if (certified && c.value < *certified - 1e-9 * std::max(1.0, *certified)) {
      rejected += "; " + c.citation + " value " + fmt(c.value) + " below certified " + fmt(*certified);
      continue;
    }
    if (!best || c.value < best->value) best = c;
  }
  if (best && (!certified || best->value <= *certified + 1e-9 * std::max(1.0, *certified))) {
    if (!rejected.empty()) best->formula += rejected;
    return *best;
  }
  if (best) rejected += "; tighter than " + best->citation + " value " + fmt(best->value);
  return {*certified, cert_formula + rejected, "dual basis bound"};
}

}  // namespace

ScenarioBounds scenario_value_bounds(const DFOProblem& problem, const std::vector<VectorXd>& scenarios) {
  const int S = static_cast<int>(scenarios.size());
  ScenarioBounds out{VectorXd::Zero(S), VectorXd::Zero(S)};
  const DecisionSet& X = problem.decisions;
  std::optional<std::vector<VectorXd>> vertices;
  auto max_over_vertices = [&](const VectorXd& xi) {
    if (!vertices) {
      try {
        vertices = decision_vertices(X);
      } catch (const CapExceeded& e) {
        throw CompileError(CompileError::Code::MissingBounds, "Thm 4.4",
                           std::string("scenario upper bound: ") + e.what());
      }
    }
    double best = -kInf;
    for (const auto& x : *vertices) best = std::max(best, evaluate_recourse(problem.recourse, x, xi));
    return best;
  };
  for (int s = 0; s < S; ++s) {
    const VectorXd& xi = scenarios[s];
    std::visit(detail::Overload{
                   [&](const PiecewiseAffineRecourse& r) {
                     if (r.mode == RecourseMode::ConvexMax) {
                       ProgramBuilder b;
                       auto x = add_decisions(b, X);
                       int eta = b.add_var("eta", -kInf, kInf);
                       for (const auto& piece : r.pieces) b.add_ge(b(eta), piece_expr(piece, xi, x));
                       b.set_objective(b(eta));
                       out.lower(s) = lp_value(b);
                       out.upper(s) = max_over_vertices(xi);
                       return;
                     }
                     double lo = kInf;
                     for (const auto& piece : r.pieces) {
                       ProgramBuilder b;
                       auto x = add_decisions(b, X);
                       b.set_objective(piece_expr(piece, xi, x));
                       lo = std::min(lo, lp_value(b));
                     }
                     out.lower(s) = lo;
                     ProgramBuilder b;
                     auto x = add_decisions(b, X);
                     int eta = b.add_var("eta", -kInf, kInf);
                     for (const auto& piece : r.pieces) b.add_le(b(eta), piece_expr(piece, xi, x));
                     b.set_objective(-b(eta));
                     out.upper(s) = -lp_value(b);
                   },
                   [&](const LPRecourse&) {
                     ProgramBuilder b;
                     BigMLedger unused;
                     auto x = add_decisions(b, X);
                     int v = b.add_var("v", -kInf, kInf);
                     add_scenario_epigraph(b, problem, x, xi, v, -kInf, unused, "s");
                     b.set_objective(b(v));
                     out.lower(s) = lp_value(b);
                     out.upper(s) = max_over_vertices(xi);
                   },
               },
               problem.recourse);
  }
  return out;
}

std::vector<VectorXd> ambiguity_vertices(const MatrixXd& D, const VectorXd& d, int N, std::size_t cap) {
  const int l = static_cast<int>(d.size());
  const int cols = N + l;
  const int rows = l + 1;
  MatrixXd A = MatrixXd::Zero(rows, cols);
  if (l > 0) {
    A.topLeftCorner(l, N) = D;
    A.topRightCorner(l, l) = MatrixXd::Identity(l, l);
  }
  A.row(l).head(N).setOnes();
  VectorXd rhs(rows);
  rhs << d, 1.0;
  double count = binomial(cols, rows);
  if (count > 5e6) {
    throw CompileError(CompileError::Code::VertexCapExceeded, "Thm 4.3",
                       "too many candidate bases: " + fmt(count));
  }
  std::vector<VectorXd> out;
  for_each_subset(cols, rows, [&](const std::vector<int>& basis) {
    MatrixXd B(rows, rows);
    for (int c = 0; c < rows; ++c) B.col(c) = A.col(basis[c]);
    Eigen::FullPivLU<MatrixXd> lu(B);
    lu.setThreshold(1e-10);
    if (!lu.isInvertible()) return;
    VectorXd xb = lu.solve(rhs);
    if (xb.minCoeff() < -1e-9) return;
    VectorXd p = VectorXd::Zero(N);
    for (int c = 0; c < rows; ++c) {
      if (basis[c] < N) p(basis[c]) = std::max(0.0, xb(c));
    }
    for (const auto& v : out) {
      if ((v - p).cwiseAbs().maxCoeff() <= 1e-7) return;
    }
    out.push_back(p);
    if (out.size() > cap) {
      throw CompileError(CompileError::Code::VertexCapExceeded, "Thm 4.3",
                         "more than " + std::to_string(cap) + " vertices");
    }
  });
  return out;
}

CompiledProgram compile_finite_enumeration(const DFOProblem& problem, std::size_t vertex_cap) {
  const auto& set = finite_set(problem, "Thm 4.3");
  const int N = static_cast<int>(set.scenarios.size());
  auto vertices = ambiguity_vertices(set.D, set.d, N, vertex_cap);
  VectorXd lower = epigraph_lower(problem, set.scenarios);
  CompiledProgram out;
  out.kind = CompiledProgram::Kind::Batch;
  out.num_decisions = problem.n();
  out.citation = "Thm 4.3";
  out.notes["vertices"] = static_cast<double>(vertices.size());
  for (std::size_t j = 0; j < vertices.size(); ++j) {
    const VectorXd& g = vertices[j];
    ProgramBuilder b;
    auto x = add_decisions(b, problem.decisions);
    b.cite("Thm 4.3");
    LinExpr obj;
    for (int i = 0; i < N; ++i) {
      if (g(i) <= 1e-12) continue;
      int v = b.add_var("v" + std::to_string(i), lower(i), kInf);
      add_scenario_epigraph(b, problem, x, set.scenarios[i], v, lower(i), out.big_m,
                            "j" + std::to_string(j) + "s" + std::to_string(i));
      obj += g(i) * b(v);
    }
    b.set_objective(obj);
    add_member(out, b, "vertex=" + std::to_string(j));
  }
  return out;
}

namespace detail {

LinExpr add_kkt_block(ProgramBuilder& b, const std::vector<int>& v, const FinitePolyhedral& set,
                      const ScenarioBounds& bounds, BigMLedger& ledger) {
  const MatrixXd& D = set.D;
  const VectorXd& d = set.d;
  const int l = static_cast<int>(d.size());
  const int N = static_cast<int>(v.size());
  const VectorXd& L = bounds.lower;
  const VectorXd& U = bounds.upper;

  const bool cor45 = (l == 0) || ((D.array() >= 0).all() && (d.array() > 0).all());
  const bool integral = (l == 0) || (D.array() - D.array().round()).abs().maxCoeff() <= 1e-12;
  const bool thm44 = integral && N >= l + 1;
  if (!cor45 && !thm44 && !set.big_m) {
    throw CompileError(CompileError::Code::MissingBounds, "Thm 4.4",
                       "D is neither integral with N >= l + 1 nor sign-restricted, and no big_m was supplied");
  }
  const double minL = L.minCoeff();
  const double maxU = U.maxCoeff();
  const double Ubar = std::max(L.cwiseAbs().maxCoeff(), U.cwiseAbs().maxCoeff());
  double Lbar = 0.0;
  for (int j = 0; j < l; ++j) {
    double len = N + 1 + std::ceil(std::log2(std::abs(d(j)) + 1.0));
    for (int i = 0; i < N; ++i) len += std::ceil(std::log2(std::abs(D(j, i)) + 1.0));
    Lbar = std::max(Lbar, len);
  }
  const double enc = (l + 1) * std::pow(2.0, std::min(Lbar, 60.0));
  DualCertificate cert = certify_duals(D, L, U);

  VectorXd M1(l), M2(l), Mbar(N);
  for (int j = 0; j < l; ++j) {
    std::vector<Candidate> c1, c2;
    if (cor45) {
      c1.push_back({(maxU - minL) / d(j), "(max U - min L) / d_j", "Cor 4.5"});
      c2.push_back({d(j), "d_j", "Cor 4.5"});
    }
    if (thm44) {
      c1.push_back({Ubar * enc, "U (l+1) 2^Lbar, Lbar = " + fmt(Lbar), "Thm 4.4"});
      c2.push_back({d(j) + D.row(j).cwiseAbs().sum(), "d_j + sum_i |D_ji|", "Thm 4.4"});
    }
    if (set.big_m) c1.push_back({*set.big_m, "user supplied", "user"});
    double slack_cert = std::max(0.0, d(j) - D.row(j).minCoeff());
    Candidate a = choose(c1, cert.ok ? std::optional<double>(cert.alpha(j)) : std::nullopt,
                         "max over dual bases and value box");
    Candidate s = choose(c2, slack_cert, "d_j - min_i D_ji");
    M1(j) = a.value;
    M2(j) = s.value;
    ledger.add("M_" + std::to_string(j + 1) + ",1", a.value, a.formula, a.citation);
    ledger.add("M_" + std::to_string(j + 1) + ",2", s.value, s.formula, s.citation);
  }
  for (int i = 0; i < N; ++i) {
    std::vector<Candidate> c;
    if (cor45) c.push_back({std::max(0.0, U(i) - minL), "U_i - min L", "Cor 4.5"});
    if (thm44) {
      double col = l > 0 ? D.col(i).cwiseAbs().sum() : 0.0;
      c.push_back({Ubar * (col + 1.0) * enc + Ubar * enc, "U (sum_j |D_ji| + 1)(l+1) 2^Lbar + U (l+1) 2^Lbar", "Thm 4.4"});
    }
    if (set.big_m) c.push_back({*set.big_m, "user supplied", "user"});
    Candidate r = choose(c, cert.ok ? std::optional<double>(cert.reduced(i)) : std::nullopt,
                         "max over dual bases and value box");
    Mbar(i) = r.value;
    ledger.add("Mbar_" + std::to_string(i + 1), r.value, r.formula, r.citation);
  }

  const std::string saved = b.citation();
  b.cite("Thm 4.4");
  auto alpha = b.add_vars("alpha", l, 0.0, kInf);
  auto z = b.add_vars("z", l, 0.0, 1.0, true);
  int beta = b.add_var("beta", -kInf, kInf);
  auto p = b.add_vars("p", N, 0.0, 1.0);
  auto zb = b.add_vars("zbar", N, 0.0, 1.0, true);
  for (int j = 0; j < l; ++j) b.set_bounds(alpha[j], 0.0, M1(j));

  LinExpr total;
  for (int i = 0; i < N; ++i) total += b(p[i]);
  b.add_eq(total, 1.0, "psum");
  for (int j = 0; j < l; ++j) {
    LinExpr Dp;
    for (int i = 0; i < N; ++i) {
      if (D(j, i) != 0.0) Dp += D(j, i) * b(p[i]);
    }
    b.add_le(Dp, d(j), "prim" + std::to_string(j));
    b.add_le(LinExpr(d(j)) - Dp, M2(j) * (LinExpr(1.0) - b(z[j])), "cs" + std::to_string(j));
    b.add_le(b(alpha[j]), M1(j) * b(z[j]), "dual" + std::to_string(j));
  }
  for (int i = 0; i < N; ++i) {
    b.add_le(b(p[i]), b(zb[i]), "supp" + std::to_string(i));
    LinExpr red = b(v[i]) - b(beta);
    for (int j = 0; j < l; ++j) {
      if (D(j, i) != 0.0) red += D(j, i) * b(alpha[j]);
    }
    b.add_ge(red, 0.0, "red" + std::to_string(i));
    b.add_le(red, Mbar(i) * (LinExpr(1.0) - b(zb[i])), "redcs" + std::to_string(i));
  }
  LinExpr obj = b(beta);
  for (int j = 0; j < l; ++j) {
    if (d(j) != 0.0) obj -= d(j) * b(alpha[j]);
  }
  b.cite(saved);
  return obj;
}

}  // namespace detail

CompiledProgram compile_finite_kkt(const DFOProblem& problem) {
  const auto& set = finite_set(problem, "Thm 4.4");
  const int N = static_cast<int>(set.scenarios.size());
  ScenarioBounds bounds = scenario_value_bounds(problem, set.scenarios);
  CompiledProgram out;
  out.kind = CompiledProgram::Kind::Single;
  out.num_decisions = problem.n();
  ProgramBuilder b;
  auto x = add_decisions(b, problem.decisions);
  std::vector<int> v;
  for (int i = 0; i < N; ++i) {
    v.push_back(b.add_var("v" + std::to_string(i), bounds.lower(i), bounds.upper(i)));
    add_scenario_epigraph(b, problem, x, set.scenarios[i], v[i], bounds.lower(i), out.big_m, "s" + std::to_string(i));
  }
  b.set_objective(detail::add_kkt_block(b, v, set, bounds, out.big_m));
  const bool cor45 = set.d.size() == 0 || ((set.D.array() >= 0).all() && (set.d.array() > 0).all());
  out.citation = cor45 ? "Cor 4.5" : "Thm 4.4";
  add_member(out, b, "single");
  return out;
}

CompiledProgram compile_dro(const DFOProblem& problem) {
  const auto* scen = scenarios_of(problem.ambiguity);
  detail::InnerPolytope P;
  if (const auto* f = std::get_if<FinitePolyhedral>(&problem.ambiguity)) {
    P = {f->D, f->d};
  } else if (const auto* s = std::get_if<IntervalPolyhedral>(&problem.ambiguity)) {
    P = detail::interval_as_polytope(*s);
  } else {
    throw CompileError(CompileError::Code::WrongRoute, "Eq 28", "DRO counterpart needs a polyhedral set");
  }
  VectorXd lower = epigraph_lower(problem, *scen);
  CompiledProgram out;
  out.kind = CompiledProgram::Kind::Single;
  out.num_decisions = problem.n();
  out.citation = "Eq 28";
  ProgramBuilder b;
  auto x = add_decisions(b, problem.decisions);
  std::vector<int> v;
  for (std::size_t i = 0; i < scen->size(); ++i) {
    v.push_back(b.add_var("v" + std::to_string(i), lower(i), kInf));
    add_scenario_epigraph(b, problem, x, (*scen)[i], v.back(), lower(i), out.big_m, "s" + std::to_string(i));
  }
  b.set_objective(detail::add_dro_block(b, v, P));
  add_member(out, b, "single");
  return out;
}

CompiledProgram compile_saa(const DFOProblem& problem) {
  std::vector<VectorXd> points;
  VectorXd weights;
  std::visit(detail::Overload{
                 [&](const SupportBall& s) {
                   points = {s.center};
                   weights = VectorXd::Ones(1);
                 },
                 [&](const WassersteinInf&) {},
                 [&](const FinitePolyhedral& s) {
                   const int N = static_cast<int>(s.scenarios.size());
                   points = s.scenarios;
                   weights = VectorXd::Constant(N, 1.0 / N);
                   if (s.d.size() > 0 && (s.D * weights - s.d).maxCoeff() > 1e-12) {
                     // Closest point of the set to the uniform weights in the L1 sense.
                     ProgramBuilder b;
                     b.cite("nominal");
                     auto p = b.add_vars("p", N, 0.0, kInf);
                     auto dev = b.add_vars("dev", N, 0.0, kInf);
                     LinExpr sum, obj;
                     for (int i = 0; i < N; ++i) {
                       sum += b(p[i]);
                       obj += b(dev[i]);
                       b.add_ge(b(dev[i]), b(p[i]) - 1.0 / N);
                       b.add_ge(b(dev[i]), 1.0 / N - b(p[i]));
                     }
                     b.add_eq(sum, 1.0);
                     for (int j = 0; j < s.d.size(); ++j) {
                       LinExpr row;
                       for (int i = 0; i < N; ++i) row += s.D(j, i) * b(p[i]);
                       b.add_le(row, s.d(j));
                     }
                     b.set_objective(obj);
                     Solution sol = solve_lp(b.build());
                     if (!sol.ok()) throw Error("nominal distribution: ambiguity set empty");
                     weights = sol.x.head(N);
                   }
                 },
                 [&](const IntervalPolyhedral& s) {
                   points = s.scenarios;
                   weights = s.p0;
                 },
                 [&](const L2Ball& s) {
                   points = s.scenarios;
                   weights = s.p0;
                 },
             },
             problem.ambiguity);
  if (const auto* ws = std::get_if<WassersteinInf>(&problem.ambiguity)) {
    DFOProblem zero = problem;
    std::get<WassersteinInf>(zero.ambiguity).radius = 0.0;
    (void)ws;
    CompiledProgram out = compile_wasserstein(zero);
    out.citation = "Eq 17 at radius 0";
    return out;
  }
  VectorXd lower = epigraph_lower(problem, points);
  CompiledProgram out;
  out.kind = CompiledProgram::Kind::Single;
  out.num_decisions = problem.n();
  out.citation = "nominal";
  ProgramBuilder b;
  auto x = add_decisions(b, problem.decisions);
  LinExpr obj;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (weights(i) <= 1e-15) continue;
    int v = b.add_var("v" + std::to_string(i), lower(i), kInf);
    add_scenario_epigraph(b, problem, x, points[i], v, lower(i), out.big_m, "s" + std::to_string(i));
    obj += weights(i) * b(v);
  }
  b.set_objective(obj);
  add_member(out, b, "single");
  return out;
}

}  // namespace dfo
