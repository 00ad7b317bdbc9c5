#include "internal.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dfo {

const char* to_string(VerdictStatus status) {
  switch (status) {
    case VerdictStatus::Tractable: return "Tractable";
    case VerdictStatus::MICPR: return "MICPR";
    case VerdictStatus::NotMICPR: return "NotMICPR";
    case VerdictStatus::Unknown: return "Unknown";
  }
  return "?";
}

std::optional<Method> parse_method(const std::string& text) {
  if (text == "auto") return Method::Auto;
  if (text == "enumerate") return Method::Enumerate;
  if (text == "kkt") return Method::Kkt;
  if (text == "interval") return Method::Interval;
  if (text == "wasserstein") return Method::Wasserstein;
  if (text == "sdfo") return Method::Sdfo;
  return std::nullopt;
}

const char* to_string(Method method) {
  switch (method) {
    case Method::Auto: return "auto";
    case Method::Enumerate: return "enumerate";
    case Method::Kkt: return "kkt";
    case Method::Interval: return "interval";
    case Method::Wasserstein: return "wasserstein";
    case Method::Sdfo: return "sdfo";
  }
  return "?";
}

void BigMLedger::add(std::string name, double value, std::string formula, std::string citation) {
  if (!std::isfinite(value) || value < 0) {
    throw CompileError(CompileError::Code::MissingBounds, citation, "big-M " + name + " is not a finite nonnegative value");
  }
  entries.push_back({std::move(name), value, std::move(formula), std::move(citation)});
}

double BigMLedger::max_value() const {
  double out = 0.0;
  for (const auto& e : entries) out = std::max(out, e.value);
  return out;
}

Norm effective_norm(Norm p, int m) { return m == 1 ? Norm::one() : p; }

CompiledResult solve_compiled(const CompiledProgram& compiled, const SolverConfig& config) {
  CompiledResult out;
  BatchResult r = solve_batch(compiled.programs, config);
  out.status = r.best.status;
  out.value = r.best.objective;
  out.argmin = r.argmin;
  out.excluded = r.excluded;
  if (r.best.x.size() >= compiled.num_decisions) out.x = r.best.x.head(compiled.num_decisions);
  if (r.argmin >= 0 && r.argmin < static_cast<int>(compiled.labels.size())) out.label = compiled.labels[r.argmin];
  return out;
}

void build_mccormick(ProgramBuilder& b, double lambda_l, double lambda_u, double gamma_l, double gamma_u, int s,
                     int binary, const LinExpr& gamma) {
  if (gamma_l > gamma_u + 1e-12) {
    throw CompileError(CompileError::Code::DegenerateBounds, "Def 2.3", "McCormick bounds with gamma_l > gamma_u");
  }
  if (!(lambda_l < lambda_u)) {
    throw CompileError(CompileError::Code::DegenerateBounds, "Def 2.3", "McCormick bounds with lambda_l >= lambda_u");
  }
  const double delta = lambda_u - lambda_l;
  LinExpr lam = LinExpr(lambda_l) + delta * b(binary);
  LinExpr sv = b(s);
  b.add_ge(sv, lambda_l * gamma + gamma_l * lam - lambda_l * gamma_l);
  b.add_ge(sv, lambda_u * gamma + gamma_u * lam - lambda_u * gamma_u);
  b.add_le(sv, lambda_u * gamma + gamma_l * lam - lambda_u * gamma_l);
  b.add_le(sv, gamma_u * lam + lambda_l * gamma - lambda_l * gamma_u);
}

int build_reverse_norm_epigraph(ProgramBuilder& b, Norm p, const std::vector<LinExpr>& comps, const VectorXd& lower,
                                const VectorXd& upper, BigMLedger* ledger, const std::string& tag) {
  if (p.kind == Norm::Kind::Real) {
    throw CompileError(CompileError::Code::NotRepresentable, "Lemma 2.2", "reverse norm with p in (1, inf)");
  }
  const int m = static_cast<int>(comps.size());
  double H = 0.0;
  double total = 0.0;
  for (int i = 0; i < m; ++i) {
    double a = std::max(std::abs(lower(i)), std::abs(upper(i)));
    H = std::max(H, a);
    total += a;
  }
  const std::string saved = b.citation();
  b.cite("Lemma 2.2");
  int t = b.add_var(tag + "_t", p.kind == Norm::Kind::One ? -total : -H, kInf);
  if (m == 0) {
    b.set_bounds(t, 0.0, kInf);
    b.cite(saved);
    return t;
  }
  if (p.kind == Norm::Kind::One) {
    LinExpr sum = b(t);
    for (int i = 0; i < m; ++i) {
      int z = b.add_var(tag + "_z" + std::to_string(i), 0, 1, true);
      double a = std::max(std::abs(lower(i)), std::abs(upper(i)));
      int s = b.add_var(tag + "_s" + std::to_string(i), -a, a);
      b.cite("Def 2.3");
      build_mccormick(b, -1.0, 1.0, lower(i), upper(i), s, z, comps[i]);
      b.cite("Lemma 2.2");
      sum += b(s);
    }
    b.add_ge(sum, 0.0, tag + "_norm");
  } else {
    LinExpr pick;
    for (int i = 0; i < m; ++i) {
      for (int sign : {1, -1}) {
        int d = b.add_var(tag + "_d" + std::to_string(i) + (sign > 0 ? "p" : "m"), 0, 1, true);
        pick += b(d);
        // t >= -sign * gamma_i - M (1 - d)
        double worst = sign > 0 ? -lower(i) : upper(i);
        double M = std::max(0.0, worst + H);
        if (ledger) {
          std::ostringstream name;
          name << tag << "_M" << i << (sign > 0 ? "+" : "-");
          ledger->add(name.str(), M, "max over box of -sign*gamma_i plus max_i |gamma_i| bound", "Lemma 2.2");
        }
        b.add_ge(b(t) + sign * comps[i] + M * LinExpr::term(d, -1.0), -M);
      }
    }
    b.add_eq(pick, 1.0, tag + "_pick");
  }
  b.cite(saved);
  return t;
}

LinearProgram reverse_norm_epigraph_program(Norm p, const AffineMap& map, const VectorXd& l, const VectorXd& u) {
  ProgramBuilder b;
  b.cite("box");
  std::vector<int> x;
  for (int j = 0; j < l.size(); ++j) x.push_back(b.add_var("x" + std::to_string(j), l(j), u(j)));
  auto [lo, hi] = propagate_bounds(map, l, u);
  std::vector<LinExpr> comps;
  for (int i = 0; i < map.rows(); ++i) comps.push_back(detail::affine_expr(map, i, x));
  int t = build_reverse_norm_epigraph(b, p, comps, lo, hi, nullptr, "rn");
  b.set_objective(b(t));
  return b.build();
}

namespace detail {

std::vector<int> add_decisions(ProgramBuilder& b, const DecisionSet& X) {
  const std::string saved = b.citation();
  b.cite("decision set");
  std::vector<int> x;
  for (int j = 0; j < X.dim(); ++j) x.push_back(b.add_var("x" + std::to_string(j), X.lower(j), X.upper(j)));
  for (int i = 0; i < X.ineq_rhs.size(); ++i) {
    LinExpr row;
    for (int j = 0; j < X.dim(); ++j) {
      if (X.ineq_matrix(i, j) != 0.0) row += X.ineq_matrix(i, j) * b(x[j]);
    }
    b.add_row(row, RowSense::LessEqual, X.ineq_rhs(i), "X" + std::to_string(i));
  }
  b.cite(saved);
  return x;
}

LinExpr affine_expr(const AffineMap& map, int row, const std::vector<int>& x) {
  LinExpr e(map.offset(row));
  for (int j = 0; j < map.cols(); ++j) {
    if (map.matrix(row, j) != 0.0) e += LinExpr::term(x[j], map.matrix(row, j));
  }
  return e;
}

LinExpr piece_expr(const AffinePiece& piece, const VectorXd& xi, const std::vector<int>& x) {
  LinExpr e = affine_expr(piece.b, 0, x);
  for (int i = 0; i < xi.size(); ++i) {
    if (xi(i) != 0.0) e += xi(i) * affine_expr(piece.a, i, x);
  }
  return e;
}

std::pair<VectorXd, VectorXd> box_bounds(const AffineMap& map, const DecisionSet& X) {
  return propagate_bounds(map, X.lower, X.upper);
}

void add_member(CompiledProgram& out, const ProgramBuilder& b, const std::string& label) {
  out.programs.push_back(b.build());
  out.provenance.push_back(b.provenance());
  out.labels.push_back(label);
}

const PiecewiseAffineRecourse& piecewise(const DFOProblem& problem, const std::string& citation) {
  const auto* r = std::get_if<PiecewiseAffineRecourse>(&problem.recourse);
  if (!r) throw CompileError(CompileError::Code::WrongRoute, citation, "this route needs piecewise affine recourse");
  return *r;
}

void add_scenario_epigraph(ProgramBuilder& b, const DFOProblem& problem, const std::vector<int>& x,
                           const VectorXd& xi, int v, double v_lower, BigMLedger& ledger, const std::string& tag) {
  const std::string saved = b.citation();
  b.cite("scenario epigraph");
  std::visit(Overload{
                 [&](const PiecewiseAffineRecourse& r) {
                   if (r.mode == RecourseMode::ConvexMax) {
                     for (int k = 0; k < r.num_pieces(); ++k) b.add_ge(b(v), piece_expr(r.pieces[k], xi, x));
                     return;
                   }
                   if (r.num_pieces() == 1) {
                     b.add_ge(b(v), piece_expr(r.pieces[0], xi, x));
                     return;
                   }
                   LinExpr pick;
                   for (int k = 0; k < r.num_pieces(); ++k) {
                     int d = b.add_var(tag + "_sel" + std::to_string(k), 0, 1, true);
                     pick += b(d);
                     // Upper bound of the piece over the decision box.
                     AffineMap f(xi.transpose() * r.pieces[k].a.matrix + r.pieces[k].b.matrix,
                                 VectorXd::Constant(1, xi.dot(r.pieces[k].a.offset) + r.pieces[k].b.offset(0)));
                     auto [lo, hi] = box_bounds(f, problem.decisions);
                     double M = std::max(0.0, hi(0) - v_lower);
                     ledger.add(tag + "_M" + std::to_string(k), M, "max of piece over box minus lower value bound",
                                "scenario epigraph");
                     b.add_ge(b(v) + M * LinExpr::term(d, -1.0), piece_expr(r.pieces[k], xi, x) - M);
                   }
                   b.add_eq(pick, 1.0, tag + "_pick");
                 },
                 [&](const LPRecourse& r) {
                   std::vector<int> y;
                   for (int j = 0; j < r.num_second_stage(); ++j) {
                     y.push_back(b.add_var(tag + "_y" + std::to_string(j), r.lower(j), kInf));
                   }
                   VectorXd rhs = r.rhs - r.tech_xi * xi;
                   for (int i = 0; i < r.num_rows(); ++i) {
                     LinExpr row;
                     for (int j = 0; j < r.num_second_stage(); ++j) {
                       if (r.recourse_matrix(i, j) != 0.0) row += r.recourse_matrix(i, j) * b(y[j]);
                     }
                     for (int j = 0; j < static_cast<int>(x.size()); ++j) {
                       if (r.tech_x(i, j) != 0.0) row += r.tech_x(i, j) * b(x[j]);
                     }
                     b.add_row(row, r.senses[i], rhs(i));
                   }
                   LinExpr cost;
                   for (int j = 0; j < r.num_second_stage(); ++j) {
                     if (r.cost(j) != 0.0) cost += r.cost(j) * b(y[j]);
                   }
                   b.add_ge(b(v), cost);
                 },
             },
             problem.recourse);
  b.cite(saved);
}

InnerPolytope interval_as_polytope(const IntervalPolyhedral& s) {
  const int N = static_cast<int>(s.p0.size());
  InnerPolytope P;
  P.D.resize(2 * N, N);
  P.D << MatrixXd::Identity(N, N), -MatrixXd::Identity(N, N);
  P.d.resize(2 * N);
  P.d << s.p0 + s.ubar.cast<double>() / s.q, -(s.p0 + s.lbar.cast<double>() / s.q);
  return P;
}

LinExpr add_dro_block(ProgramBuilder& b, const std::vector<int>& v, const InnerPolytope& P) {
  const std::string saved = b.citation();
  b.cite("Eq 28");
  const int N = static_cast<int>(v.size());
  const int l = static_cast<int>(P.d.size());
  std::vector<int> alpha = b.add_vars("dro_a", l, 0.0, kInf);
  int beta = b.add_var("dro_b", -kInf, kInf);
  for (int i = 0; i < N; ++i) {
    LinExpr row = b(beta) - b(v[i]);
    for (int j = 0; j < l; ++j) {
      if (P.D(j, i) != 0.0) row += P.D(j, i) * b(alpha[j]);
    }
    b.add_row(row, RowSense::GreaterEqual, 0.0, "dro" + std::to_string(i));
  }
  LinExpr obj = b(beta);
  for (int j = 0; j < l; ++j) {
    if (P.d(j) != 0.0) obj += P.d(j) * b(alpha[j]);
  }
  b.cite(saved);
  return obj;
}

}  // namespace detail
}  // namespace dfo
