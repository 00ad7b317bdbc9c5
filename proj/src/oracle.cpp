#include "dfo/oracle.hpp"

#include "dfo/milp.hpp"
#include "dfo/program.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dfo::oracle {

namespace {

template <typename... Ts>
struct Overload : Ts... {
  using Ts::operator()...;
};
template <typename... Ts>
Overload(Ts...) -> Overload<Ts...>;

double choose(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double out = 1.0;
  for (int i = 0; i < k; ++i) out = out * (n - i) / (i + 1);
  return out;
}

template <typename F>
void subsets(int n, int k, F&& f) {
  if (k < 0 || k > n) return;
  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    f(idx);
    int pos = k - 1;
    while (pos >= 0 && idx[pos] == n - k + pos) --pos;
    if (pos < 0) return;
    ++idx[pos];
    for (int i = pos + 1; i < k; ++i) idx[i] = idx[i - 1] + 1;
  }
}

// ---- recourse helpers ----

const PiecewiseAffineRecourse* pieces_of(const DFOProblem& p) { return std::get_if<PiecewiseAffineRecourse>(&p.recourse); }

// Q(x, .) is convex in x for every scenario.
bool convex_in_x(const DFOProblem& p) {
  const auto* r = pieces_of(p);
  return !r || r->mode == RecourseMode::ConvexMax || r->num_pieces() == 1;
}

double piece_at(const AffinePiece& piece, const VectorXd& x, const VectorXd& xi) {
  return xi.dot(piece.a.matrix * x + piece.a.offset) + (piece.b.matrix * x + piece.b.offset)(0);
}

LinExpr piece_linear(const AffinePiece& piece, const VectorXd& xi, const std::vector<int>& x) {
  VectorXd coef = piece.a.matrix.transpose() * xi + piece.b.matrix.row(0).transpose();
  LinExpr e(xi.dot(piece.a.offset) + piece.b.offset(0));
  for (int j = 0; j < static_cast<int>(x.size()); ++j) {
    if (coef(j) != 0.0) e += coef(j) * LinExpr::term(x[j]);
  }
  return e;
}

std::vector<int> decision_vars(ProgramBuilder& b, const DecisionSet& X) {
  std::vector<int> x;
  for (int j = 0; j < X.dim(); ++j) x.push_back(b.add_var("x" + std::to_string(j), X.lower(j), X.upper(j)));
  for (int i = 0; i < X.ineq_rhs.size(); ++i) {
    LinExpr row;
    for (int j = 0; j < X.dim(); ++j) {
      if (X.ineq_matrix(i, j) != 0.0) row += X.ineq_matrix(i, j) * LinExpr::term(x[j]);
    }
    b.add_le(row, X.ineq_rhs(i));
  }
  return x;
}

// Variable v with v >= Q(x, xi) for recourse convex in x.
int convex_epigraph(ProgramBuilder& b, const DFOProblem& p, const std::vector<int>& x, const VectorXd& xi) {
  int v = b.add_var("v", -kInf, kInf);
  if (const auto* r = pieces_of(p)) {
    for (const auto& piece : r->pieces) b.add_ge(LinExpr::term(v), piece_linear(piece, xi, x));
    return v;
  }
  const auto& r = std::get<LPRecourse>(p.recourse);
  std::vector<int> y;
  for (int j = 0; j < r.num_second_stage(); ++j) y.push_back(b.add_var("y", r.lower(j), kInf));
  for (int i = 0; i < r.num_rows(); ++i) {
    LinExpr row;
    for (int j = 0; j < r.num_second_stage(); ++j) row += r.recourse_matrix(i, j) * LinExpr::term(y[j]);
    for (int j = 0; j < static_cast<int>(x.size()); ++j) row += r.tech_x(i, j) * LinExpr::term(x[j]);
    b.add_row(row, r.senses[i], r.rhs(i) - r.tech_xi.row(i).dot(xi));
  }
  LinExpr cost;
  for (int j = 0; j < r.num_second_stage(); ++j) cost += r.cost(j) * LinExpr::term(y[j]);
  b.add_ge(LinExpr::term(v), cost);
  return v;
}

double lp_min(const ProgramBuilder& b) {
  Solution s = solve_lp(b.build());
  if (!s.ok()) throw Error(std::string("oracle LP not optimal: ") + to_string(s.status));
  return s.objective;
}

// min_x sum_i w_i Q(x, xi_i) for recourse convex in x.
double convex_weighted(const DFOProblem& p, const std::vector<VectorXd>& xis, const VectorXd& w) {
  ProgramBuilder b;
  auto x = decision_vars(b, p.decisions);
  LinExpr obj;
  for (std::size_t i = 0; i < xis.size(); ++i) {
    if (w(i) <= 1e-15) continue;
    obj += w(i) * LinExpr::term(convex_epigraph(b, p, x, xis[i]));
  }
  b.set_objective(obj);
  return lp_min(b);
}

std::vector<VectorXd> decision_points(const DecisionSet& X, std::size_t cap) {
  return enumerate_vertices(X.ineq_matrix, X.ineq_rhs, MatrixXd::Zero(0, X.dim()), VectorXd::Zero(0), X.lower,
                            X.upper, cap)
      .vertices;
}

// Unit-ball extreme points for p in {1, inf}.
std::vector<VectorXd> unit_ball_vertices(Norm p, int m) {
  std::vector<VectorXd> out;
  if (p.kind == Norm::Kind::One || m == 1) {
    for (int i = 0; i < m; ++i) {
      out.push_back(VectorXd::Unit(m, i));
      out.push_back(-VectorXd::Unit(m, i));
    }
    return out;
  }
  if (m > 16) throw CapExceeded(std::size_t{1} << m, "oracle: too many sign vectors");
  for (long mask = 0; mask < (1L << m); ++mask) {
    VectorXd v(m);
    for (int i = 0; i < m; ++i) v(i) = (mask >> i) & 1 ? 1.0 : -1.0;
    out.push_back(v);
  }
  return out;
}

double dual_norm_closed_form(const VectorXd& a, double p) {
  const double q = p / (p - 1.0);
  return std::pow(a.cwiseAbs().array().pow(q).sum(), 1.0 / q);
}

// ---- support-type sets: balls around a list of centers ----

struct Balls {
  std::vector<VectorXd> centers;
  double radius;
  Norm norm;
};

// min over the ball of min_k piece value: exact by extreme points or the dual norm.
double concave_inner(const PiecewiseAffineRecourse& r, const VectorXd& x, const VectorXd& c, double radius, Norm p,
                     const std::vector<VectorXd>& unit) {
  double best = kInf;
  for (const auto& piece : r.pieces) {
    if (radius == 0.0) {
      best = std::min(best, piece_at(piece, x, c));
    } else if (p.kind == Norm::Kind::Real && r.xi_dim() > 1) {
      VectorXd a = piece.a.matrix * x + piece.a.offset;
      best = std::min(best, piece_at(piece, x, c) - radius * dual_norm_closed_form(a, p.p));
    } else {
      for (const auto& u : unit) best = std::min(best, piece_at(piece, x, c + radius * u));
    }
  }
  return best;
}

OracleValue concave_balls(const DFOProblem& problem, const Balls& balls, const OracleOptions& opt) {
  const auto& r = *pieces_of(problem);
  const int m = r.xi_dim();
  std::vector<VectorXd> unit;
  if (balls.norm.kind != Norm::Kind::Real || m == 1) unit = unit_ball_vertices(balls.norm, m);
  double best = kInf;
  for (const auto& x : decision_points(problem.decisions, opt.vertex_cap)) {
    double total = 0.0;
    for (const auto& c : balls.centers) total += concave_inner(r, x, c, balls.radius, balls.norm, unit);
    best = std::min(best, total / static_cast<double>(balls.centers.size()));
  }
  return {best, true, "decision vertices x ball extreme points", 0.0};
}

bool same_map(const AffineMap& a, const AffineMap& b) {
  return a.matrix.rows() == b.matrix.rows() && a.matrix.cols() == b.matrix.cols() && (a.matrix - b.matrix).isZero(0) &&
         (a.offset - b.offset).isZero(0);
}

bool map_constant(const AffineMap& a) { return a.matrix.size() == 0 || a.matrix.isZero(0); }

// ||a_k(x)||_inf constant over X: its minimum over X equals its maximum over the vertices.
std::optional<double> constant_inf_norm(const DFOProblem& problem, const AffineMap& a,
                                        const std::vector<VectorXd>& vertices) {
  double hi = 0.0;
  for (const auto& v : vertices) hi = std::max(hi, (a.matrix * v + a.offset).cwiseAbs().maxCoeff());
  ProgramBuilder b;
  auto x = decision_vars(b, problem.decisions);
  int t = b.add_var("t", 0.0, kInf);
  for (int i = 0; i < a.rows(); ++i) {
    LinExpr row(a.offset(i));
    for (int j = 0; j < a.cols(); ++j) row += a.matrix(i, j) * LinExpr::term(x[j]);
    b.add_ge(LinExpr::term(t), row);
    b.add_ge(LinExpr::term(t), -1.0 * row);
  }
  b.set_objective(LinExpr::term(t));
  double lo = lp_min(b);
  if (std::abs(hi - lo) <= 1e-9 * (1.0 + hi)) return hi;
  return std::nullopt;
}

// Tuples of ball vertices, one per center; each tuple is one LP.
OracleValue convex_patterns(const DFOProblem& problem, const Balls& balls) {
  const auto& r = *pieces_of(problem);
  auto unit = unit_ball_vertices(balls.norm, r.xi_dim());
  const int S = static_cast<int>(balls.centers.size());
  double count = std::pow(static_cast<double>(unit.size()), S);
  if (count > 20000) throw CapExceeded(static_cast<std::size_t>(count), "oracle: too many sign-pattern tuples");
  std::vector<int> idx(S, 0);
  double best = kInf;
  while (true) {
    std::vector<VectorXd> xis;
    for (int s = 0; s < S; ++s) xis.push_back(balls.centers[s] + balls.radius * unit[idx[s]]);
    best = std::min(best, convex_weighted(problem, xis, VectorXd::Constant(S, 1.0 / S)));
    int pos = 0;
    while (pos < S && ++idx[pos] == static_cast<int>(unit.size())) idx[pos++] = 0;
    if (pos == S) break;
  }
  return {best, true, "sign-pattern LPs", 0.0};
}

// F_s(x) = max over the K-simplex of sum_k lambda_k c_k(x) - theta * N(lambda); returns value and maximizer.
std::pair<double, VectorXd> lambda_lp(const PiecewiseAffineRecourse& r, const VectorXd& x, const VectorXd& c,
                                      double radius, Norm p, const std::optional<std::vector<double>>& block_norms) {
  const int K = r.num_pieces();
  const int m = r.xi_dim();
  ProgramBuilder b;
  auto lam = b.add_vars("lam", K, 0.0, 1.0);
  int w = b.add_var("w", 0.0, kInf);
  LinExpr sum, obj;
  for (int k = 0; k < K; ++k) {
    sum += LinExpr::term(lam[k]);
    obj += piece_at(r.pieces[k], x, c) * LinExpr::term(lam[k]);
  }
  b.add_eq(sum, 1.0);
  if (radius > 0.0) {
    if (block_norms) {
      for (int k = 0; k < K; ++k) b.add_ge(LinExpr::term(w), (*block_norms)[k] * LinExpr::term(lam[k]));
    } else {
      std::vector<LinExpr> comp(m);
      for (int k = 0; k < K; ++k) {
        for (int i = 0; i < m; ++i) comp[i] += r.pieces[k].a.offset(i) * LinExpr::term(lam[k]);
      }
      const bool dual_inf = p.kind == Norm::Kind::One || m == 1;
      LinExpr total;
      for (int i = 0; i < m; ++i) {
        if (dual_inf) {
          b.add_ge(LinExpr::term(w), comp[i]);
          b.add_ge(LinExpr::term(w), -1.0 * comp[i]);
        } else {
          int t = b.add_var("t", 0.0, kInf);
          b.add_ge(LinExpr::term(t), comp[i]);
          b.add_ge(LinExpr::term(t), -1.0 * comp[i]);
          total += LinExpr::term(t);
        }
      }
      if (!dual_inf) b.add_ge(LinExpr::term(w), total);
    }
    obj -= radius * LinExpr::term(w);
  }
  b.set_objective(-1.0 * obj);
  Solution s = solve_lp(b.build());
  if (!s.ok()) throw Error("oracle: lambda LP failed");
  VectorXd out(K + 1);
  for (int k = 0; k < K; ++k) out(k) = s.x(lam[k]);
  out(K) = s.x(w);
  return {-s.objective, out};
}

// Kelley cutting planes on the convex function (1/S) sum_s F_s.
OracleValue convex_kelley(const DFOProblem& problem, const Balls& balls,
                          const std::optional<std::vector<double>>& block_norms) {
  const auto& r = *pieces_of(problem);
  const int S = static_cast<int>(balls.centers.size());
  const int K = r.num_pieces();
  std::vector<std::vector<VectorXd>> cuts(S);  // stored lambda, w
  VectorXd x = decision_points(problem.decisions, 1000).front();
  double upper = kInf, lower = -kInf;
  for (int iter = 0; iter < 500; ++iter) {
    double total = 0.0;
    for (int s = 0; s < S; ++s) {
      auto [value, lw] = lambda_lp(r, x, balls.centers[s], balls.radius, balls.norm, block_norms);
      total += value;
      cuts[s].push_back(lw);
    }
    upper = std::min(upper, total / S);
    if (upper - lower <= 1e-10 * (1.0 + std::abs(upper))) break;
    ProgramBuilder b;
    auto xv = decision_vars(b, problem.decisions);
    LinExpr obj;
    for (int s = 0; s < S; ++s) {
      int eta = b.add_var("eta", -kInf, kInf);
      obj += (1.0 / S) * LinExpr::term(eta);
      for (const auto& lw : cuts[s]) {
        LinExpr cut(-balls.radius * lw(K));
        for (int k = 0; k < K; ++k) {
          if (lw(k) > 0.0) cut += lw(k) * piece_linear(r.pieces[k], balls.centers[s], xv);
        }
        b.add_ge(LinExpr::term(eta), cut);
      }
    }
    b.set_objective(obj);
    Solution sol = solve_lp(b.build());
    if (!sol.ok()) throw Error("oracle: Kelley master failed");
    lower = sol.objective;
    x = sol.x.head(problem.n());
  }
  if (upper - lower > 1e-7 * (1.0 + std::abs(upper))) throw Error("oracle: Kelley iterations did not converge");
  return {upper, true, "Kelley cutting planes", 0.0};
}

// Grid over X and over the ball; an upper bound on the true value.
OracleValue grid_balls(const DFOProblem& problem, const Balls& balls, const OracleOptions& opt) {
  const auto& r = *pieces_of(problem);
  const int n = problem.n(), m = r.xi_dim(), g = opt.grid_points;
  if (std::pow(g, n) > 1e5 || std::pow(g, m) > 1e4) throw CapExceeded(0, "oracle: grid too large");
  auto grid = [g](int dim, auto&& f) {
    std::vector<int> idx(dim, 0);
    while (true) {
      f(idx);
      int pos = 0;
      while (pos < dim && ++idx[pos] == g) idx[pos++] = 0;
      if (pos == dim) return;
    }
  };
  std::vector<VectorXd> ball;
  grid(m, [&](const std::vector<int>& idx) {
    VectorXd u(m);
    for (int i = 0; i < m; ++i) u(i) = -1.0 + 2.0 * idx[i] / (g - 1);
    if (balls.norm.value(u) <= 1.0 + 1e-12) ball.push_back(u);
  });
  double best = kInf;
  grid(n, [&](const std::vector<int>& idx) {
    VectorXd x(n);
    for (int j = 0; j < n; ++j) {
      x(j) = problem.decisions.lower(j) + (problem.decisions.upper(j) - problem.decisions.lower(j)) * idx[j] / (g - 1);
    }
    if (!problem.decisions.contains(x, 1e-9)) return;
    double total = 0.0;
    for (const auto& c : balls.centers) {
      double inner = kInf;
      for (const auto& u : ball) inner = std::min(inner, r.value(x, c + balls.radius * u));
      total += inner;
    }
    best = std::min(best, total / static_cast<double>(balls.centers.size()));
  });
  double width = (problem.decisions.upper - problem.decisions.lower).maxCoeff();
  return {best, false, "grid", std::max(width, 2.0 * balls.radius) / (g - 1)};
}

OracleValue convex_balls(const DFOProblem& problem, const Balls& balls, const OracleOptions& opt) {
  const auto& r = *pieces_of(problem);
  const int m = r.xi_dim();
  const Norm p = m == 1 ? Norm::one() : balls.norm;
  const Balls eff{balls.centers, balls.radius, p};
  bool constant = true, shared = true;
  for (const auto& piece : r.pieces) {
    constant = constant && map_constant(piece.a);
    shared = shared && same_map(piece.a, r.pieces.front().a);
  }
  if (balls.radius == 0.0 || (constant && p.kind != Norm::Kind::Real)) return convex_kelley(problem, eff, std::nullopt);
  if (p.kind == Norm::Kind::Real) return grid_balls(problem, eff, opt);
  if (shared) return convex_patterns(problem, eff);
  if (r.block_structure) {
    if (p.kind == Norm::Kind::Inf) return convex_patterns(problem, eff);
    auto vertices = decision_points(problem.decisions, opt.vertex_cap);
    std::vector<double> norms;
    for (int k = 0; k < r.num_pieces(); ++k) {
      auto c = constant_inf_norm(problem, r.pieces[k].a, vertices);
      if (!c) throw Error("oracle: p = 1 block structure with a varying block norm");
      norms.push_back(*c);
    }
    return convex_kelley(problem, eff, norms);
  }
  throw Error("oracle: no exact route for this convex instance");
}

// ---- scenario-based sets ----

struct WeightSet {
  std::vector<VectorXd> scenarios;
  std::vector<VectorXd> vertices;
};

WeightSet weight_vertices(const DFOProblem& problem, const OracleOptions& opt) {
  WeightSet out;
  std::visit(Overload{
                 [&](const FinitePolyhedral& s) {
                   const int N = static_cast<int>(s.scenarios.size());
                   out.scenarios = s.scenarios;
                   MatrixXd A = s.D.rows() > 0 ? s.D : MatrixXd::Zero(0, N);
                   out.vertices = enumerate_vertices(A, s.d, MatrixXd::Ones(1, N), VectorXd::Ones(1),
                                                     VectorXd::Zero(N), VectorXd::Ones(N), opt.vertex_cap)
                                      .vertices;
                 },
                 [&](const IntervalPolyhedral& s) {
                   const int N = static_cast<int>(s.scenarios.size());
                   out.scenarios = s.scenarios;
                   VectorXd l = s.lbar.cast<double>() / s.q, u = s.ubar.cast<double>() / s.q;
                   auto psi = enumerate_vertices(MatrixXd::Zero(0, N), VectorXd::Zero(0), MatrixXd::Ones(1, N),
                                                 VectorXd::Zero(1), l, u, opt.vertex_cap)
                                  .vertices;
                   for (const auto& v : psi) out.vertices.push_back(s.p0 + v);
                 },
                 [&](const L2Ball& s) {
                   if (s.radius != 0.0) throw Error("oracle: no exact route for an L2 ball of positive radius");
                   out.scenarios = s.scenarios;
                   out.vertices = {s.p0};
                 },
                 [&](const auto&) { throw Error("oracle: not a scenario-based set"); },
             },
             problem.ambiguity);
  if (out.vertices.empty()) throw Error("oracle: empty ambiguity set");
  return out;
}

double favorable_value(const DFOProblem& problem, const WeightSet& ws, const OracleOptions& opt) {
  double best = kInf;
  if (convex_in_x(problem)) {
    for (const auto& g : ws.vertices) best = std::min(best, convex_weighted(problem, ws.scenarios, g));
    return best;
  }
  for (const auto& x : decision_points(problem.decisions, opt.vertex_cap)) {
    VectorXd q(ws.scenarios.size());
    for (std::size_t i = 0; i < ws.scenarios.size(); ++i) q(i) = evaluate_recourse(problem, x, ws.scenarios[i]);
    for (const auto& g : ws.vertices) best = std::min(best, g.dot(q));
  }
  return best;
}

// min_x lambda * sum_i g_i v_i + (1 - lambda) * max_{g'} sum_i g'_i v_i, minimized over favorable vertices g.
double hurwicz_value(const DFOProblem& problem, const WeightSet& ws, double lambda) {
  if (!convex_in_x(problem)) throw Error("oracle: Hurwicz route needs recourse convex in x");
  const int N = static_cast<int>(ws.scenarios.size());
  auto one = [&](const VectorXd* g) {
    ProgramBuilder b;
    auto x = decision_vars(b, problem.decisions);
    std::vector<int> v;
    for (int i = 0; i < N; ++i) v.push_back(convex_epigraph(b, problem, x, ws.scenarios[i]));
    int w = b.add_var("w", -kInf, kInf);
    for (const auto& gp : ws.vertices) {
      LinExpr row;
      for (int i = 0; i < N; ++i) {
        if (gp(i) != 0.0) row += gp(i) * LinExpr::term(v[i]);
      }
      b.add_ge(LinExpr::term(w), row);
    }
    LinExpr obj = (1.0 - lambda) * LinExpr::term(w);
    if (g) {
      for (int i = 0; i < N; ++i) {
        if ((*g)(i) != 0.0) obj += (lambda * (*g)(i)) * LinExpr::term(v[i]);
      }
    }
    b.set_objective(obj);
    return lp_min(b);
  };
  if (lambda == 0.0) return one(nullptr);
  double best = kInf;
  for (const auto& g : ws.vertices) best = std::min(best, one(&g));
  return best;
}

}  // namespace

VertexSet enumerate_vertices(const MatrixXd& A, const VectorXd& b, const MatrixXd& Aeq, const VectorXd& beq,
                             const VectorXd& lower, const VectorXd& upper, std::size_t cap) {
  const int n = static_cast<int>(lower.size());
  std::vector<Eigen::RowVectorXd> grow;
  std::vector<double> hrow;
  for (int i = 0; i < A.rows(); ++i) {
    grow.push_back(A.row(i));
    hrow.push_back(b(i));
  }
  for (int j = 0; j < n; ++j) {
    if (std::isfinite(lower(j))) {
      grow.push_back(-Eigen::RowVectorXd::Unit(n, j));
      hrow.push_back(-lower(j));
    }
    if (std::isfinite(upper(j))) {
      grow.push_back(Eigen::RowVectorXd::Unit(n, j));
      hrow.push_back(upper(j));
    }
  }
  const int G = static_cast<int>(grow.size());
  const int E = static_cast<int>(Aeq.rows());
  const int rank = E > 0 ? static_cast<int>(Eigen::FullPivLU<MatrixXd>(Aeq).rank()) : 0;
  const int k = n - rank;
  if (choose(G, k) > 5e6) throw CapExceeded(0, "oracle: too many candidate active sets");
  VertexSet out;
  out.source = std::to_string(G) + " inequalities, " + std::to_string(E) + " equalities in dimension " +
               std::to_string(n);
  subsets(G, k, [&](const std::vector<int>& S) {
    MatrixXd M(E + k, n);
    VectorXd rhs(E + k);
    if (E > 0) {
      M.topRows(E) = Aeq;
      rhs.head(E) = beq;
    }
    for (int r = 0; r < k; ++r) {
      M.row(E + r) = grow[S[r]];
      rhs(E + r) = hrow[S[r]];
    }
    Eigen::ColPivHouseholderQR<MatrixXd> qr(M);
    qr.setThreshold(1e-10);
    if (qr.rank() < n) return;
    VectorXd x = qr.solve(rhs);
    if ((M * x - rhs).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + rhs.cwiseAbs().maxCoeff())) return;
    for (int r = 0; r < G; ++r) {
      if (grow[r].dot(x) > hrow[r] + 1e-7) return;
    }
    for (const auto& v : out.vertices) {
      if ((v - x).cwiseAbs().maxCoeff() <= 1e-7) return;
    }
    out.vertices.push_back(x);
    if (out.vertices.size() > cap) throw CapExceeded(out.vertices.size(), "oracle: vertex cap exceeded");
  });
  return out;
}

OracleValue oracle_value(const DFOProblem& problem, const OracleOptions& options) {
  return std::visit(
      Overload{
          [&](const SupportBall& s) {
            if (!pieces_of(problem)) throw Error("oracle: support ball needs piecewise recourse");
            Balls balls{{s.center}, s.radius, s.norm};
            return pieces_of(problem)->mode == RecourseMode::ConcaveMin ? concave_balls(problem, balls, options)
                                                                         : convex_balls(problem, balls, options);
          },
          [&](const WassersteinInf& w) {
            if (!pieces_of(problem)) throw Error("oracle: Wasserstein ball needs piecewise recourse");
            Balls balls{w.samples, w.radius, w.norm};
            return pieces_of(problem)->mode == RecourseMode::ConcaveMin ? concave_balls(problem, balls, options)
                                                                         : convex_balls(problem, balls, options);
          },
          [&](const auto&) {
            WeightSet ws = weight_vertices(problem, options);
            if (problem.hurwicz_lambda && *problem.hurwicz_lambda < 1.0) {
              return OracleValue{hurwicz_value(problem, ws, *problem.hurwicz_lambda), true,
                                 "weight vertices with robust epigraph", 0.0};
            }
            return OracleValue{favorable_value(problem, ws, options), true, "weight vertices", 0.0};
          },
      },
      problem.ambiguity);
}

GreedyResult greedy_interval_inf(const VectorXd& values, const VectorXd& p0, const VectorXd& l, const VectorXd& u) {
  const int N = static_cast<int>(values.size());
  VectorXd floor = p0 + l, cap = p0 + u;
  if ((floor.array() < -1e-12).any()) throw InfeasibleWeights("greedy: p0 + l has a negative entry");
  if (floor.sum() > 1.0 + 1e-12 || cap.sum() < 1.0 - 1e-12) throw InfeasibleWeights("greedy: no weight vector sums to 1");
  std::vector<int> order(N);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return values(a) < values(b); });
  GreedyResult out;
  out.weights = floor.cwiseMax(0.0);
  double mass = 1.0 - out.weights.sum();
  for (int i : order) {
    if (mass <= 0.0) break;
    double add = std::min(cap(i) - out.weights(i), mass);
    out.weights(i) += add;
    mass -= add;
  }
  out.value = out.weights.dot(values);
  return out;
}

bool check_midpoint_certificate(const std::function<bool(const VectorXd&)>& membership,
                                const std::vector<VectorXd>& points) {
  if (points.size() < 3) return false;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!membership(points[i])) return false;
    for (std::size_t j = 0; j < i; ++j) {
      if ((points[i] - points[j]).cwiseAbs().maxCoeff() <= 1e-12) return false;
      if (membership(0.5 * (points[i] + points[j]))) return false;
    }
  }
  return true;
}

HardnessInstance gen_hardness_instance(const HardnessKind& kind) {
  return std::visit(
      Overload{
          [](const SetPartition& s) {
            const int N = static_cast<int>(s.w.size());
            HardnessInstance out;
            MatrixXd D(2, N);
            D << s.w.transpose(), -s.w.transpose();
            out.problem.decisions = {D, VectorXd::Zero(2), VectorXd::Constant(N, -1.0), VectorXd::Constant(N, 1.0)};
            PiecewiseAffineRecourse r;
            r.pieces = {{AffineMap(MatrixXd::Identity(N, N), VectorXd::Zero(N)),
                         AffineMap(MatrixXd::Zero(1, N), VectorXd::Zero(1))}};
            r.mode = RecourseMode::ConcaveMin;
            out.problem.recourse = r;
            out.problem.ambiguity = SupportBall{VectorXd::Zero(N), 1.0, Norm::inf()};
            out.threshold = -static_cast<double>(N);
            out.description = "set partition: value -N iff the weights split evenly";
            return out;
          },
          [](const NormMax& s) {
            const int n = static_cast<int>(s.D.cols());
            HardnessInstance out;
            out.problem.decisions = {s.D, s.d, VectorXd::Constant(n, -s.bound), VectorXd::Constant(n, s.bound)};
            PiecewiseAffineRecourse r;
            r.pieces = {{AffineMap(MatrixXd::Identity(n, n), VectorXd::Zero(n)),
                         AffineMap(MatrixXd::Zero(1, n), VectorXd::Zero(1))}};
            r.mode = RecourseMode::ConcaveMin;
            out.problem.recourse = r;
            out.problem.ambiguity = SupportBall{VectorXd::Zero(n), 1.0, s.p};
            out.description = "norm maximization: value is minus the largest dual norm over the polytope";
            return out;
          },
          [](const BinaryFeasibility& s) {
            const int n = static_cast<int>(s.D.cols());
            HardnessInstance out;
            out.problem.decisions = {s.D, s.d, VectorXd::Constant(n, -1.0), VectorXd::Constant(n, 1.0)};
            PiecewiseAffineRecourse r;
            for (double sign : {1.0, -1.0}) {
              for (int k = 0; k < n; ++k) {
                MatrixXd A = MatrixXd::Zero(n, n);
                A(k, k) = sign;
                r.pieces.push_back({AffineMap(A, VectorXd::Zero(n)), AffineMap(MatrixXd::Zero(1, n), VectorXd::Ones(1))});
              }
            }
            r.mode = RecourseMode::ConcaveMin;
            out.problem.recourse = r;
            WassersteinInf w;
            for (int i = 0; i < n; ++i) w.samples.push_back(VectorXd::Unit(n, i));
            w.radius = 0.0;
            w.norm = Norm::one();
            out.problem.ambiguity = w;
            out.threshold = 0.0;
            out.description = "binary feasibility: value 0 iff some x in {-1,1}^n satisfies D x <= d";
            return out;
          },
      },
      kind);
}

}  // namespace dfo::oracle
