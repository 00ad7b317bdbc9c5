#include "dfo/model.hpp"

#include "dfo/milp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dfo {

namespace {

template <typename... Ts>
struct Overload : Ts... {
  using Ts::operator()...;
};
template <typename... Ts>
Overload(Ts...) -> Overload<Ts...>;

// Rows i, j with D_i = -D_j and d_i = -d_j encode one equality.
std::vector<int> paired_rows(const MatrixXd& D, const VectorXd& d) {
  std::vector<int> partner(D.rows(), -1);
  for (int i = 0; i < D.rows(); ++i) {
    for (int j = i + 1; j < D.rows() && partner[i] < 0; ++j) {
      if (partner[j] >= 0) continue;
      if ((D.row(i) + D.row(j)).isZero(1e-12) && std::abs(d(i) + d(j)) <= 1e-12) {
        partner[i] = j;
        partner[j] = i;
      }
    }
  }
  return partner;
}

bool decision_set_nonempty(const DecisionSet& X) {
  const int n = X.dim();
  const int r = static_cast<int>(X.ineq_rhs.size());
  auto partner = paired_rows(X.ineq_matrix, X.ineq_rhs);
  LinearProgram lp;
  lp.objective = VectorXd::Zero(n);
  lp.rows = X.ineq_matrix;
  lp.rhs = X.ineq_rhs;
  lp.senses.assign(r, RowSense::LessEqual);
  for (int i = 0; i < r; ++i) {
    if (partner[i] < 0) {
      lp.rhs(i) -= 1e-7;
    } else if (partner[i] > i) {
      lp.senses[i] = RowSense::Equal;
    } else {
      lp.rows.row(i).setZero();
      lp.rhs(i) = 0;
    }
  }
  lp.lower = X.lower;
  lp.upper = X.upper;
  lp.integer.assign(n, false);
  return solve_lp(lp).ok();
}

void check_map(const AffineMap& map, long rows, long cols, const std::string& what, std::vector<std::string>& out) {
  if (map.matrix.rows() != map.offset.size()) out.push_back(what + ": matrix rows differ from offset length");
  if (map.offset.size() != rows) out.push_back(what + ": output dimension " + std::to_string(map.offset.size()) +
                                                 " expected " + std::to_string(rows));
  if (map.matrix.cols() != cols) out.push_back(what + ": input dimension mismatch");
  if (!map.matrix.allFinite() || !map.offset.allFinite()) out.push_back(what + ": non-finite entries");
}

}  // namespace

bool DecisionSet::contains(const VectorXd& x, double tol) const {
  if (x.size() != dim()) return false;
  for (int j = 0; j < dim(); ++j) {
    if (x(j) < lower(j) - tol || x(j) > upper(j) + tol) return false;
  }
  if (ineq_rhs.size() > 0) {
    VectorXd r = ineq_matrix * x - ineq_rhs;
    if (r.maxCoeff() > tol) return false;
  }
  return true;
}

double PiecewiseAffineRecourse::piece_value(int k, const VectorXd& x, const VectorXd& xi) const {
  const auto& piece = pieces[k];
  return xi.dot(piece.a(x)) + piece.b(x)(0);
}

double PiecewiseAffineRecourse::value(const VectorXd& x, const VectorXd& xi) const {
  double best = mode == RecourseMode::ConcaveMin ? kInf : -kInf;
  for (int k = 0; k < num_pieces(); ++k) {
    double v = piece_value(k, x, xi);
    best = mode == RecourseMode::ConcaveMin ? std::min(best, v) : std::max(best, v);
  }
  return best;
}

int DFOProblem::xi_dim() const {
  return std::visit([](const auto& r) { return r.xi_dim(); }, recourse);
}

double evaluate_recourse(const Recourse& recourse, const VectorXd& x, const VectorXd& xi) {
  return std::visit(Overload{
                        [&](const PiecewiseAffineRecourse& r) { return r.value(x, xi); },
                        [&](const LPRecourse& r) {
                          LinearProgram lp;
                          const int ny = r.num_second_stage();
                          lp.objective = r.cost;
                          lp.rows = r.recourse_matrix;
                          lp.rhs = r.rhs - r.tech_x * x - r.tech_xi * xi;
                          lp.senses = r.senses;
                          lp.lower = r.lower;
                          lp.upper = VectorXd::Constant(ny, kInf);
                          lp.integer.assign(ny, false);
                          Solution s = solve_lp(lp);
                          if (s.status == SolveStatus::Infeasible) throw InfeasibleRecourse("recourse LP infeasible");
                          if (s.status != SolveStatus::Optimal) throw Error("recourse LP unbounded");
                          return s.objective;
                        },
                    },
                    recourse);
}

double evaluate_recourse(const DFOProblem& problem, const VectorXd& x, const VectorXd& xi) {
  if (x.size() != problem.n() || xi.size() != problem.xi_dim()) {
    throw std::invalid_argument("evaluate_recourse: dimension mismatch");
  }
  return evaluate_recourse(problem.recourse, x, xi);
}

const std::vector<VectorXd>* scenarios_of(const AmbiguitySet& set) {
  return std::visit(Overload{
                        [](const FinitePolyhedral& s) -> const std::vector<VectorXd>* { return &s.scenarios; },
                        [](const IntervalPolyhedral& s) -> const std::vector<VectorXd>* { return &s.scenarios; },
                        [](const L2Ball& s) -> const std::vector<VectorXd>* { return &s.scenarios; },
                        [](const auto&) -> const std::vector<VectorXd>* { return nullptr; },
                    },
                    set);
}

std::vector<VectorXd> enumerate_polytope_vertices(const MatrixXd& A, const VectorXd& b, const MatrixXd& Aeq,
                                                  const VectorXd& beq, const VectorXd& lower,
                                                  const VectorXd& upper, std::size_t max_vertices,
                                                  double max_candidates) {
  const int n = static_cast<int>(lower.size());
  // Independent equality rows.
  MatrixXd E(0, n);
  VectorXd e(0);
  for (int i = 0; i < Aeq.rows(); ++i) {
    MatrixXd trial(E.rows() + 1, n);
    trial << E, Aeq.row(i);
    Eigen::FullPivLU<MatrixXd> lu(trial);
    lu.setThreshold(1e-10);
    if (lu.rank() > E.rows()) {
      E = trial;
      VectorXd f(e.size() + 1);
      f << e, beq(i);
      e = f;
    }
  }
  // Inequality candidates: rows of A, finite lower and upper bounds.
  std::vector<VectorXd> G;
  std::vector<double> g;
  for (int i = 0; i < A.rows(); ++i) {
    G.push_back(A.row(i).transpose());
    g.push_back(b(i));
  }
  for (int j = 0; j < n; ++j) {
    if (std::isfinite(lower(j))) {
      G.push_back(-VectorXd::Unit(n, j));
      g.push_back(-lower(j));
    }
    if (std::isfinite(upper(j))) {
      G.push_back(VectorXd::Unit(n, j));
      g.push_back(upper(j));
    }
  }
  const int total = static_cast<int>(G.size());
  const int k = n - static_cast<int>(E.rows());
  std::vector<VectorXd> out;
  if (k < 0 || k > total) return out;

  double combos = 1.0;
  for (int i = 0; i < k; ++i) combos = combos * (total - i) / (i + 1);
  if (combos > max_candidates) {
    throw CapExceeded(static_cast<std::size_t>(combos),
                      "vertex enumeration: " + std::to_string(static_cast<long long>(combos)) + " active sets");
  }

  auto feasible = [&](const VectorXd& x) {
    for (int i = 0; i < total; ++i) {
      if (G[i].dot(x) > g[i] + 1e-7 * (1.0 + std::abs(g[i]))) return false;
    }
    for (int i = 0; i < E.rows(); ++i) {
      if (std::abs(E.row(i).dot(x) - e(i)) > 1e-7 * (1.0 + std::abs(e(i)))) return false;
    }
    return true;
  };

  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  MatrixXd M(n, n);
  VectorXd rhs(n);
  while (true) {
    M.topRows(E.rows()) = E;
    rhs.head(E.rows()) = e;
    for (int i = 0; i < k; ++i) {
      M.row(E.rows() + i) = G[idx[i]].transpose();
      rhs(E.rows() + i) = g[idx[i]];
    }
    Eigen::FullPivLU<MatrixXd> lu(M);
    lu.setThreshold(1e-10);
    if (n == 0 || lu.isInvertible()) {
      VectorXd x = n == 0 ? VectorXd(0) : VectorXd(lu.solve(rhs));
      if (feasible(x)) {
        bool dup = std::any_of(out.begin(), out.end(),
                               [&](const VectorXd& v) { return (v - x).cwiseAbs().maxCoeff() <= 1e-7; });
        if (!dup) {
          out.push_back(x);
          if (out.size() > max_vertices) {
            throw CapExceeded(out.size(), "vertex enumeration: more than " + std::to_string(max_vertices) + " vertices");
          }
        }
      }
    }
    int pos = k - 1;
    while (pos >= 0 && idx[pos] == total - k + pos) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (int i = pos + 1; i < k; ++i) idx[i] = idx[i - 1] + 1;
  }
  return out;
}

std::vector<VectorXd> decision_vertices(const DecisionSet& X, std::size_t cap) {
  return enumerate_polytope_vertices(X.ineq_matrix, X.ineq_rhs, MatrixXd::Zero(0, X.dim()), VectorXd::Zero(0),
                                     X.lower, X.upper, cap);
}

ValidationReport validate(const DFOProblem& problem) {
  ValidationReport report;
  auto& out = report.violations;
  const DecisionSet& X = problem.decisions;
  const int n = X.dim();

  bool x_ok = true;
  if (X.upper.size() != n) {
    out.push_back("decisions: lower and upper lengths differ");
    x_ok = false;
  } else if (!X.lower.allFinite() || !X.upper.allFinite()) {
    out.push_back("decisions: bounds must be finite");
    x_ok = false;
  } else if ((X.lower.array() > X.upper.array()).any()) {
    out.push_back("decisions: l <= u fails");
    x_ok = false;
  }
  if (X.ineq_matrix.rows() != X.ineq_rhs.size() || (X.ineq_matrix.rows() > 0 && X.ineq_matrix.cols() != n)) {
    out.push_back("decisions: inequality shape mismatch");
    x_ok = false;
  }
  if (x_ok && !decision_set_nonempty(X)) out.push_back("decisions: polytope empty or without interior");

  int m = -1;
  std::visit(Overload{
                 [&](const PiecewiseAffineRecourse& r) {
                   if (r.pieces.empty()) {
                     out.push_back("recourse: K >= 1 fails");
                     return;
                   }
                   m = r.xi_dim();
                   for (int k = 0; k < r.num_pieces(); ++k) {
                     check_map(r.pieces[k].a, m, n, "recourse.pieces[" + std::to_string(k) + "].a", out);
                     check_map(r.pieces[k].b, 1, n, "recourse.pieces[" + std::to_string(k) + "].b", out);
                   }
                   if (!r.block_structure) return;
                   const auto& groups = *r.block_structure;
                   if (static_cast<int>(groups.size()) != r.num_pieces()) {
                     out.push_back("recourse: block_structure needs one group per piece");
                     return;
                   }
                   std::vector<int> owner(m, -1);
                   int count = 0;
                   for (int k = 0; k < static_cast<int>(groups.size()); ++k) {
                     for (int i : groups[k]) {
                       if (i < 0 || i >= m) {
                         out.push_back("recourse: block index out of range");
                         return;
                       }
                       if (owner[i] >= 0) out.push_back("recourse: blocks overlap at index " + std::to_string(i));
                       owner[i] = k;
                       ++count;
                     }
                   }
                   if (count != m) out.push_back("recourse: blocks do not cover the uncertainty");
                   for (int k = 0; k < r.num_pieces(); ++k) {
                     const auto& a = r.pieces[k].a;
                     if (a.rows() != m) continue;
                     for (int i = 0; i < m; ++i) {
                       if (owner[i] == k) continue;
                       if (a.offset(i) != 0.0 || !a.row_is_constant(i)) {
                         out.push_back("recourse: piece " + std::to_string(k) + " has nonzero row " +
                                       std::to_string(i) + " outside its block");
                       }
                     }
                   }
                 },
                 [&](const LPRecourse& r) {
                   m = r.xi_dim();
                   const int ny = r.num_second_stage();
                   const int rows = r.num_rows();
                   if (r.recourse_matrix.rows() != rows || r.recourse_matrix.cols() != ny)
                     out.push_back("recourse: recourse_matrix shape");
                   if (r.tech_x.rows() != rows || r.tech_x.cols() != n) out.push_back("recourse: tech_x shape");
                   if (r.tech_xi.rows() != rows) out.push_back("recourse: tech_xi shape");
                   if (static_cast<int>(r.senses.size()) != rows) out.push_back("recourse: senses length");
                   if (r.lower.size() != ny) out.push_back("recourse: lower length");
                 },
             },
             problem.recourse);

  auto check_points = [&](const std::vector<VectorXd>& pts, const std::string& what) {
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (pts[i].size() != m) out.push_back(what + "[" + std::to_string(i) + "]: dimension mismatch");
      else if (!pts[i].allFinite()) out.push_back(what + "[" + std::to_string(i) + "]: non-finite");
    }
  };
  bool scenario_based = false;
  std::visit(Overload{
                 [&](const SupportBall& s) {
                   check_points({s.center}, "ambiguity.center");
                   if (!(s.radius >= 0) || !std::isfinite(s.radius)) out.push_back("ambiguity: radius >= 0 fails");
                 },
                 [&](const WassersteinInf& s) {
                   if (s.samples.empty()) out.push_back("ambiguity: samples empty");
                   check_points(s.samples, "ambiguity.samples");
                   if (!(s.radius >= 0) || !std::isfinite(s.radius)) out.push_back("ambiguity: radius >= 0 fails");
                 },
                 [&](const FinitePolyhedral& s) {
                   scenario_based = true;
                   const int N = static_cast<int>(s.scenarios.size());
                   if (N == 0) {
                     out.push_back("ambiguity: scenarios empty");
                     return;
                   }
                   check_points(s.scenarios, "ambiguity.scenarios");
                   if (s.D.rows() != s.d.size() || (s.D.rows() > 0 && s.D.cols() != N)) {
                     out.push_back("ambiguity: D shape mismatch");
                     return;
                   }
                   if (s.big_m && !(*s.big_m >= 0 && std::isfinite(*s.big_m))) out.push_back("ambiguity: big_m invalid");
                   LinearProgram lp;
                   lp.objective = VectorXd::Zero(N);
                   lp.rows.resize(s.D.rows() + 1, N);
                   lp.rows.topRows(s.D.rows()) = s.D;
                   lp.rows.row(s.D.rows()).setOnes();
                   lp.rhs.resize(s.D.rows() + 1);
                   lp.rhs << s.d, 1.0;
                   lp.senses.assign(s.D.rows(), RowSense::LessEqual);
                   lp.senses.push_back(RowSense::Equal);
                   lp.lower = VectorXd::Zero(N);
                   lp.upper = VectorXd::Constant(N, kInf);
                   lp.integer.assign(N, false);
                   if (!solve_lp(lp).ok()) out.push_back("ambiguity: ambiguity polytope empty");
                 },
                 [&](const IntervalPolyhedral& s) {
                   scenario_based = true;
                   const int N = static_cast<int>(s.scenarios.size());
                   check_points(s.scenarios, "ambiguity.scenarios");
                   if (N == 0 || s.p0.size() != N || s.lbar.size() != N || s.ubar.size() != N) {
                     out.push_back("ambiguity: interval vectors must match the scenario count");
                     return;
                   }
                   if (s.q <= 0) out.push_back("ambiguity: q must be positive");
                   if ((s.p0.array() < 0).any()) out.push_back("ambiguity: p0 >= 0 fails");
                   if (std::abs(s.p0.sum() - 1.0) > 1e-9) out.push_back("ambiguity: p0 must sum to 1");
                   if ((s.lbar.array() > s.ubar.array()).any()) out.push_back("ambiguity: lbar <= ubar fails");
                   if (s.q > 0) {
                     VectorXd l = s.lbar.cast<double>() / s.q, u = s.ubar.cast<double>() / s.q;
                     if (((l + s.p0).array() < -1e-12).any()) out.push_back("ambiguity: lbar/q >= -p0 fails");
                     if (l.sum() > 1e-12 || u.sum() < -1e-12) out.push_back("ambiguity: interval set empty");
                   }
                 },
                 [&](const L2Ball& s) {
                   scenario_based = true;
                   const int N = static_cast<int>(s.scenarios.size());
                   check_points(s.scenarios, "ambiguity.scenarios");
                   if (N == 0 || s.p0.size() != N) {
                     out.push_back("ambiguity: p0 must match the scenario count");
                     return;
                   }
                   if ((s.p0.array() - 1.0 / N).abs().maxCoeff() > 1e-12) out.push_back("ambiguity: p0 = e/N fails");
                   if (!(s.radius >= 0) || !std::isfinite(s.radius)) out.push_back("ambiguity: radius >= 0 fails");
                 },
             },
             problem.ambiguity);

  if (std::holds_alternative<LPRecourse>(problem.recourse) && !scenario_based) {
    out.push_back("recourse: LP recourse requires a scenario-based ambiguity set");
  }
  if (problem.hurwicz_lambda && !(*problem.hurwicz_lambda >= 0.0 && *problem.hurwicz_lambda <= 1.0)) {
    out.push_back("hurwicz_lambda: must lie in [0, 1]");
  }

  if (report.ok() && std::holds_alternative<LPRecourse>(problem.recourse)) {
    std::vector<VectorXd> xs;
    try {
      xs = decision_vertices(X, 64);
    } catch (const CapExceeded&) {
      xs = {X.lower, X.upper};
    }
    if (xs.size() > 64) xs.resize(64);
    const auto* scen = scenarios_of(problem.ambiguity);
    for (const auto& x : xs) {
      for (std::size_t i = 0; i < scen->size(); ++i) {
        try {
          evaluate_recourse(problem.recourse, x, (*scen)[i]);
        } catch (const Error& e) {
          out.push_back("recourse: scenario " + std::to_string(i) + ": " + e.what());
          return report;
        }
      }
    }
  }
  return report;
}

}  // namespace dfo
