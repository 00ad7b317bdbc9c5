#include "internal.hpp"

#include <algorithm>
#include <cmath>

namespace dfo {

namespace detail {
namespace {

using ValueFn = std::function<double(const VectorXd&)>;

bool midpoints_outside(const std::vector<VectorXd>& points, const std::function<bool(const VectorXd&)>& member) {
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!member(points[i])) return false;
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      if ((points[i] - points[j]).norm() <= 1e-12) return false;
      if (member(0.5 * (points[i] + points[j]))) return false;
    }
  }
  return points.size() >= 3;
}

// Epigraph of f, with a small tolerance on the value.
std::function<bool(const VectorXd&)> epigraph_of(ValueFn f) {
  return [f](const VectorXd& y) {
    const Eigen::Index n = y.size() - 1;
    double v = f(y.head(n));
    return y(n) >= v - 1e-10 * (1.0 + std::abs(v));
  };
}

VectorXd lift(const VectorXd& x, double t) {
  VectorXd y(x.size() + 1);
  y << x, t;
  return y;
}

// Points (x, f(x)) along a short segment of X where f is strictly concave.
std::optional<Witness> segment_witness(const DecisionSet& X, ValueFn f, const std::string& description) {
  std::vector<VectorXd> vertices;
  try {
    vertices = decision_vertices(X, 256);
  } catch (const CapExceeded&) {
    vertices.push_back(0.5 * (X.lower + X.upper));
  }
  if (vertices.empty()) return std::nullopt;
  VectorXd center = VectorXd::Zero(X.dim());
  for (const auto& v : vertices) center += v;
  center /= static_cast<double>(vertices.size());

  std::vector<VectorXd> directions;
  for (std::size_t i = 0; i < vertices.size() && directions.size() < 64; ++i) {
    VectorXd dv = vertices[i] - center;
    if (dv.norm() > 1e-9) directions.push_back(dv.normalized());
  }
  for (int j = 0; j < X.dim(); ++j) directions.push_back(VectorXd::Unit(X.dim(), j));

  const double width = std::max(1e-9, (X.upper - X.lower).maxCoeff());
  auto member = epigraph_of(f);
  for (const auto& d : directions) {
    for (double h = 0.25 * width; h > 1e-4 * width; h *= 0.4) {
      std::vector<VectorXd> points;
      bool inside = true;
      for (int i = 0; i < 8 && inside; ++i) {
        VectorXd x = center + (h * (-1.0 + 2.0 * i / 7.0)) * d;
        inside = X.contains(x, 1e-9);
        if (inside) points.push_back(lift(x, f(x)));
      }
      if (!inside) continue;
      if (midpoints_outside(points, member)) return Witness{points, member, description};
    }
  }
  return std::nullopt;
}

double piece_inf(const AffinePiece& piece, const VectorXd& center, double radius, Norm dual, const VectorXd& x) {
  VectorXd a = piece.a(x);
  return center.dot(a) + piece.b(x)(0) - radius * dual.value(a);
}

}  // namespace

Witness concave_witness(const DFOProblem& problem, const std::vector<VectorXd>& centers, double radius, Norm norm) {
  const auto& rec = piecewise(problem, "Lemma 2.1");
  const Norm dual = effective_norm(norm, rec.xi_dim()).dual();
  ValueFn f = [rec, centers, radius, dual](const VectorXd& x) {
    double total = 0.0;
    for (const auto& c : centers) {
      double best = kInf;
      for (const auto& piece : rec.pieces) best = std::min(best, piece_inf(piece, c, radius, dual, x));
      total += best;
    }
    return total / static_cast<double>(centers.size());
  };
  auto w = segment_witness(problem.decisions, f, "graph points of the optimal value function along a segment of X");
  if (w) return *w;
  return Witness{{}, epigraph_of(f), "no strictly concave segment found"};
}

Witness convex_witness(const DFOProblem& problem, const VectorXd& center, double radius, Norm norm) {
  const auto& rec = piecewise(problem, "Lemma 2.1");
  const Norm dual = effective_norm(norm, rec.xi_dim()).dual();
  for (int k = 0; k < rec.num_pieces(); ++k) {
    if (rec.pieces[k].a.is_constant()) continue;
    const AffinePiece piece = rec.pieces[k];
    ValueFn f = [piece, center, radius, dual](const VectorXd& x) { return piece_inf(piece, center, radius, dual, x); };
    auto w = segment_witness(problem.decisions, f,
                             "graph points of the worst-case value of piece " + std::to_string(k) +
                                 " along a segment of X");
    if (w) return *w;
  }
  return Witness{{}, [](const VectorXd&) { return false; }, "no strictly concave segment found"};
}

Witness l2_ball_witness(int N, double theta) {
  ValueFn f = [N, theta](const VectorXd& x) {
    VectorXd y = N * x - VectorXd::Constant(N, x.sum());
    return (x.array() - 1.0).sum() / N - theta / N * y.norm();
  };
  // Orthonormal pair orthogonal to e.
  VectorXd u1 = VectorXd::Zero(N), u2 = VectorXd::Zero(N);
  u1(0) = 1.0;
  u1(1) = -1.0;
  u1.normalize();
  u2(0) = 1.0;
  u2(1) = 1.0;
  u2(2) = -2.0;
  u2.normalize();
  const VectorXd center = VectorXd::Constant(N, 0.5);
  const double r = 0.2;
  std::vector<VectorXd> points;
  for (int i = 0; i < 8; ++i) {
    double phi = 2.0 * M_PI * i / 8.0;
    VectorXd x = center + r * (std::cos(phi) * u1 + std::sin(phi) * u2);
    points.push_back(lift(x, f(x)));
  }
  return Witness{points, epigraph_of(f), "graph points of the reduced value function on a circle orthogonal to e"};
}

}  // namespace detail

namespace {

Verdict from_route(const detail::ConvexRoute& route, const std::string& suffix) {
  return {route.status, route.citation + suffix, route.detail, std::nullopt};
}

bool constant_maps(const PiecewiseAffineRecourse& rec) {
  return std::all_of(rec.pieces.begin(), rec.pieces.end(), [](const AffinePiece& p) { return p.a.is_constant(); });
}

Verdict classify_concave_ball(const DFOProblem& problem, const PiecewiseAffineRecourse& rec, const VectorXd& center,
                              double radius, Norm norm) {
  const Norm p = effective_norm(norm, rec.xi_dim());
  if (radius == 0.0 || constant_maps(rec)) {
    return {VerdictStatus::Tractable, "Thm 3.1(i)", "uncertainty coefficients with decision-independent dual norm", {}};
  }
  if (p.kind == Norm::Kind::One) return {VerdictStatus::Tractable, "Thm 3.1(ii)", "p = 1 support ball", {}};
  if (p.kind == Norm::Kind::Inf) return {VerdictStatus::MICPR, "Thm 3.3 Cor", "p = inf support ball", {}};
  return {VerdictStatus::NotMICPR, "Thm 3.3 case 2", "p in (1, inf) with a decision-dependent uncertainty coefficient",
          detail::concave_witness(problem, {center}, radius, norm)};
}

}  // namespace

Verdict classify(const DFOProblem& problem) {
  const auto* rec = std::get_if<PiecewiseAffineRecourse>(&problem.recourse);
  return std::visit(
      detail::Overload{
          [&](const SupportBall& s) -> Verdict {
            if (!rec) return {VerdictStatus::Unknown, "Eq 2", "support ball with LP recourse has no compiler", {}};
            if (rec->mode == RecourseMode::ConcaveMin) {
              return classify_concave_ball(problem, *rec, s.center, s.radius, s.norm);
            }
            Verdict v = from_route(detail::convex_route(problem, s.radius, s.norm), "");
            if (v.status == VerdictStatus::NotMICPR) v.witness = detail::convex_witness(problem, s.center, s.radius, s.norm);
            return v;
          },
          [&](const WassersteinInf& w) -> Verdict {
            if (!rec) return {VerdictStatus::Unknown, "Eq 17", "Wasserstein ball with LP recourse has no compiler", {}};
            if (rec->mode == RecourseMode::ConvexMax) {
              Verdict v = from_route(detail::convex_route(problem, w.radius, w.norm), " via Eq 19");
              if (v.status == VerdictStatus::NotMICPR) {
                v.witness = detail::convex_witness(problem, w.samples.front(), w.radius, w.norm);
              }
              return v;
            }
            if (w.samples.size() == 1) {
              Verdict v = classify_concave_ball(problem, *rec, w.samples.front(), w.radius, w.norm);
              v.citation += " via Eq 17";
              return v;
            }
            const Norm p = effective_norm(w.norm, rec->xi_dim());
            if (w.radius > 0.0 && p.kind == Norm::Kind::Real && !constant_maps(*rec)) {
              return {VerdictStatus::NotMICPR, "Cor 4.3",
                      "p in (1, inf) with a decision-dependent uncertainty coefficient",
                      detail::concave_witness(problem, w.samples, w.radius, w.norm)};
            }
            return {VerdictStatus::MICPR, "Thm 4.2", "per-sample assignment MILP", {}};
          },
          [&](const FinitePolyhedral&) -> Verdict {
            if (problem.hurwicz_lambda) return {VerdictStatus::MICPR, "Eq 27", "Hurwicz combination", {}};
            return {VerdictStatus::MICPR, "Thm 4.3", "finite support with polyhedral ambiguity set", {}};
          },
          [&](const IntervalPolyhedral& s) -> Verdict {
            if (problem.hurwicz_lambda) return {VerdictStatus::MICPR, "Eq 27", "Hurwicz combination", {}};
            if (detail::interval_uniform(s)) {
              return {VerdictStatus::MICPR, "Cor 4.7", "interval set with uniform bounds around e/N", {}};
            }
            return {VerdictStatus::MICPR, "Cor 4.6", "interval polyhedral ambiguity set", {}};
          },
          [&](const L2Ball& s) -> Verdict {
            const int N = static_cast<int>(s.scenarios.size());
            if (s.radius == 0.0) return {VerdictStatus::MICPR, "nominal", "radius zero leaves only p0", {}};
            const bool uniform = (s.p0 - VectorXd::Constant(N, 1.0 / N)).cwiseAbs().maxCoeff() <= 1e-12;
            const double limit = N >= 2 ? std::sqrt(1.0 / (N * (N - 1.0))) : 0.0;
            if (uniform && N >= 3 && s.radius <= limit * (1.0 + 1e-12)) {
              return {VerdictStatus::NotMICPR, "Prop 4.8", "L2 ball around e/N with 0 < theta <= sqrt(1/(N(N-1)))",
                      detail::l2_ball_witness(N, s.radius)};
            }
            return {VerdictStatus::Unknown, "Prop 4.8", "L2 ball outside the non-representability hypotheses", {}};
          },
      },
      problem.ambiguity);
}

CompiledProgram compile(const DFOProblem& problem, Method method) {
  const auto* rec = std::get_if<PiecewiseAffineRecourse>(&problem.recourse);
  auto sdfo = [&]() {
    if (!rec) throw CompileError(CompileError::Code::WrongRoute, "Eq 2", "support-only route needs piecewise recourse");
    return rec->mode == RecourseMode::ConcaveMin ? compile_concave_sdfo(problem) : compile_convex_sdfo(problem);
  };
  switch (method) {
    case Method::Enumerate:
      return compile_finite_enumeration(problem);
    case Method::Kkt:
      return compile_finite_kkt(problem);
    case Method::Interval:
      return compile_interval_polyhedral(problem);
    case Method::Wasserstein:
      return compile_wasserstein(problem);
    case Method::Sdfo:
      return sdfo();
    case Method::Auto:
      break;
  }
  return std::visit(detail::Overload{
                        [&](const SupportBall&) { return sdfo(); },
                        [&](const WassersteinInf&) { return compile_wasserstein(problem); },
                        [&](const FinitePolyhedral&) {
                          if (problem.hurwicz_lambda) return compile_hurwicz(problem);
                          try {
                            return compile_finite_enumeration(problem);
                          } catch (const CompileError& e) {
                            if (e.code() != CompileError::Code::VertexCapExceeded) throw;
                            return compile_finite_kkt(problem);
                          }
                        },
                        [&](const IntervalPolyhedral&) {
                          if (problem.hurwicz_lambda) return compile_hurwicz(problem);
                          return compile_interval_polyhedral(problem);
                        },
                        [&](const L2Ball& s) {
                          if (s.radius == 0.0) return compile_saa(problem);
                          Verdict v = classify(problem);
                          throw CompileError(v.status == VerdictStatus::NotMICPR ? CompileError::Code::NotRepresentable
                                                                                 : CompileError::Code::Unsupported,
                                             "Prop 4.8", "no linear formulation for the L2 ball ambiguity set");
                          return CompiledProgram{};
                        },
                    },
                    problem.ambiguity);
}

}  // namespace dfo
