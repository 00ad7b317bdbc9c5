#include "builders.hpp"

#include "dfo/model.hpp"

#include "doctest.h"

#include <random>

using namespace dfo;
using namespace dfo::test;

namespace {

bool mentions(const ValidationReport& r, const std::string& text) {
  for (const auto& v : r.violations) {
    if (v.find(text) != std::string::npos) return true;
  }
  return false;
}

DFOProblem simple_problem() {
  DFOProblem p;
  p.decisions = {mat({{1.0, 1.0}}), vec({1.0}), vec({0.0, 0.0}), vec({1.0, 1.0})};
  p.recourse = recourse({piece(mat({{1.0, 0.0}}), vec({0.0}), mat({{0.0, 1.0}}), 0.0)}, RecourseMode::ConcaveMin);
  p.ambiguity = SupportBall{vec({0.0}), 1.0, Norm::one()};
  return p;
}

}  // namespace

TEST_CASE("validate accepts the standard simplex") {
  CHECK(validate(simple_problem()).ok());
}

TEST_CASE("validate reports inverted bounds") {
  DFOProblem p = simple_problem();
  p.decisions = DecisionSet::box(vec({1.0}), vec({0.0}));
  p.recourse = recourse({const_piece(vec({1.0}), 0.0, 1)}, RecourseMode::ConcaveMin);
  CHECK(mentions(validate(p), "l <= u fails"));
}

TEST_CASE("validate reports an empty finite ambiguity polytope") {
  DFOProblem p = value_problem(finite(scalars({1, 2, 3}), mat({{1, 1, 1}}), vec({0.5})));
  CHECK(mentions(validate(p), "ambiguity polytope empty"));
}

TEST_CASE("validate rejects dimension mismatches and LP recourse with a support ball") {
  DFOProblem p = simple_problem();
  p.ambiguity = SupportBall{vec({0.0, 0.0}), 1.0, Norm::one()};
  CHECK_FALSE(validate(p).ok());

  LPRecourse r;
  r.cost = vec({1.0});
  r.recourse_matrix = mat({{1.0}});
  r.tech_x = mat({{0.0, 0.0}});
  r.tech_xi = mat({{-1.0}});
  r.rhs = vec({0.0});
  r.senses = {RowSense::GreaterEqual};
  r.lower = vec({0.0});
  DFOProblem q = simple_problem();
  q.recourse = r;
  CHECK_FALSE(validate(q).ok());
  q.ambiguity = simplex(scalars({1.0, 2.0}));
  CHECK(validate(q).ok());
}

TEST_CASE("validate interval set invariants") {
  IntervalPolyhedral s = uniform_interval(scalars({1, 2, 3, 4}), 20, 1);
  CHECK(validate(value_problem(s)).ok());
  s.lbar(0) = -6;  // lbar/q < -p0
  CHECK_FALSE(validate(value_problem(s)).ok());
}

TEST_CASE("evaluate_recourse on piecewise recourse") {
  const int n = 1;
  auto pieces = std::vector<AffinePiece>{piece(mat({{1.0}}), vec({0.0}), MatrixXd::Zero(1, n), 0.0),
                                         piece(mat({{1.0}}), vec({0.0}), MatrixXd::Zero(1, n), 1.0)};
  CHECK(evaluate_recourse(Recourse{recourse(pieces, RecourseMode::ConcaveMin)}, vec({1.0}), vec({2.0})) ==
        doctest::Approx(2.0));
  CHECK(evaluate_recourse(Recourse{recourse(pieces, RecourseMode::ConvexMax)}, vec({1.0}), vec({2.0})) ==
        doctest::Approx(3.0));
}

TEST_CASE("evaluate_recourse on a one-facility transportation LP") {
  // y: shipped, u: unmet, v: held. y + v = x, y + u >= xi.
  LPRecourse r;
  r.cost = vec({1.0, 10.0, 1.0});
  r.recourse_matrix = mat({{1.0, 0.0, 1.0}, {1.0, 1.0, 0.0}});
  r.tech_x = mat({{-1.0}, {0.0}});
  r.tech_xi = mat({{0.0}, {-1.0}});
  r.rhs = vec({0.0, 0.0});
  r.senses = {RowSense::Equal, RowSense::GreaterEqual};
  r.lower = vec({0.0, 0.0, 0.0});
  CHECK(evaluate_recourse(Recourse{r}, vec({5.0}), vec({3.0})) == doctest::Approx(5.0));
  CHECK(evaluate_recourse(Recourse{r}, vec({1.0}), vec({3.0})) == doctest::Approx(21.0));

  r.senses = {RowSense::Equal, RowSense::Equal};
  r.recourse_matrix(1, 1) = 0.0;
  CHECK_THROWS_AS(evaluate_recourse(Recourse{r}, vec({1.0}), vec({3.0})), InfeasibleRecourse);
}

TEST_CASE("propagate_bounds examples") {
  auto check = [](const AffineMap& m, const VectorXd& l, const VectorXd& u, const VectorXd& lo, const VectorXd& hi) {
    auto [a, b] = propagate_bounds(m, l, u);
    CHECK((a - lo).norm() == doctest::Approx(0.0));
    CHECK((b - hi).norm() == doctest::Approx(0.0));
  };
  check(AffineMap(mat({{1, -1}}), vec({0})), vec({0, 0}), vec({1, 1}), vec({-1}), vec({1}));
  check(AffineMap(mat({{2}}), vec({3})), vec({0}), vec({1}), vec({3}), vec({5}));
  check(AffineMap(mat({{1, 1}, {-1, 1}}), vec({0, 1})), vec({-1, 0}), vec({1, 2}), vec({-1, 0}), vec({3, 4}));
}

TEST_CASE("propagate_bounds is sound and tight on boxes") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + trial % 4, m = 1 + trial % 3;
    MatrixXd A(m, n);
    VectorXd a(m), l(n), u(n), x(n);
    for (int i = 0; i < m; ++i) {
      a(i) = U(rng);
      for (int j = 0; j < n; ++j) A(i, j) = U(rng);
    }
    for (int j = 0; j < n; ++j) {
      double p = U(rng), q = U(rng);
      l(j) = std::min(p, q);
      u(j) = std::max(p, q);
      x(j) = l(j) + (u(j) - l(j)) * (U(rng) + 2.0) / 4.0;
    }
    AffineMap map(A, a);
    auto [lo, hi] = propagate_bounds(map, l, u);
    VectorXd y = map(x);
    CHECK(((y - lo).array() >= -1e-12).all());
    CHECK(((hi - y).array() >= -1e-12).all());
    if (trial % 10 == 0) {
      VectorXd best_lo = VectorXd::Constant(m, kInf), best_hi = VectorXd::Constant(m, -kInf);
      for (int mask = 0; mask < (1 << n); ++mask) {
        VectorXd v(n);
        for (int j = 0; j < n; ++j) v(j) = (mask >> j) & 1 ? u(j) : l(j);
        best_lo = best_lo.cwiseMin(map(v));
        best_hi = best_hi.cwiseMax(map(v));
      }
      CHECK((best_lo - lo).cwiseAbs().maxCoeff() <= 1e-12);
      CHECK((best_hi - hi).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}

TEST_CASE("concave value never exceeds convex value on the same pieces") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int K = 1 + trial % 3;
    std::vector<AffinePiece> pieces;
    for (int k = 0; k < K; ++k) {
      pieces.push_back(piece(mat({{U(rng), U(rng)}}), vec({U(rng)}), mat({{U(rng), U(rng)}}), U(rng)));
    }
    VectorXd x = vec({U(rng), U(rng)}), xi = vec({U(rng)});
    double lo = recourse(pieces, RecourseMode::ConcaveMin).value(x, xi);
    double hi = recourse(pieces, RecourseMode::ConvexMax).value(x, xi);
    CHECK(lo <= hi + 1e-12);
    if (K == 1) CHECK(lo == doctest::Approx(hi));
  }
}

TEST_CASE("polytope vertices of the unit square cut by a diagonal") {
  auto v = enumerate_polytope_vertices(mat({{1, 1}}), vec({1}), MatrixXd::Zero(0, 2), VectorXd::Zero(0), vec({0, 0}),
                                       vec({1, 1}));
  CHECK(v.size() == 3);
  CHECK_THROWS_AS(enumerate_polytope_vertices(MatrixXd::Zero(0, 3), VectorXd::Zero(0), MatrixXd::Zero(0, 3),
                                              VectorXd::Zero(0), vec({0, 0, 0}), vec({1, 1, 1}), 4),
                  CapExceeded);
}
