#include "doctest.h"

#include "dfo/milp.hpp"

#include <random>
#include <sstream>

using namespace dfo;

namespace {

LinearProgram make(int n, const std::vector<std::vector<double>>& rows, const std::vector<RowSense>& senses,
                   const std::vector<double>& rhs) {
  LinearProgram lp;
  lp.objective = VectorXd::Zero(n);
  lp.rows = MatrixXd::Zero(static_cast<int>(rows.size()), n);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (int j = 0; j < n; ++j) lp.rows(i, j) = rows[i][j];
  lp.senses = senses;
  lp.rhs = Eigen::Map<const VectorXd>(rhs.data(), rhs.size());
  lp.lower = VectorXd::Zero(n);
  lp.upper = VectorXd::Constant(n, kInf);
  lp.integer.assign(n, false);
  return lp;
}

}  // namespace

TEST_CASE("lp maximize x under x <= 1") {
  auto lp = make(1, {{1}}, {RowSense::LessEqual}, {1});
  lp.objective << -1;
  lp.lower << -kInf;
  auto s = solve_lp(lp);
  REQUIRE(s.ok());
  CHECK(s.objective == doctest::Approx(-1));
  CHECK(s.x(0) == doctest::Approx(1));
  CHECK(s.duals(0) == doctest::Approx(-1));
}

TEST_CASE("lp infeasible") {
  auto lp = make(1, {{1}, {1}}, {RowSense::GreaterEqual, RowSense::LessEqual}, {1, 0});
  lp.lower << -kInf;
  CHECK(solve_lp(lp).status == SolveStatus::Infeasible);
}

TEST_CASE("lp unbounded") {
  auto lp = make(2, {{1, -1}}, {RowSense::LessEqual}, {1});
  lp.objective << -1, -1;
  CHECK(solve_lp(lp).status == SolveStatus::Unbounded);
}

TEST_CASE("lp on the simplex face") {
  auto lp = make(2, {{1, 1}}, {RowSense::LessEqual}, {1});
  lp.objective << -1, -1;
  auto s = solve_lp(lp);
  REQUIRE(s.ok());
  CHECK(s.objective == doctest::Approx(-1));
  CHECK(s.x.sum() == doctest::Approx(1));
  CHECK(s.x.minCoeff() >= -1e-9);
}

TEST_CASE("lp equality and free variables") {
  // min x1 + 2 x2 - x3, x1 + x2 + x3 = 2, x1 - x3 >= -1, x3 <= 1, x1 free
  auto lp = make(3, {{1, 1, 1}, {1, 0, -1}}, {RowSense::Equal, RowSense::GreaterEqual}, {2, -1});
  lp.objective << 1, 2, -1;
  lp.lower(0) = -kInf;
  lp.upper(2) = 1;
  auto s = solve_lp(lp);
  REQUIRE(s.ok());
  // x3 = 1, x1 >= 0, x1 + x2 = 1 -> x1 = 1, obj 0
  CHECK(s.objective == doctest::Approx(0));
}

TEST_CASE("milp rounding up") {
  auto lp = make(2, {{1, 1}}, {RowSense::GreaterEqual}, {1.5});
  lp.objective << 1, 1;
  lp.upper << 1, 1;
  lp.integer = {true, true};
  auto s = solve_milp(lp);
  REQUIRE(s.ok());
  CHECK(s.objective == doctest::Approx(2));
  CHECK(s.bound == doctest::Approx(2));
}

TEST_CASE("milp knapsack") {
  auto lp = make(2, {{2, 1}}, {RowSense::LessEqual}, {2});
  lp.objective << -3, -2;
  lp.upper << 1, 1;
  lp.integer = {true, true};
  auto s = solve_milp(lp);
  REQUIRE(s.ok());
  CHECK(s.objective == doctest::Approx(-3));
  CHECK(s.x(0) == doctest::Approx(1));
  CHECK(s.x(1) == doctest::Approx(0));
}

TEST_CASE("milp node limit keeps the bound") {
  auto lp = make(2, {{2, 1}}, {RowSense::LessEqual}, {2});
  lp.objective << -3, -2;
  lp.upper << 1, 1;
  lp.integer = {true, true};
  SolverConfig cfg;
  cfg.node_limit = 1;
  auto s = solve_milp(lp, cfg);
  CHECK(s.status == SolveStatus::NodeLimit);
  CHECK(s.bound <= -3 + 1e-9);
}

TEST_CASE("batch semantics") {
  auto a = make(1, {{1}}, {RowSense::LessEqual}, {1});
  a.objective << -1;
  auto b = make(1, {{1}}, {RowSense::GreaterEqual}, {1});
  b.objective << 1;
  b.upper << 0;  // infeasible
  auto c = make(1, {}, {}, {});
  c.objective << 1;
  c.lower << 5;
  c.upper << 9;
  SUBCASE("singleton") {
    auto r = solve_batch({c});
    CHECK(r.argmin == 0);
    CHECK(r.best.objective == doctest::Approx(5));
    CHECK(!r.warning());
  }
  SUBCASE("infeasible member excluded") {
    auto r = solve_batch({b, c});
    CHECK(r.argmin == 1);
    CHECK(r.best.objective == doctest::Approx(5));
    CHECK(r.warning());
  }
  SUBCASE("ties go to the lowest index") {
    auto r = solve_batch({c, a, a});
    CHECK(r.argmin == 1);
  }
  SUBCASE("all infeasible") { CHECK_THROWS_AS(solve_batch({b, b}), AllMembersFailed); }
  SUBCASE("workers give the same answer") {
    SolverConfig cfg;
    cfg.workers = 3;
    auto r = solve_batch({c, a, b, a}, cfg);
    CHECK(r.argmin == 1);
  }
}

TEST_CASE("lp weak duality on random instances") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1, 1);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    int n = 2 + trial % 6, m = 1 + trial % 5;
    LinearProgram lp;
    lp.objective = VectorXd::NullaryExpr(n, [&] { return u(rng); });
    lp.rows = MatrixXd::NullaryExpr(m, n, [&] { return u(rng); });
    lp.rhs = VectorXd::NullaryExpr(m, [&] { return u(rng); });
    lp.senses.clear();
    for (int i = 0; i < m; ++i) lp.senses.push_back(static_cast<RowSense>(i % 3));
    lp.lower = VectorXd::Constant(n, -2);
    lp.upper = VectorXd::Constant(n, 3);
    lp.integer.assign(n, false);
    auto s = solve_lp(lp);
    if (!s.ok()) continue;
    ++checked;
    CHECK(primal_residual(lp, s.x) <= 1e-7);
    // Lagrangian bound: y'b + sum_j min over box of (c - A'y)_j x_j.
    VectorXd d = lp.objective - lp.rows.transpose() * s.duals;
    double dual = s.duals.dot(lp.rhs);
    for (int j = 0; j < n; ++j) dual += std::min(d(j) * lp.lower(j), d(j) * lp.upper(j));
    CHECK(dual <= s.objective + 1e-7);
    CHECK(dual == doctest::Approx(s.objective).epsilon(1e-7));
  }
  CHECK(checked > 50);
}

TEST_CASE("mps round trip") {
  auto lp = make(3, {{2, 1, 0}, {1, -1, 3.5}}, {RowSense::LessEqual, RowSense::Equal}, {2, 0.25});
  lp.objective << -3, -2, 1;
  lp.objective_offset = 1.5;
  lp.upper << 1, 1, kInf;
  lp.lower(2) = -kInf;
  lp.integer = {true, true, false};
  std::ostringstream os;
  write_mps_raw(os, lp, "RT");
  std::istringstream is(os.str());
  auto back = read_mps(is);
  CHECK(back.num_vars() == 3);
  CHECK(back.integer == lp.integer);
  CHECK(back.objective_offset == 1.5);
  auto s1 = solve_milp(lp), s2 = solve_milp(back);
  CHECK(s1.status == s2.status);
  if (s1.ok()) CHECK(std::abs(s1.objective - s2.objective) <= 1e-8);
}
