#include "doctest.h"
#include "dfo/bench.hpp"
#include "dfo/io.hpp"
#include "dfo/reform.hpp"

#include <sstream>

using namespace dfo;

namespace {

TRAConfig small(std::uint64_t seed) {
  TRAConfig c;
  c.seed = seed;
  c.trials = 2;
  c.test_count = 20;
  c.lambda_grid = {0.0, 0.5, 1.0};
  return c;
}

}  // namespace

TEST_CASE("mu and interval scaling") {
  TRAConfig c;
  CHECK(c.mu() == doctest::Approx(1.0 / 42).epsilon(1e-12));
  const auto sc = interval_scaling(c);
  CHECK(sc.q == 168);
  CHECK(sc.lbar == -21);
  CHECK(sc.ubar == 4);
  CHECK(static_cast<double>(sc.ubar) / sc.q == doctest::Approx(c.mu()).epsilon(1e-12));
  c.eps = 0.25;
  CHECK_THROWS_AS(c.check(), std::invalid_argument);
  c.eps = 0.16;
  c.h = 20;
  CHECK_THROWS_AS(c.check(), std::invalid_argument);
}

TEST_CASE("generate_tra is deterministic") {
  TRAConfig c;
  c.seed = 7;
  const auto a = generate_tra(c);
  const auto b = generate_tra(c);
  CHECK(serialize_problem(a.problem) == serialize_problem(b.problem));
  CHECK(a.transport_cost == b.transport_cost);
  REQUIRE(a.test.size() == b.test.size());
  for (std::size_t i = 0; i < a.test.size(); ++i) CHECK(a.test[i] == b.test[i]);
  CHECK(validate(a.problem).ok());
  CHECK(serialize_problem(generate_tra(c, 1).problem) != serialize_problem(a.problem));
  const auto verdict = classify(a.problem);
  CHECK(verdict.status == VerdictStatus::MICPR);
  CHECK(verdict.citation == "Cor 4.7");
}

TEST_CASE("zero demand costs nothing") {
  TRAConfig c;
  c.demand_mean = 0.0;
  c.demand_variance_factor = 0.0;
  c.outlier_variance_factor = 0.0;
  const auto inst = generate_tra(c);
  auto r = solve_compiled(compile_interval_polyhedral(inst.problem));
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.value == doctest::Approx(0.0));
  CHECK(r.x.head(c.n).norm() == doctest::Approx(0.0));
}

TEST_CASE("nearest rank quantiles") {
  std::vector<double> v{5, 1, 4, 2, 3};
  CHECK(nearest_rank(v, 50) == 3);
  CHECK(nearest_rank(v, 60) == 3);
  CHECK(nearest_rank(v, 90) == 5);
  CHECK(nearest_rank(v, 20) == 1);
  CHECK(nearest_rank({7}, 50) == 7);
}

TEST_CASE("experiment ordering, collapse and determinism") {
  const auto c = small(3);
  const auto a = run_experiment(c);
  const auto violations = check_ordering(a);
  for (const auto& v : violations) INFO(v);
  CHECK(violations.empty());
  // lambda = 1 equals DFO and lambda = 0 equals DRO, row by row.
  for (const auto& r : a.rows) {
    if (r.method != "Hurwicz" || (r.lambda != 0.0 && r.lambda != 1.0)) continue;
    for (const auto& s : a.rows) {
      if (s.quantile == r.quantile && s.method == (r.lambda == 1.0 ? "DFO" : "DRO"))
        CHECK(std::abs(s.mean - r.mean) <= 1e-6 * std::max(1.0, std::abs(s.mean)));
    }
  }
  SolverConfig parallel;
  parallel.workers = 2;
  const auto b = run_experiment(c, parallel);
  CHECK(report_csv(a) == report_csv(b));
  CHECK(raw_csv(a) == raw_csv(b));
  CHECK(training_csv(a) == training_csv(b));
  CHECK(quantiles_dat(a) == quantiles_dat(b));
}

TEST_CASE("reported quantiles are order statistics of raw costs") {
  auto c = small(5);
  c.trials = 1;
  const auto rep = run_experiment(c);
  for (const auto& row : rep.rows) {
    std::vector<double> costs;
    for (const auto& r : rep.raw)
      if (r.method == row.method && r.lambda == row.lambda) costs.push_back(r.cost);
    CHECK(row.mean == nearest_rank(costs, row.quantile));
    CHECK(std::find(costs.begin(), costs.end(), row.mean) != costs.end());
  }
}

TEST_CASE("constant demand makes all methods agree") {
  auto c = small(9);
  c.trials = 1;
  c.demand_variance_factor = 0.0;
  c.outlier_variance_factor = 0.0;
  c.test_variance_factor = 0.0;
  const auto rep = run_experiment(c);
  const auto& x0 = rep.training.front().x;
  for (const auto& t : rep.training) CHECK((t.x - x0).norm() <= 1e-6 * std::max(1.0, x0.norm()));
  for (const auto& r : rep.rows) CHECK(r.mean == doctest::Approx(rep.rows.front().mean));
}
