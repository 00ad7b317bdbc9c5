#include "builders.hpp"
#include "doctest.h"
#include "dfo/io.hpp"
#include "dfo/reform.hpp"

#include <filesystem>
#include <random>
#include <sstream>

using namespace dfo;
using namespace dfo::test;

namespace {

const char* kMinimal = R"({
  "decisions": {"lower": [0], "upper": [1]},
  "recourse": {"kind": "piecewise_affine", "mode": "concave_min",
               "pieces": [{"a_matrix": [[1]], "a_offset": [0], "b_row": [0], "b_offset": 0}]},
  "ambiguity": {"kind": "support_ball", "center": [0], "radius": 1, "norm": "one"}
})";

LinearProgram knapsack() {
  LinearProgram lp;
  lp.objective = vec({-3, -2});
  lp.rows = mat({{2, 1}});
  lp.senses = {RowSense::LessEqual};
  lp.rhs = vec({2});
  lp.lower = vec({0, 0});
  lp.upper = vec({1, 1});
  lp.integer = {true, true};
  lp.var_names = {"z1", "z2"};
  lp.row_names = {"capacity"};
  return lp;
}

double reparsed_value(const LinearProgram& lp) {
  std::istringstream in(write_mps(lp).text);
  return solve(read_mps(in)).objective;
}

std::vector<DFOProblem> sample_problems() {
  std::vector<DFOProblem> out;
  auto base = value_problem(finite(scalars({1, 2, 3}), mat({{1, 1, 0}}), vec({0.8})));
  out.push_back(base);
  auto with_m = base;
  std::get<FinitePolyhedral>(with_m.ambiguity).big_m = 12.5;
  with_m.hurwicz_lambda = 0.25;
  out.push_back(with_m);
  out.push_back(value_problem(uniform_interval(scalars({1, 2, 3, 4}), 3, 1)));
  out.push_back(value_problem(L2Ball{scalars({1, 2, 3}), VectorXd::Constant(3, 1.0 / 3), 0.1}));
  out.push_back(value_problem(WassersteinInf{scalars({0.1, -0.7}), 0.3, Norm::real(2.5)}));
  DFOProblem convex;
  convex.decisions = box(2, -1.0, 1.0);
  convex.decisions.ineq_matrix = mat({{1, 1}});
  convex.decisions.ineq_rhs = vec({1.5});
  convex.recourse = recourse({piece(mat({{1, 0}, {0, 0}}), vec({0.1, 0}), mat({{1, -1}}), 0.3),
                              piece(mat({{0, 0}, {1, 0}}), vec({0, 1.0 / 3}), mat({{0, 0}}), -2)},
                             RecourseMode::ConvexMax);
  std::get<PiecewiseAffineRecourse>(convex.recourse).block_structure = std::vector<std::vector<int>>{{0}, {1}};
  convex.ambiguity = SupportBall{vec({0.5, -0.5}), 0.75, Norm::inf()};
  out.push_back(convex);
  DFOProblem lp;
  lp.decisions = box(1, 0.0, 2.0);
  LPRecourse r;
  r.cost = vec({1, 4});
  r.recourse_matrix = mat({{1, 1}, {1, 0}});
  r.tech_x = mat({{1}, {0}});
  r.tech_xi = mat({{-1}, {0}});
  r.rhs = vec({0, 5});
  r.senses = {RowSense::GreaterEqual, RowSense::LessEqual};
  r.lower = vec({0, -kInf});
  lp.recourse = r;
  lp.ambiguity = simplex(scalars({1, 3}));
  out.push_back(lp);
  return out;
}

}  // namespace

TEST_CASE("minimal document parses and validates") {
  auto p = parse_problem(kMinimal);
  CHECK(p.n() == 1);
  CHECK(std::holds_alternative<SupportBall>(p.ambiguity));
  CHECK(std::get<SupportBall>(p.ambiguity).norm == Norm::one());
  CHECK(validate(p).ok());
}

TEST_CASE("parse errors name the field") {
  auto with = [](const std::string& from, const std::string& to) {
    std::string s = kMinimal;
    s.replace(s.find(from), from.size(), to);
    return s;
  };
  auto path_of = [](const std::string& doc) {
    try {
      parse_problem(doc);
    } catch (const ParseError& e) {
      return e.path();
    }
    return std::string("<none>");
  };
  CHECK(path_of(with("\"support_ball\"", "\"L3Ball\"")) == "/ambiguity/kind");
  CHECK(path_of(with("\"norm\": \"one\"", "\"norm\": \"one\", \"shape\": 3")) == "/ambiguity/shape");
  CHECK(path_of(with("\"norm\": \"one\"", "\"norm\": \"two\"")) == "/ambiguity/norm");
  CHECK(path_of(with("\"upper\": [1]", "\"upper\": [true]")) == "/decisions/upper/0");
  CHECK(path_of(with("\"mode\": \"concave_min\"", "\"mode\": \"concave\"")) == "/recourse/mode");
  CHECK(path_of(with("\"radius\": 1", "\"radius\": -1")) == "");
  CHECK(path_of("{") == "");
  CHECK_THROWS_AS(parse_problem(with("\"support_ball\"", "\"L3Ball\"")), ParseError);
}

TEST_CASE("fixture finite_simplex_3 is the three-scenario example") {
  auto p = load_problem("fixtures/finite_simplex_3.json");
  const auto& s = std::get<FinitePolyhedral>(p.ambiguity);
  REQUIRE(s.scenarios.size() == 3);
  CHECK(s.D.rows() == 1);
  CHECK(s.d(0) == doctest::Approx(0.8));
  auto r = solve_compiled(compile(p, Method::Enumerate));
  CHECK(r.value == doctest::Approx(1.4).epsilon(1e-9));
}

TEST_CASE("serialize then parse is the identity") {
  for (const auto& p : sample_problems()) {
    const auto once = serialize_problem(p);
    const auto q = parse_problem(once);
    CHECK(serialize_problem(q) == once);
  }
  auto p = sample_problems()[4];
  auto q = parse_problem(serialize_problem(p));
  const auto& w = std::get<WassersteinInf>(q.ambiguity);
  CHECK(w.samples[0](0) == 0.1);
  CHECK(w.norm == Norm::real(2.5));
  auto lp = parse_problem(serialize_problem(sample_problems()[6]));
  CHECK(std::isinf(std::get<LPRecourse>(lp.recourse).lower(1)));
}

TEST_CASE("knapsack MPS matches the golden file") {
  const auto doc = write_mps(knapsack(), "KNAPSACK");
  CHECK(doc.renamed == 0);
  CHECK(doc.text == read_text("fixtures/golden/knapsack.mps"));
  CHECK(doc.name_map() == "col z1 z1\ncol z2 z2\nrow capacity capacity\n");
  CHECK(reparsed_value(knapsack()) == doctest::Approx(-3).epsilon(1e-12));
}

TEST_CASE("empty-constraint LP writes bounds only") {
  LinearProgram lp;
  lp.objective = vec({-1});
  lp.rows = MatrixXd::Zero(0, 1);
  lp.rhs = VectorXd::Zero(0);
  lp.lower = vec({0});
  lp.upper = vec({1});
  lp.integer = {false};
  const auto doc = write_mps(lp);
  CHECK(doc.text.find(" L ") == std::string::npos);
  CHECK(doc.text.find(" UP BND") != std::string::npos);
  std::istringstream in(doc.text);
  auto back = read_mps(in);
  CHECK(back.num_rows() == 0);
  CHECK(solve(back).objective == doctest::Approx(-1));
}

TEST_CASE("name mangling is deterministic and collision free") {
  auto lp = knapsack();
  lp.var_names = {"C0000002", "a very long column"};
  const auto a = write_mps(lp);
  const auto b = write_mps(lp);
  CHECK(a.text == b.text);
  CHECK(a.columns[0].second == "C0000002");
  CHECK(a.columns[1].second != "C0000002");
  CHECK(a.columns[1].second.size() == 8);
  lp.var_names = {"dup", "dup"};
  lp.row_names = {"COST"};
  const auto c = write_mps(lp);
  CHECK(c.columns[0].second == "dup");
  CHECK(c.columns[1].second == "C0000002");
  CHECK(c.rows[0].second == "R0000001");
  CHECK(c.renamed == 2);
}

TEST_CASE("MPS round trip preserves compiled optimal values") {
  std::vector<CompiledProgram> programs;
  auto finite_p = value_problem(finite(scalars({1, 2, 3}), mat({{1, 1, 0}}), vec({0.8})));
  programs.push_back(compile_finite_kkt(finite_p));
  programs.push_back(compile_finite_enumeration(finite_p));
  programs.push_back(compile_interval_polyhedral(value_problem(uniform_interval(scalars({1, 2, 3, 4}), 3, 1))));
  programs.push_back(compile(sample_problems()[5], Method::Sdfo));
  for (const auto& c : programs) {
    for (const auto& lp : c.programs) {
      const auto direct = solve(lp);
      std::istringstream in(write_mps(lp).text);
      const auto back = solve(read_mps(in));
      INFO(c.citation);
      REQUIRE(back.status == direct.status);
      if (direct.ok()) CHECK(std::abs(back.objective - direct.objective) <= 1e-8 * std::max(1.0, std::abs(direct.objective)));
    }
  }
}

TEST_CASE("random MILPs survive the MPS round trip") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> coef(-9, 9);
  for (int t = 0; t < 40; ++t) {
    LinearProgram lp;
    const int n = 5, m = 3;
    lp.objective = VectorXd::NullaryExpr(n, [&] { return coef(rng) / 4.0; });
    lp.rows = MatrixXd::NullaryExpr(m, n, [&] { return static_cast<double>(coef(rng)); });
    lp.senses.assign(m, RowSense::LessEqual);
    lp.rhs = VectorXd::Constant(m, 7.5);
    lp.lower = VectorXd::Constant(n, -2);
    lp.upper = VectorXd::Constant(n, 3);
    lp.integer = {true, false, true, false, true};
    const auto direct = solve(lp);
    std::istringstream in(write_mps(lp).text);
    const auto back = solve(read_mps(in));
    REQUIRE(direct.status == back.status);
    if (direct.ok()) CHECK(std::abs(direct.objective - back.objective) <= 1e-8);
  }
}

TEST_CASE("batch export writes one file per member") {
  IntervalPolyhedral s;
  s.scenarios = scalars({1, 2, 3});
  s.p0 = VectorXd::Constant(3, 1.0 / 3);
  s.lbar = Eigen::VectorXi::Constant(3, -1);
  s.ubar = Eigen::VectorXi::Constant(3, 2);
  s.ubar(0) = 1;
  s.q = 4;
  auto compiled = compile_interval_polyhedral(value_problem(s));
  REQUIRE(compiled.kind == CompiledProgram::Kind::Batch);
  const auto dir = std::filesystem::temp_directory_path() / "dfo_io_export";
  std::filesystem::remove_all(dir);
  const auto files = export_compiled(compiled, dir, "model");
  REQUIRE(files.size() == compiled.programs.size());
  CHECK(files[0].mps.filename().string().rfind("B0000_", 0) == 0);
  CHECK(std::filesystem::exists(files.back().names));
  CHECK(std::filesystem::exists(dir / "model.json"));
  CHECK(read_text(dir / "model.json").find("\"citation\"") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("manifest round trip") {
  std::vector<FixtureEntry> entries(2);
  entries[0].file = "a.json";
  entries[0].route = "finite";
  entries[0].methods = {"enumerate", "kkt"};
  entries[0].expected = 1.4;
  entries[1].file = "b.json";
  entries[1].route = "refusal";
  entries[1].verdict = "NotMICPR";
  entries[1].citation = "Prop 4.8";
  const auto dir = std::filesystem::temp_directory_path();
  write_text(dir / "dfo_manifest.json", manifest_to_json(entries));
  const auto back = read_manifest(dir / "dfo_manifest.json");
  REQUIRE(back.size() == 2);
  CHECK(back[0].methods.size() == 2);
  CHECK(*back[0].expected == 1.4);
  CHECK(*back[1].citation == "Prop 4.8");
  CHECK(!back[1].expected);
}
