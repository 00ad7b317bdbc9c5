#include "builders.hpp"

#include "dfo/reform.hpp"

#include "doctest.h"

#include <random>

using namespace dfo;
using namespace dfo::test;

namespace {

double value_of(const CompiledProgram& c) {
  CompiledResult r = solve_compiled(c);
  REQUIRE(r.status == SolveStatus::Optimal);
  return r.value;
}

bool certificate_holds(const Witness& w) {
  if (w.points.size() < 3) return false;
  for (std::size_t i = 0; i < w.points.size(); ++i) {
    if (!w.membership(w.points[i])) return false;
    for (std::size_t j = i + 1; j < w.points.size(); ++j) {
      if (w.membership(0.5 * (w.points[i] + w.points[j]))) return false;
    }
  }
  return true;
}

// K = 1, a(x) = x (m = n), b = 0, over [0, 1]^n.
DFOProblem identity_sdfo(int n, const VectorXd& center, double radius, Norm norm, RecourseMode mode) {
  DFOProblem p;
  p.decisions = box(n, 0.0, 1.0);
  p.recourse = recourse({piece(MatrixXd::Identity(n, n), VectorXd::Zero(n), MatrixXd::Zero(1, n), 0.0)}, mode);
  p.ambiguity = SupportBall{center, radius, norm};
  return p;
}

// Solve a builder's program after fixing the listed variables.
double minimize(ProgramBuilder b, const LinExpr& objective) {
  b.set_objective(objective);
  Solution s = solve(b.build());
  REQUIRE(s.ok());
  return s.objective;
}

}  // namespace

TEST_CASE("McCormick block is exact at binary values") {
  auto pinned = [](double ll, double lu, double gl, double gu, int bin, double gamma) {
    ProgramBuilder b;
    int z = b.add_var("z", bin, bin, true);
    int g = b.add_var("g", gamma, gamma);
    int s = b.add_var("s", -100, 100);
    build_mccormick(b, ll, lu, gl, gu, s, z, b(g));
    return std::pair{minimize(b, b(s)), -minimize(b, -b(s))};
  };
  auto [lo1, hi1] = pinned(0, 1, -2, 3, 1, 2.0);
  CHECK(lo1 == doctest::Approx(2.0));
  CHECK(hi1 == doctest::Approx(2.0));
  auto [lo2, hi2] = pinned(0, 1, -2, 3, 0, -1.0);
  CHECK(lo2 == doctest::Approx(0.0));
  CHECK(hi2 == doctest::Approx(0.0));
  auto [lo3, hi3] = pinned(-1, 1, 0, 5, 0, 4.0);
  CHECK(lo3 == doctest::Approx(-4.0));
  CHECK(hi3 == doctest::Approx(-4.0));

  ProgramBuilder b;
  int z = b.add_var("z", 0, 1, true), s = b.add_var("s", -1, 1), g = b.add_var("g", 0, 1);
  CHECK_THROWS_AS(build_mccormick(b, 0, 1, 3, 2, s, z, b(g)), CompileError);
}

TEST_CASE("reverse norm epigraph examples") {
  auto min_t = [](Norm p, const AffineMap& map, const VectorXd& l, const VectorXd& u) {
    Solution s = solve(reverse_norm_epigraph_program(p, map, l, u));
    REQUIRE(s.ok());
    return s.objective;
  };
  AffineMap id1(mat({{1.0}}), vec({0.0}));
  CHECK(min_t(Norm::one(), id1, vec({0.5}), vec({0.5})) == doctest::Approx(-0.5));
  CHECK(min_t(Norm::one(), id1, vec({-1.0}), vec({1.0})) == doctest::Approx(-1.0));
  AffineMap id2(MatrixXd::Identity(2, 2), vec({0.0, 0.0}));
  CHECK(min_t(Norm::inf(), id2, vec({0.3, -0.8}), vec({0.3, -0.8})) == doctest::Approx(-0.8));
  CHECK(min_t(Norm::one(), AffineMap(mat({{1.0, 1.0}}), vec({0.0})), vec({0, 0}), vec({1, 1})) ==
        doctest::Approx(-2.0));
}

TEST_CASE("classify examples") {
  Verdict v1 = classify(identity_sdfo(1, vec({0.0}), 1.0, Norm::one(), RecourseMode::ConcaveMin));
  CHECK(v1.status == VerdictStatus::Tractable);
  CHECK(v1.citation == "Thm 3.1(ii)");

  Verdict v2 = classify(identity_sdfo(2, vec({0.0, 0.0}), 1.0, Norm::real(2.0), RecourseMode::ConcaveMin));
  CHECK(v2.status == VerdictStatus::NotMICPR);
  CHECK(v2.citation == "Thm 3.3 case 2");
  REQUIRE(v2.witness);
  CHECK(certificate_holds(*v2.witness));

  Verdict v3 = classify(identity_sdfo(2, vec({0.0, 0.0}), 1.0, Norm::real(2.0), RecourseMode::ConvexMax));
  CHECK(v3.status == VerdictStatus::NotMICPR);
  CHECK(v3.citation == "Prop 3.5");
  REQUIRE(v3.witness);
  CHECK(certificate_holds(*v3.witness));

  LPRecourse r;
  r.cost = vec({1.0});
  r.recourse_matrix = mat({{1.0}});
  r.tech_x = mat({{-1.0}});
  r.tech_xi = mat({{0.0}});
  r.rhs = vec({0.0});
  r.senses = {RowSense::GreaterEqual};
  r.lower = vec({0.0});
  DFOProblem l2;
  l2.decisions = box(1, 0.0, 1.0);
  l2.recourse = r;
  l2.ambiguity = L2Ball{scalars({1, 2, 3, 4}), VectorXd::Constant(4, 0.25), 0.2};
  Verdict v4 = classify(l2);
  CHECK(v4.status == VerdictStatus::NotMICPR);
  CHECK(v4.citation == "Prop 4.8");
  REQUIRE(v4.witness);
  CHECK(certificate_holds(*v4.witness));
  std::get<L2Ball>(l2.ambiguity).radius = 0.3;
  CHECK(classify(l2).status == VerdictStatus::Unknown);
}

TEST_CASE("concave sDFO examples") {
  auto c1 = compile_concave_sdfo(identity_sdfo(1, vec({0.0}), 1.0, Norm::one(), RecourseMode::ConcaveMin));
  CHECK(c1.kind == CompiledProgram::Kind::Batch);
  CHECK(c1.programs.size() == 2);
  CHECK(value_of(c1) == doctest::Approx(-1.0));
  CompiledResult r1 = solve_compiled(c1);
  CHECK(r1.x(0) == doctest::Approx(1.0));

  for (Norm p : {Norm::one(), Norm::inf(), Norm::real(2.0)}) {
    CHECK(value_of(compile_concave_sdfo(identity_sdfo(1, vec({1.0}), 0.0, p, RecourseMode::ConcaveMin))) ==
          doctest::Approx(0.0));
  }
  auto c3 = compile_concave_sdfo(identity_sdfo(2, vec({0.0, 0.0}), 1.0, Norm::inf(), RecourseMode::ConcaveMin));
  CHECK(c3.citation == "Thm 3.3 Cor");
  CHECK(value_of(c3) == doctest::Approx(-2.0));

  try {
    compile_concave_sdfo(identity_sdfo(2, vec({0.0, 0.0}), 1.0, Norm::real(2.0), RecourseMode::ConcaveMin));
    FAIL("expected a refusal");
  } catch (const CompileError& e) {
    CHECK(e.code() == CompileError::Code::NotRepresentable);
    CHECK(e.citation() == "Thm 3.3 case 2");
  }
}

TEST_CASE("dual inner value examples") {
  DFOProblem p = identity_sdfo(2, vec({0.0, 0.0}), 1.0, Norm::one(), RecourseMode::ConvexMax);
  std::get<PiecewiseAffineRecourse>(p.recourse).pieces[0] =
      piece(MatrixXd::Identity(2, 2), VectorXd::Zero(2), MatrixXd::Zero(1, 2), 0.0);
  CHECK(dual_inner_value_convex(p, vec({1.0, 0.0})) == doctest::Approx(-1.0));

  DFOProblem q;
  q.decisions = box(1, 0.0, 1.0);
  q.recourse = recourse({const_piece(vec({1.0}), 0.0, 1), const_piece(vec({-1.0}), 0.0, 1)}, RecourseMode::ConvexMax);
  q.ambiguity = SupportBall{vec({0.0}), 1.0, Norm::one()};
  CHECK(dual_inner_value_convex(q, vec({0.5})) == doctest::Approx(0.0));
  std::get<SupportBall>(q.ambiguity) = SupportBall{vec({2.0}), 0.0, Norm::inf()};
  CHECK(dual_inner_value_convex(q, vec({0.5})) == doctest::Approx(2.0));
  DFOProblem r = identity_sdfo(2, vec({0.0, 0.0}), 1.0, Norm::real(3.0), RecourseMode::ConvexMax);
  CHECK_THROWS_AS(dual_inner_value_convex(r, vec({0.5, 0.5})), CompileError);
}

TEST_CASE("convex sDFO examples") {
  DFOProblem q;
  q.decisions = box(1, 0.0, 1.0);
  q.recourse = recourse({const_piece(vec({1.0}), 0.0, 1), const_piece(vec({-1.0}), 0.0, 1)}, RecourseMode::ConvexMax);
  q.ambiguity = SupportBall{vec({0.0}), 1.0, Norm::one()};
  auto c1 = compile_convex_sdfo(q);
  CHECK(c1.citation == "Thm 3.4(i)");
  CHECK(value_of(c1) == doctest::Approx(0.0));

  DFOProblem s;
  s.decisions = box(1, 0.0, 1.0);
  s.recourse = recourse({piece(mat({{1.0}}), vec({0.0}), mat({{0.0}}), 0.0),
                         piece(mat({{1.0}}), vec({0.0}), mat({{1.0}}), 0.0)},
                        RecourseMode::ConvexMax);
  s.ambiguity = SupportBall{vec({0.0}), 1.0, Norm::one()};
  auto c2 = compile_convex_sdfo(s);
  CHECK(c2.citation == "Thm 3.4(ii)");
  CHECK(value_of(c2) == doctest::Approx(0.0));

  DFOProblem b;
  b.decisions = box(2, 0.0, 1.0);
  auto pr = recourse({piece(mat({{1.0, 0.0}, {0.0, 0.0}}), vec({0.0, 0.0}), mat({{0.0, 0.0}}), 0.0),
                      piece(mat({{0.0, 0.0}, {0.0, 1.0}}), vec({0.0, 0.0}), mat({{0.0, 0.0}}), 0.0)},
                     RecourseMode::ConvexMax);
  pr.block_structure = std::vector<std::vector<int>>{{0}, {1}};
  b.recourse = pr;
  b.ambiguity = SupportBall{vec({0.0, 0.0}), 1.0, Norm::inf()};
  auto c3 = compile_convex_sdfo(b);
  CHECK(c3.citation == "Cor 3.6(ii)");
  CHECK(value_of(c3) == doctest::Approx(-1.0));

  DFOProblem r = identity_sdfo(2, vec({0.0, 0.0}), 1.0, Norm::real(2.0), RecourseMode::ConvexMax);
  try {
    compile_convex_sdfo(r);
    FAIL("expected a refusal");
  } catch (const CompileError& e) {
    CHECK(e.citation() == "Prop 3.5");
  }
}

TEST_CASE("Wasserstein examples") {
  DFOProblem p = identity_sdfo(2, vec({0.3, -0.2}), 0.7, Norm::inf(), RecourseMode::ConcaveMin);
  std::get<PiecewiseAffineRecourse>(p.recourse).pieces.push_back(
      piece(mat({{-1.0, 0.5}, {0.0, 1.0}}), vec({0.2, 0.0}), mat({{1.0, 0.0}}), 0.1));
  DFOProblem w = p;
  w.ambiguity = WassersteinInf{{vec({0.3, -0.2})}, 0.7, Norm::inf()};
  CHECK(value_of(compile_wasserstein(w)) == doctest::Approx(value_of(compile_concave_sdfo(p))).epsilon(1e-9));

  DFOProblem z;
  z.decisions = box(1, 0.0, 1.0);
  z.recourse = recourse({const_piece(vec({1.0}), 0.0, 1), const_piece(vec({-1.0}), 0.0, 1)}, RecourseMode::ConcaveMin);
  z.ambiguity = WassersteinInf{scalars({1.0, -1.0}), 0.0, Norm::one()};
  CHECK(value_of(compile_wasserstein(z)) == doctest::Approx(-1.0));

  // Binary feasibility reduction on X = [-1, 1]^2.
  DFOProblem h;
  h.decisions = box(2, -1.0, 1.0);
  std::vector<AffinePiece> pieces;
  for (int k = 0; k < 2; ++k) {
    for (double sign : {1.0, -1.0}) {
      MatrixXd A = MatrixXd::Zero(2, 2);
      A(k, k) = sign;
      pieces.push_back(piece(A, VectorXd::Zero(2), MatrixXd::Zero(1, 2), 1.0));
    }
  }
  h.recourse = recourse(pieces, RecourseMode::ConcaveMin);
  h.ambiguity = WassersteinInf{{vec({1.0, 0.0}), vec({0.0, 1.0})}, 0.0, Norm::one()};
  CHECK(value_of(compile_wasserstein(h)) == doctest::Approx(0.0));

  DFOProblem bad = p;
  bad.ambiguity = WassersteinInf{{vec({0.0, 0.0}), vec({1.0, 1.0})}, 0.5, Norm::real(2.0)};
  try {
    compile_wasserstein(bad);
    FAIL("expected a refusal");
  } catch (const CompileError& e) {
    CHECK(e.citation() == "Cor 4.3");
  }
  Verdict v = classify(bad);
  CHECK(v.status == VerdictStatus::NotMICPR);
  REQUIRE(v.witness);
  CHECK(certificate_holds(*v.witness));
}

TEST_CASE("finite enumeration and KKT examples") {
  DFOProblem s = value_problem(simplex(scalars({1, 2, 3})));
  CHECK(value_of(compile_finite_enumeration(s)) == doctest::Approx(1.0));
  CHECK(value_of(compile_finite_kkt(s)) == doctest::Approx(1.0));

  DFOProblem f = value_problem(finite(scalars({1, 2, 3}), mat({{1, 1, 0}}), vec({0.8})));
  CHECK(ambiguity_vertices(mat({{1, 1, 0}}), vec({0.8}), 3).size() == 3);
  CHECK(value_of(compile_finite_enumeration(f)) == doctest::Approx(1.4));
  CompiledProgram kkt = compile_finite_kkt(f);
  CHECK(kkt.citation == "Cor 4.5");
  CHECK(value_of(kkt) == doctest::Approx(1.4));
  bool found = false;
  for (const auto& e : kkt.big_m.entries) {
    if (e.name == "M_1,2") {
      found = true;
      CHECK(e.value == doctest::Approx(0.8));
    }
  }
  CHECK(found);

  DFOProblem single;
  single.decisions = box(1, 0.0, 1.0);
  single.recourse = recourse({piece(mat({{1.0}}), vec({0.0}), mat({{0.0}}), 0.0)}, RecourseMode::ConcaveMin);
  single.ambiguity = finite(scalars({1.0, -3.0}), mat({{1, 0}, {-1, 0}}), vec({0.5, -0.5}));
  CHECK(value_of(compile_finite_enumeration(single)) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(compile_finite_kkt(single), CompileError);
  std::get<FinitePolyhedral>(single.ambiguity).big_m = 50.0;
  CHECK(value_of(compile_finite_kkt(single)) == doctest::Approx(-1.0));

  DFOProblem missing = value_problem(finite(scalars({1, 2, 3}), mat({{0.5, -0.3, 0.2}}), vec({0.4})));
  try {
    compile_finite_kkt(missing);
    FAIL("expected MissingBounds");
  } catch (const CompileError& e) {
    CHECK(e.code() == CompileError::Code::MissingBounds);
  }
  std::get<FinitePolyhedral>(missing.ambiguity).big_m = 100.0;
  CHECK(value_of(compile_finite_kkt(missing)) == doctest::Approx(value_of(compile_finite_enumeration(missing))));
}

TEST_CASE("enumeration and KKT agree on random finite instances") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::uniform_int_distribution<int> I(-1, 2);
  for (int trial = 0; trial < 25; ++trial) {
    const int N = 3 + trial % 2;
    const int l = trial % 3;
    DFOProblem p;
    p.decisions = box(2, 0.0, 1.0);
    std::vector<AffinePiece> pieces;
    for (int k = 0; k < 2; ++k) {
      pieces.push_back(piece(mat({{U(rng), U(rng)}}), vec({U(rng)}), mat({{U(rng), U(rng)}}), U(rng)));
    }
    p.recourse = recourse(pieces, trial % 2 ? RecourseMode::ConvexMax : RecourseMode::ConcaveMin);
    std::vector<VectorXd> scen;
    for (int i = 0; i < N; ++i) scen.push_back(vec({U(rng)}));
    MatrixXd D(l, N);
    for (int j = 0; j < l; ++j) {
      for (int i = 0; i < N; ++i) D(j, i) = I(rng);
    }
    // Uniform weights stay feasible.
    VectorXd d = l > 0 ? VectorXd(D * VectorXd::Constant(N, 1.0 / N) + VectorXd::Constant(l, 0.1)) : VectorXd(0);
    p.ambiguity = finite(scen, D, d);
    double a = value_of(compile_finite_enumeration(p));
    double b = value_of(compile_finite_kkt(p));
    CHECK(std::abs(a - b) <= 1e-5);
    double saa = value_of(compile_saa(p));
    double dro = value_of(compile_dro(p));
    CHECK(a <= saa + 1e-6);
    CHECK(saa <= dro + 1e-6);
    double prev = kInf;
    for (double lam : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      DFOProblem h = p;
      h.hurwicz_lambda = lam;
      double v = value_of(compile_hurwicz(h));
      CHECK(v >= lam * a + (1 - lam) * a - 1e-6);
      CHECK(v <= prev + 1e-6);
      prev = v;
    }
  }
}

TEST_CASE("interval examples") {
  DFOProblem p = value_problem(uniform_interval(scalars({1, 2, 3, 4}), 20, 1));
  CompiledProgram c = compile_interval_polyhedral(p);
  CHECK(c.citation == "Cor 4.7");
  CHECK(c.notes.at("kappa") == doctest::Approx(10.0 / 3.0));
  CHECK(c.notes.at("floor_kappa") == 3.0);
  CHECK(value_of(c) == doctest::Approx(2.2));

  IntervalPolyhedral s = uniform_interval(scalars({1, 2, 3, 4}), 20, 1);
  s.lbar(2) = -4;  // breaks the uniform pattern
  CompiledProgram g = compile_interval_polyhedral(value_problem(s));
  CHECK(g.citation == "Cor 4.6");

  IntervalPolyhedral zero;
  zero.scenarios = scalars({1, 2, 3});
  zero.p0 = vec({0.2, 0.3, 0.5});
  zero.lbar = Eigen::VectorXi::Zero(3);
  zero.ubar = Eigen::VectorXi::Zero(3);
  zero.q = 1;
  DFOProblem z = value_problem(zero);
  CHECK(value_of(compile_interval_polyhedral(z)) == doctest::Approx(value_of(compile_saa(z))));
  CHECK(value_of(compile_saa(z)) == doctest::Approx(2.3));
}

TEST_CASE("Hurwicz examples") {
  DFOProblem p = value_problem(simplex(scalars({1, 2, 3})));
  CHECK_THROWS_AS(compile_hurwicz(p), CompileError);
  p.hurwicz_lambda = 0.5;
  CHECK(value_of(compile_hurwicz(p)) == doctest::Approx(2.0));
  p.hurwicz_lambda = 1.0;
  CHECK(value_of(compile_hurwicz(p)) == doctest::Approx(value_of(compile_finite_kkt(p))));
  p.hurwicz_lambda = 0.0;
  CHECK(value_of(compile_hurwicz(p)) == doctest::Approx(3.0));

  DFOProblem q = value_problem(uniform_interval(scalars({1, 2, 3, 4}), 20, 1));
  q.hurwicz_lambda = 0.5;
  // DRO side caps the largest values at 0.3: 0.1*1 + 0.3*(2+3+4) = 2.8.
  CHECK(value_of(compile_hurwicz(q)) == doctest::Approx(0.5 * 2.2 + 0.5 * 2.8));
}

TEST_CASE("radius monotonicity on support balls") {
  for (Norm p : {Norm::one(), Norm::inf()}) {
    double prev = kInf;
    for (double theta : {0.0, 0.25, 0.5, 1.0}) {
      DFOProblem d = identity_sdfo(2, vec({0.5, -0.5}), theta, p, RecourseMode::ConcaveMin);
      double v = value_of(compile_concave_sdfo(d));
      CHECK(v <= prev + 1e-9);
      prev = v;
    }
  }
}
