#include "dfo/corpus.hpp"

#include "dfo/oracle.hpp"
#include "dfo/reform.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>

namespace dfo {

namespace {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  // Uniform on [lo, hi], rounded to two decimals.
  double u(double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    return std::round(d(rng_) * 100.0) / 100.0;
  }
  int i(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  VectorXd vec(int n, double lo, double hi) {
    VectorXd v(n);
    for (int k = 0; k < n; ++k) v(k) = u(lo, hi);
    return v;
  }
  MatrixXd mat(int r, int c, double lo, double hi) {
    MatrixXd m(r, c);
    for (int a = 0; a < r; ++a)
      for (int b = 0; b < c; ++b) m(a, b) = u(lo, hi);
    return m;
  }

 private:
  std::mt19937_64 rng_;
};

DecisionSet decisions(Gen& g, int n) {
  DecisionSet X = DecisionSet::box(VectorXd::Zero(n), VectorXd::Ones(n));
  if (g.i(0, 1) == 1) {
    X.ineq_matrix = MatrixXd::Ones(1, n);
    X.ineq_rhs = VectorXd::Constant(1, g.u(0.6, 1.5));
  }
  return X;
}

AffinePiece make_piece(Gen& g, int n, int m, bool dependent) {
  AffinePiece p;
  p.a = AffineMap(dependent ? g.mat(m, n, -1, 1) : MatrixXd::Zero(m, n), g.vec(m, -1, 1));
  p.b = AffineMap(g.mat(1, n, -1, 1), VectorXd::Constant(1, g.u(-1, 1)));
  return p;
}

PiecewiseAffineRecourse pieces(Gen& g, int n, int m, int K, RecourseMode mode, bool dependent = true) {
  PiecewiseAffineRecourse r;
  r.mode = mode;
  for (int k = 0; k < K; ++k) r.pieces.push_back(make_piece(g, n, m, dependent));
  return r;
}

std::vector<VectorXd> points(Gen& g, int count, int m) {
  std::vector<VectorXd> out;
  for (int k = 0; k < count; ++k) out.push_back(g.vec(m, -1, 1));
  return out;
}

struct Builder {
  std::vector<CorpusFixture> out;

  void add(const std::string& file, DFOProblem p, const std::string& route, std::vector<std::string> methods) {
    const oracle::OracleValue o = oracle::oracle_value(p);
    if (!o.exact) throw Error("corpus: oracle is approximate for " + file);
    CorpusFixture f;
    f.problem = std::move(p);
    f.entry.file = file;
    f.entry.route = route;
    f.entry.methods = std::move(methods);
    f.entry.expected = o.value;
    out.push_back(std::move(f));
  }

  void refusal(const std::string& file, DFOProblem p, const std::string& verdict, const std::string& citation) {
    CorpusFixture f;
    f.problem = std::move(p);
    f.entry.file = file;
    f.entry.route = "refusal";
    f.entry.verdict = verdict;
    f.entry.citation = citation;
    out.push_back(std::move(f));
  }
};

std::string name(const char* prefix, int k) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%02d.json", prefix, k);
  return buf;
}

FinitePolyhedral finite_set(Gen& g, int N, int l) {
  FinitePolyhedral s;
  s.scenarios = points(g, N, 1);
  s.D = MatrixXd(l, N);
  for (int a = 0; a < l; ++a)
    for (int b = 0; b < N; ++b) s.D(a, b) = g.i(-1, 2);
  // Uniform weights stay feasible.
  s.d = l > 0 ? VectorXd((s.D * VectorXd::Constant(N, 1.0 / N)).array() + 0.1) : VectorXd(0);
  for (int a = 0; a < l; ++a) s.d(a) = std::ceil(s.d(a) * 100.0) / 100.0;
  return s;
}

IntervalPolyhedral interval_set(Gen& g, int N, bool uniform) {
  IntervalPolyhedral s;
  s.scenarios = points(g, N, 1);
  const int a = g.i(2, 4);
  s.q = N * a;
  s.p0 = VectorXd::Constant(N, 1.0 / N);
  s.lbar = Eigen::VectorXi::Constant(N, -a);
  s.ubar = Eigen::VectorXi::Constant(N, g.i(1, 3));
  if (!uniform) {
    for (int k = 0; k < N; ++k) {
      s.lbar(k) = -g.i(1, a);
      s.ubar(k) = g.i(1, 3);
    }
  }
  return s;
}

DFOProblem problem(DecisionSet X, Recourse r, AmbiguitySet a) {
  DFOProblem p;
  p.decisions = std::move(X);
  p.recourse = std::move(r);
  p.ambiguity = std::move(a);
  return p;
}

}  // namespace

std::vector<CorpusFixture> build_corpus(std::uint64_t seed) {
  Gen g(seed);
  Builder b;
  const auto concave = RecourseMode::ConcaveMin;
  const auto convex = RecourseMode::ConvexMax;

  // The three-scenario example: D = (1, 1, 0), d = 0.8, Q = xi.
  {
    FinitePolyhedral s;
    s.scenarios = {VectorXd::Constant(1, 1.0), VectorXd::Constant(1, 2.0), VectorXd::Constant(1, 3.0)};
    s.D = MatrixXd::Ones(1, 3);
    s.D(0, 2) = 0.0;
    s.d = VectorXd::Constant(1, 0.8);
    PiecewiseAffineRecourse r;
    r.pieces.push_back({AffineMap(MatrixXd::Zero(1, 1), VectorXd::Ones(1)), AffineMap(MatrixXd::Zero(1, 1), VectorXd::Zero(1))});
    b.add("finite_simplex_3.json", problem(DecisionSet::box(VectorXd::Zero(1), VectorXd::Ones(1)), r, s), "finite",
          {"enumerate", "kkt", "auto"});
  }

  for (int k = 0; k < 20; ++k) {
    const Norm p = k % 2 ? Norm::inf() : Norm::one();
    b.add(name(k % 2 ? "sdfo_concave_pinf" : "sdfo_concave_p1", k / 2),
          problem(decisions(g, 2), pieces(g, 2, 2, g.i(2, 3), concave), SupportBall{g.vec(2, -1, 1), g.u(0.2, 1), p}),
          "sdfo-concave", {"sdfo", "auto"});
  }

  for (int k = 0; k < 15; ++k) {
    const Norm p = k % 2 ? Norm::inf() : Norm::one();
    const int family = k % 5;  // constant, shared, shared, block, block
    auto r = pieces(g, 2, 2, 2, convex, family != 0);
    if (family == 1 || family == 2) {
      for (auto& pc : r.pieces) pc.a = r.pieces.front().a;
    }
    Norm norm = p;
    if (family >= 3) {
      norm = Norm::inf();
      r.pieces[0].a.matrix.row(1).setZero();
      r.pieces[0].a.offset(1) = 0.0;
      r.pieces[1].a.matrix.row(0).setZero();
      r.pieces[1].a.offset(0) = 0.0;
      r.block_structure = std::vector<std::vector<int>>{{0}, {1}};
    }
    b.add(name("sdfo_convex", k),
          problem(decisions(g, 2), r, SupportBall{g.vec(2, -1, 1), g.u(0.2, 1), norm}), "sdfo-convex",
          {"sdfo", "auto"});
  }

  for (int k = 0; k < 14; ++k) {
    const Norm p = k % 2 ? Norm::inf() : Norm::one();
    const int N = k < 2 ? 1 : g.i(2, 3);
    b.add(name(k % 2 ? "wasserstein_concave_pinf" : "wasserstein_concave_p1", k / 2),
          problem(decisions(g, 2), pieces(g, 2, 2, 2, concave), WassersteinInf{points(g, N, 2), g.u(0.1, 0.8), p}),
          "wasserstein-concave", {"wasserstein", "auto"});
  }
  for (int k = 0; k < 4; ++k) {
    const Norm p = k % 2 ? Norm::inf() : Norm::one();
    b.add(name("wasserstein_convex", k),
          problem(decisions(g, 2), pieces(g, 2, 2, 2, convex, false), WassersteinInf{points(g, 2, 2), g.u(0.1, 0.8), p}),
          "wasserstein-convex", {"wasserstein", "auto"});
  }

  for (int k = 0; k < 25; ++k) {
    const int N = 3 + k % 3;
    const int l = k % 4 == 3 ? std::min(3, N - 1) : k % 3;
    b.add(name("finite", k),
          problem(decisions(g, 2), pieces(g, 2, 1, 2, k % 2 ? convex : concave), finite_set(g, N, l)), "finite",
          {"enumerate", "kkt"});
  }

  for (int k = 0; k < 14; ++k) {
    const bool uniform = k < 9;
    const int N = 3 + k % 4;
    b.add(name(uniform ? "interval_uniform" : "interval", uniform ? k : k - 9),
          problem(decisions(g, 2), pieces(g, 2, 1, 2, k % 2 ? convex : concave), interval_set(g, N, uniform)),
          "interval", {"interval", "auto"});
  }

  const double lambdas[] = {0.0, 0.5, 1.0};
  for (int k = 0; k < 9; ++k) {
    auto p = problem(decisions(g, 2), pieces(g, 2, 1, 2, convex), finite_set(g, 3 + k % 2, k % 3));
    p.hurwicz_lambda = lambdas[k % 3];
    b.add(name("hurwicz_finite", k), p, "hurwicz-finite", {"auto"});
  }
  for (int k = 0; k < 6; ++k) {
    auto p = problem(decisions(g, 2), pieces(g, 2, 1, 2, convex), interval_set(g, 3 + k % 2, k < 3));
    p.hurwicz_lambda = lambdas[k % 3];
    b.add(name("hurwicz_interval", k), p, "hurwicz-interval", {"auto"});
  }

  b.refusal("sdfo_p2_refusal.json",
            problem(decisions(g, 2), pieces(g, 2, 2, 2, concave), SupportBall{g.vec(2, -1, 1), 0.5, Norm::real(2)}),
            "NotMICPR", "Thm 3.3 case 2");
  b.refusal("sdfo_p3_refusal.json",
            problem(decisions(g, 2), pieces(g, 2, 2, 3, concave), SupportBall{g.vec(2, -1, 1), 0.7, Norm::real(3)}),
            "NotMICPR", "Thm 3.3 case 2");
  b.refusal("sdfo_convex_p2_refusal.json",
            problem(decisions(g, 2), pieces(g, 2, 2, 2, convex), SupportBall{g.vec(2, -1, 1), 0.5, Norm::real(2)}),
            "NotMICPR", "Prop 3.5");
  b.refusal("wasserstein_p2_refusal.json",
            problem(decisions(g, 2), pieces(g, 2, 2, 2, concave), WassersteinInf{points(g, 2, 2), 0.4, Norm::real(2)}),
            "NotMICPR", "Cor 4.3");
  b.refusal("wasserstein_p1_5_refusal.json",
            problem(decisions(g, 2), pieces(g, 2, 2, 2, concave), WassersteinInf{points(g, 3, 2), 0.3, Norm::real(1.5)}),
            "NotMICPR", "Cor 4.3");
  for (int N : {3, 4, 6}) {
    L2Ball s;
    s.scenarios = points(g, N, 1);
    s.p0 = VectorXd::Constant(N, 1.0 / N);
    s.radius = std::floor(100.0 * 0.9 * std::sqrt(1.0 / (N * (N - 1.0)))) / 100.0;
    b.refusal(name("l2_ball_refusal", N), problem(decisions(g, 2), pieces(g, 2, 1, 2, concave), s), "NotMICPR",
              "Prop 4.8");
  }

  {
    FinitePolyhedral s;
    s.scenarios = points(g, 3, 1);
    s.D = MatrixXd(1, 3);
    s.D << 0.5, -0.3, 0.2;
    s.d = VectorXd::Constant(1, 0.3);
    CorpusFixture f;
    f.problem = problem(decisions(g, 2), pieces(g, 2, 1, 2, concave), s);
    f.entry.file = "kkt_missing_bounds.json";
    f.entry.route = "error";
    f.entry.methods = {"kkt"};
    f.entry.error = to_string(CompileError::Code::MissingBounds);
    b.out.push_back(std::move(f));
  }
  return b.out;
}

void write_corpus(const std::vector<CorpusFixture>& corpus, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<FixtureEntry> entries;
  for (const auto& f : corpus) {
    write_text(dir / f.entry.file, serialize_problem(f.problem));
    entries.push_back(f.entry);
  }
  write_text(dir / "manifest.json", manifest_to_json(entries));
}

FixtureCheck verify_fixture(const FixtureEntry& entry, const DFOProblem& problem, const SolverConfig& config,
                            double tol) {
  FixtureCheck check;
  check.file = entry.file;
  auto fail = [&](const std::string& line) {
    check.passed = false;
    check.lines.push_back("FAIL " + line);
  };
  for (const auto& m : entry.methods) {
    const auto method = parse_method(m);
    if (!method) {
      fail(m + ": unknown method");
      continue;
    }
    try {
      const CompiledProgram compiled = compile(problem, *method);
      const CompiledResult r = solve_compiled(compiled, config);
      if (entry.error) {
        fail(m + ": expected " + *entry.error + ", compiled under " + compiled.citation);
        continue;
      }
      if (r.status != SolveStatus::Optimal) {
        fail(m + ": solver status " + std::string(to_string(r.status)));
        continue;
      }
      if (entry.expected) {
        const double delta = std::abs(r.value - *entry.expected);
        check.max_delta = std::max(check.max_delta, delta);
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s: compiled %.10g oracle %.10g delta %.3g (%s)", m.c_str(), r.value,
                      *entry.expected, delta, compiled.citation.c_str());
        if (delta > tol) {
          fail(buf);
        } else {
          check.lines.push_back(std::string("ok   ") + buf);
        }
      }
    } catch (const CompileError& e) {
      const std::string code = to_string(e.code());
      if (entry.error && *entry.error == code) {
        check.lines.push_back("ok   " + m + ": " + code + " (" + e.citation() + ")");
      } else {
        fail(m + ": " + code + " (" + e.citation() + "): " + e.what());
      }
    } catch (const std::exception& e) {
      fail(m + ": " + e.what());
    }
  }
  if (entry.verdict) {
    const Verdict v = classify(problem);
    const std::string got = std::string(to_string(v.status)) + " (" + v.citation + ")";
    const std::string want = *entry.verdict + " (" + entry.citation.value_or("") + ")";
    if (got != want) {
      fail("classify: got " + got + ", expected " + want);
    } else if (v.status == VerdictStatus::NotMICPR) {
      if (!v.witness || !oracle::check_midpoint_certificate(v.witness->membership, v.witness->points)) {
        fail("classify: " + got + " without a valid midpoint certificate");
      } else {
        check.lines.push_back("ok   classify: " + got + ", witness of " + std::to_string(v.witness->points.size()) +
                              " points certified");
      }
    } else {
      check.lines.push_back("ok   classify: " + got);
    }
  }
  return check;
}

std::vector<FixtureCheck> verify_corpus(const std::filesystem::path& dir, const SolverConfig& config, double tol) {
  std::vector<FixtureCheck> out;
  for (const auto& entry : read_manifest(dir / "manifest.json")) {
    try {
      out.push_back(verify_fixture(entry, load_problem(dir / entry.file), config, tol));
    } catch (const std::exception& e) {
      FixtureCheck c;
      c.file = entry.file;
      c.passed = false;
      c.lines.push_back(std::string("FAIL load: ") + e.what());
      out.push_back(std::move(c));
    }
  }
  return out;
}

std::filesystem::path fixture_root() {
  const char* env = std::getenv("DFOKIT_FIXTURES");
  return env && *env ? std::filesystem::path(env) : std::filesystem::path("fixtures");
}

}  // namespace dfo
