#include "dfo/cli.hpp"

#include "dfo/bench.hpp"
#include "dfo/corpus.hpp"
#include "dfo/io.hpp"
#include "dfo/oracle.hpp"
#include "dfo/reform.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>

namespace dfo::cli {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string vector_text(const VectorXd& v) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v(i));
  return s + "]";
}

struct Options {
  std::string file;
  std::string method = "auto";
  double tol = 1e-5;
  int workers = 1;
  long node_limit = 1'000'000;
  double time_limit_s = 0.0;
  std::uint64_t seed = 1;
  std::string out;

  SolverConfig solver() const {
    SolverConfig c;
    c.workers = workers;
    c.node_limit = node_limit;
    if (time_limit_s > 0.0) c.time_limit_s = time_limit_s;
    return c;
  }
};

void add_solver_flags(CLI::App* app, Options& o) {
  app->add_option("--tol", o.tol, "Agreement tolerance")->check(CLI::PositiveNumber);
  app->add_option("--workers", o.workers, "Worker threads for batches and trials")->check(CLI::PositiveNumber);
  app->add_option("--node-limit", o.node_limit, "Branch-and-bound node limit")->check(CLI::PositiveNumber);
  app->add_option("--time-limit-s", o.time_limit_s, "Wall-clock limit per solve in seconds (0 = none)");
}

Method method_of(const std::string& text) {
  auto m = parse_method(text);
  if (!m) throw CLI::ValidationError("--method", "unknown method '" + text + "'");
  return *m;
}

void print_ledger(std::ostream& out, const BigMLedger& ledger) {
  if (ledger.entries.empty()) {
    out << "big-M: none\n";
    return;
  }
  out << "big-M: " << ledger.entries.size() << " entries, max " << num(ledger.max_value()) << "\n";
  for (const auto& e : ledger.entries)
    out << "  " << e.name << " = " << num(e.value) << "  [" << e.formula << "; " << e.citation << "]\n";
}

int cmd_classify(const Options& o, std::ostream& out) {
  const DFOProblem p = load_problem(o.file);
  const Verdict v = classify(p);
  out << to_string(v.status) << " (" << v.citation << ")\n";
  if (!v.detail.empty()) out << v.detail << "\n";
  if (v.witness) {
    const bool certified = oracle::check_midpoint_certificate(v.witness->membership, v.witness->points);
    out << "witness: " << v.witness->points.size() << " points, midpoint certificate "
        << (certified ? "passes" : "fails") << "\n";
  }
  return v.status == VerdictStatus::NotMICPR ? kProblemFailure : kOk;
}

int cmd_solve(const Options& o, std::ostream& out, std::ostream& err) {
  const DFOProblem p = load_problem(o.file);
  const CompiledProgram compiled = compile(p, method_of(o.method));
  const CompiledResult r = solve_compiled(compiled, o.solver());
  if (!o.out.empty()) write_text(o.out, result_to_json(compiled, r));
  if (r.status != SolveStatus::Optimal) {
    err << "error: solver status " << to_string(r.status) << " (" << compiled.citation << ")\n";
    return kProblemFailure;
  }
  out << "v* = " << num(r.value) << "\n";
  out << "route: " << compiled.citation << " ("
      << (compiled.kind == CompiledProgram::Kind::Batch ? "batch of " + std::to_string(compiled.programs.size())
                                                          : std::string("single program"))
      << ")\n";
  out << "member: " << r.argmin << " (" << r.label << ")\n";
  if (!r.excluded.empty()) out << "warning: " << r.excluded.size() << " infeasible members excluded\n";
  out << "x = " << vector_text(r.x.head(compiled.num_decisions)) << "\n";
  print_ledger(out, compiled.big_m);
  return kOk;
}

int cmd_export(const Options& o, std::ostream& out) {
  const DFOProblem p = load_problem(o.file);
  const CompiledProgram compiled = compile(p, method_of(o.method));
  const std::string stem = std::filesystem::path(o.file).stem().string();
  const auto files = export_compiled(compiled, o.out.empty() ? "export" : o.out, stem);
  int renamed = 0;
  for (const auto& f : files) {
    out << f.mps.string() << "\n";
    renamed += f.renamed;
  }
  if (renamed > 0) out << "renamed " << renamed << " names longer than 8 characters (see .names files)\n";
  return kOk;
}

int verify_file(const Options& o, std::ostream& out) {
  const DFOProblem p = load_problem(o.file);
  const oracle::OracleValue ov = oracle::oracle_value(p);
  const CompiledProgram compiled = compile(p, method_of(o.method));
  const CompiledResult r = solve_compiled(compiled, o.solver());
  if (r.status != SolveStatus::Optimal) {
    out << "compiled: " << to_string(r.status) << "\n";
    return kProblemFailure;
  }
  const double delta = std::abs(r.value - ov.value);
  out << "oracle " << num(ov.value) << " (" << ov.route << (ov.exact ? "" : ", approximate") << ")\n";
  out << "compiled " << num(r.value) << " (" << compiled.citation << ")\n";
  out << "delta " << num(delta) << "\n";
  const double allowed = ov.exact ? o.tol : o.tol + ov.resolution;
  return delta <= allowed ? kOk : kProblemFailure;
}

int cmd_verify(const Options& o, std::ostream& out) {
  std::filesystem::path target = o.file.empty() ? fixture_root() : std::filesystem::path(o.file);
  if (!std::filesystem::is_directory(target)) return verify_file(o, out);
  const auto checks = verify_corpus(target, o.solver(), o.tol);
  int failed = 0;
  double max_delta = 0.0;
  for (const auto& c : checks) {
    out << (c.passed ? "PASS " : "FAIL ") << c.file << "\n";
    for (const auto& line : c.lines) out << "  " << line << "\n";
    failed += c.passed ? 0 : 1;
    max_delta = std::max(max_delta, c.max_delta);
  }
  out << checks.size() << " fixtures, " << failed << " failed, max delta " << num(max_delta) << "\n";
  return failed == 0 ? kOk : kProblemFailure;
}

struct BenchFlags {
  TRAConfig config;
  bool paper_scale = false;
};

int cmd_bench(const Options& o, BenchFlags flags, std::ostream& out, std::ostream& err) {
  TRAConfig c = flags.config;
  if (flags.paper_scale) {
    TRAConfig paper = paper_scale_config();
    paper.trials = c.trials;
    paper.test_count = c.test_count;
    paper.variance_as_sd = c.variance_as_sd;
    paper.variance_per_customer = c.variance_per_customer;
    c = paper;
  }
  c.seed = o.seed;
  const auto report = run_experiment(c, o.solver());
  const std::filesystem::path dir = o.out.empty() ? "bench_out" : o.out;
  write_report(report, dir);
  out << "wrote " << (dir / "report.csv").string() << ", raw.csv, training.csv, quantiles.dat\n";
  const auto violations = check_ordering(report);
  for (const auto& v : violations) err << "ordering: " << v << "\n";
  out << "ordering invariants: " << (violations.empty() ? "hold" : "violated") << "\n";
  return violations.empty() ? kOk : kProblemFailure;
}

int cmd_gen_fixture(const Options& o, const std::string& kind, const std::vector<double>& weights,
                    std::ostream& out) {
  if (kind == "corpus") {
    const std::filesystem::path dir = o.out.empty() ? fixture_root() : std::filesystem::path(o.out);
    const auto corpus = build_corpus(o.seed == 1 ? 20240601 : o.seed);
    write_corpus(corpus, dir);
    out << "wrote " << corpus.size() << " fixtures and manifest.json to " << dir.string() << "\n";
    return kOk;
  }
  std::string doc;
  if (kind == "tra") {
    TRAConfig c;
    c.seed = o.seed;
    doc = serialize_problem(generate_tra(c).problem);
  } else if (kind == "set-partition") {
    if (weights.empty()) throw CLI::ValidationError("--weights", "set-partition needs --weights");
    oracle::SetPartition sp{Eigen::Map<const VectorXd>(weights.data(), static_cast<Eigen::Index>(weights.size()))};
    const auto inst = oracle::gen_hardness_instance(sp);
    doc = serialize_problem(inst.problem);
    if (inst.threshold) out << "# threshold " << num(*inst.threshold) << " on yes-instances\n";
  } else {
    throw CLI::ValidationError("kind", "unknown fixture kind '" + kind + "' (corpus, tra, set-partition)");
  }
  if (o.out.empty()) {
    out << doc;
  } else {
    write_text(o.out, doc);
    out << "wrote " << o.out << "\n";
  }
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"dfokit: distributionally favorable optimization toolkit", "dfokit"};
  app.require_subcommand(1);
  Options o;
  BenchFlags bench;
  std::string kind;
  std::vector<double> weights;

  auto* classify_cmd = app.add_subcommand("classify", "Print the representability verdict");
  classify_cmd->add_option("file", o.file, "Problem document")->required();

  auto* solve_cmd = app.add_subcommand("solve", "Compile and solve a problem");
  solve_cmd->add_option("file", o.file, "Problem document")->required();
  solve_cmd->add_option("--method", o.method, "auto|enumerate|kkt|interval|wasserstein|sdfo");
  solve_cmd->add_option("--out", o.out, "Write the result as JSON");
  add_solver_flags(solve_cmd, o);

  auto* export_cmd = app.add_subcommand("export", "Write compiled programs as MPS");
  export_cmd->add_option("file", o.file, "Problem document")->required();
  export_cmd->add_option("--method", o.method, "auto|enumerate|kkt|interval|wasserstein|sdfo");
  export_cmd->add_option("--out", o.out, "Output directory (default: export)");

  auto* verify_cmd = app.add_subcommand("verify", "Compare compiled values with the oracle or a fixture corpus");
  verify_cmd->add_option("target", o.file, "Problem document or corpus directory (default: fixture root)");
  verify_cmd->add_option("--method", o.method, "Method for a single document");
  add_solver_flags(verify_cmd, o);

  auto* bench_cmd = app.add_subcommand("bench", "Run the resource allocation experiment");
  auto& c = bench.config;
  bench_cmd->add_option("--n", c.n, "Facilities");
  bench_cmd->add_option("--n1", c.n1, "Customers");
  bench_cmd->add_option("--N", c.N, "Training samples");
  bench_cmd->add_option("--eps", c.eps, "Epsilon of the interval set");
  bench_cmd->add_option("--trials", c.trials, "Repeated trials");
  bench_cmd->add_option("--test-count", c.test_count, "Out-of-sample scenarios per trial");
  bench_cmd->add_option("--lambda-grid", c.lambda_grid, "Hurwicz optimism levels")->delimiter(',');
  bench_cmd->add_flag("--variance-as-sd", c.variance_as_sd, "Read the variance numbers as standard deviations");
  bench_cmd->add_flag("--variance-per-customer", c.variance_per_customer, "Scale variances by dbar / n1");
  bench_cmd->add_flag("--paper-scale", bench.paper_scale, "n = 8, n1 = 20, N = 45");
  bench_cmd->add_option("--seed", o.seed, "RNG seed");
  bench_cmd->add_option("--out", o.out, "Output directory (default: bench_out)");
  add_solver_flags(bench_cmd, o);

  auto* gen_cmd = app.add_subcommand("gen-fixture", "Generate fixtures: corpus, tra, set-partition");
  gen_cmd->add_option("kind", kind, "corpus|tra|set-partition")->required();
  gen_cmd->add_option("--weights", weights, "Set-partition weights")->delimiter(',');
  gen_cmd->add_option("--seed", o.seed, "RNG seed");
  gen_cmd->add_option("--out", o.out, "Output file or directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*classify_cmd) return cmd_classify(o, out);
    if (*solve_cmd) return cmd_solve(o, out, err);
    if (*export_cmd) return cmd_export(o, out);
    if (*verify_cmd) return cmd_verify(o, out);
    if (*bench_cmd) return cmd_bench(o, bench, out, err);
    if (*gen_cmd) return cmd_gen_fixture(o, kind, weights, out);
  } catch (const CLI::ValidationError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const CompileError& e) {
    err << "error: " << to_string(e.code()) << " (" << e.citation() << "): " << e.what() << "\n";
    return kProblemFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kProblemFailure;
  }
  return kUsage;
}

int run(int argc, const char* const* argv) { return run(argc, argv, std::cout, std::cerr); }

}  // namespace dfo::cli
