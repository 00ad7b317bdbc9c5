#include "dfo/bench.hpp"

#include "dfo/io.hpp"
#include "dfo/reform.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

namespace dfo {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// 1 - eps = a / b in lowest terms.
std::pair<long, long> complement_fraction(double eps) {
  const double c = 1.0 - eps;
  for (long b = 1; b <= 1000000; ++b) {
    const double a = std::round(c * b);
    if (std::abs(c * b - a) <= 1e-9 * b) return {static_cast<long>(a), b};
  }
  throw std::invalid_argument("eps is not a rational with denominator <= 1e6");
}

class Sampler {
 public:
  Sampler(std::uint64_t seed, int trial) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial)};
    rng_.seed(seq);
  }

  // Gaussian conditioned on being nonnegative, by rejection.
  double truncated(double mean, double sd) {
    if (sd <= 0.0) return std::max(0.0, mean);
    std::normal_distribution<double> dist(mean, sd);
    for (int i = 0; i < 10000; ++i) {
      double v = dist(rng_);
      if (v >= 0.0) return v;
    }
    return 0.0;
  }

 private:
  std::mt19937_64 rng_;
};

struct Method {
  std::string name;
  double lambda;
};

std::vector<Method> methods_of(const TRAConfig& config) {
  std::vector<Method> out{{"DFO", 1.0}, {"DRO", 0.0}};
  for (double l : config.lambda_grid) out.push_back({"Hurwicz", l});
  return out;
}

struct TrialResult {
  std::vector<TrainingRow> training;
  std::vector<std::vector<double>> costs;  // per method
  std::string error;
};

TrialResult run_trial(const TRAConfig& config, int trial, const SolverConfig& solver) {
  TrialResult out;
  const TRAInstance inst = generate_tra(config, trial);
  for (const auto& m : methods_of(config)) {
    try {
      DFOProblem p = inst.problem;
      CompiledProgram compiled;
      if (m.name == "DFO") {
        compiled = compile_interval_polyhedral(p);
      } else if (m.name == "DRO") {
        compiled = compile_dro(p);
      } else {
        p.hurwicz_lambda = m.lambda;
        compiled = compile_hurwicz(p);
      }
      CompiledResult r = solve_compiled(compiled, solver);
      if (r.status != SolveStatus::Optimal) throw BenchError(std::string("solver status ") + to_string(r.status));
      VectorXd x = r.x.head(config.n);
      out.training.push_back({trial, m.name, m.lambda, r.value, x});
      std::vector<double> costs;
      for (const auto& xi : inst.test) costs.push_back(evaluate_recourse(p.recourse, x, xi));
      out.costs.push_back(std::move(costs));
    } catch (const std::exception& e) {
      out.error = "trial " + std::to_string(trial) + ", method " + m.name + " (lambda " + num(m.lambda) + "): " + e.what();
      return out;
    }
  }
  return out;
}

}  // namespace

void TRAConfig::check() const {
  if (n < 1 || n1 < 1 || N < 1) throw std::invalid_argument("n, n1 and N must be positive");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0, 1)");
  if (!(rho > h && h > 0.0)) throw std::invalid_argument("rho > h > 0 fails");
  const double ne = N * eps;
  if (std::abs(ne - std::round(ne)) <= 1e-9) throw std::invalid_argument("N * eps must not be an integer");
  complement_fraction(eps);
  if (!(outlier_rate >= 0.0 && outlier_rate <= 1.0)) throw std::invalid_argument("outlier_rate must lie in [0, 1]");
  if (test_count < 1 || trials < 1) throw std::invalid_argument("test_count and trials must be positive");
  for (double l : lambda_grid)
    if (!(l >= 0.0 && l <= 1.0)) throw std::invalid_argument("lambda grid values must lie in [0, 1]");
}

double TRAConfig::mu() const { return 1.0 / (N - N * eps) - 1.0 / N; }

TRAConfig paper_scale_config() {
  TRAConfig c;
  c.n = 8;
  c.n1 = 20;
  c.N = 45;
  c.lambda_grid = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  return c;
}

IntervalScaling interval_scaling(const TRAConfig& config) {
  auto [a, b] = complement_fraction(config.eps);
  return {static_cast<int>(config.N * a), static_cast<int>(-a), static_cast<int>(b - a)};
}

TRAInstance generate_tra(const TRAConfig& config, int trial) {
  config.check();
  const int n = config.n, n1 = config.n1, N = config.N;
  Sampler rng(config.seed, trial);
  auto sd_of = [&](double variance) { return config.variance_as_sd ? variance : std::sqrt(variance); };
  const double scale = config.variance_per_customer ? config.dbar / n1 : config.dbar;
  const double mean = config.demand_mean.value_or(config.dbar / n1);
  const double demand_sd = sd_of(config.demand_variance_factor * scale);
  const double outlier_sd = sd_of(config.outlier_variance_factor * scale);
  const double test_sd = sd_of(config.test_variance_factor * scale);

  TRAInstance inst;
  inst.transport_cost.resize(n, n1);
  for (int s = 0; s < n; ++s)
    for (int j = 0; j < n1; ++j) inst.transport_cost(s, j) = rng.truncated(config.cost_mean, sd_of(config.cost_variance));

  std::vector<VectorXd> training;
  for (int i = 0; i < N; ++i) {
    VectorXd xi(n1);
    for (int j = 0; j < n1; ++j) {
      const double base = rng.truncated(mean, demand_sd);
      const double outlier = rng.truncated(mean, outlier_sd);
      xi(j) = (1.0 - config.outlier_rate) * base + config.outlier_rate * outlier;
    }
    training.push_back(xi);
  }
  for (int t = 0; t < config.test_count; ++t) {
    VectorXd xi(n1);
    for (int j = 0; j < n1; ++j) xi(j) = rng.truncated(mean, test_sd);
    inst.test.push_back(xi);
  }

  // Second stage: y (s major), u (unmet demand), v (surplus).
  const int ny = n * n1, m = ny + n1 + n;
  LPRecourse r;
  r.cost.resize(m);
  for (int s = 0; s < n; ++s)
    for (int j = 0; j < n1; ++j) r.cost(s * n1 + j) = inst.transport_cost(s, j);
  r.cost.segment(ny, n1).setConstant(config.rho);
  r.cost.segment(ny + n1, n).setConstant(config.h);
  r.recourse_matrix = MatrixXd::Zero(n + n1, m);
  r.tech_x = MatrixXd::Zero(n + n1, n);
  r.tech_xi = MatrixXd::Zero(n + n1, n1);
  r.rhs = VectorXd::Zero(n + n1);
  for (int s = 0; s < n; ++s) {
    for (int j = 0; j < n1; ++j) r.recourse_matrix(s, s * n1 + j) = 1.0;
    r.recourse_matrix(s, ny + n1 + s) = 1.0;
    r.tech_x(s, s) = -1.0;
    r.senses.push_back(RowSense::Equal);
  }
  for (int j = 0; j < n1; ++j) {
    for (int s = 0; s < n; ++s) r.recourse_matrix(n + j, s * n1 + j) = 1.0;
    r.recourse_matrix(n + j, ny + j) = 1.0;
    r.tech_xi(n + j, j) = -1.0;
    r.senses.push_back(RowSense::GreaterEqual);
  }
  r.lower = VectorXd::Zero(m);

  const IntervalScaling sc = interval_scaling(config);
  IntervalPolyhedral amb;
  amb.scenarios = std::move(training);
  amb.p0 = VectorXd::Constant(N, 1.0 / N);
  amb.lbar = Eigen::VectorXi::Constant(N, sc.lbar);
  amb.ubar = Eigen::VectorXi::Constant(N, sc.ubar);
  amb.q = sc.q;

  inst.problem.decisions = DecisionSet::box(VectorXd::Zero(n), VectorXd::Constant(n, config.supply_cap * config.dbar));
  inst.problem.recourse = std::move(r);
  inst.problem.ambiguity = std::move(amb);
  return inst;
}

double nearest_rank(std::vector<double> values, double percent) {
  if (values.empty()) throw std::invalid_argument("nearest_rank of an empty sample");
  std::sort(values.begin(), values.end());
  const auto n = static_cast<double>(values.size());
  auto rank = static_cast<std::size_t>(std::ceil(percent / 100.0 * n - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  return values[rank - 1];
}

ExperimentReport run_experiment(const TRAConfig& config, const SolverConfig& solver) {
  config.check();
  const auto methods = methods_of(config);
  std::vector<TrialResult> results(config.trials);
  SolverConfig inner = solver;
  inner.workers = 1;
  const int workers = std::max(1, std::min(solver.workers, config.trials));
  std::atomic<int> next{0};
  auto work = [&] {
    for (int t = next++; t < config.trials; t = next++) results[t] = run_trial(config, t, inner);
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  ExperimentReport report;
  for (const auto& r : results)
    if (!r.error.empty()) throw BenchError(r.error);
  for (int t = 0; t < config.trials; ++t) {
    for (std::size_t k = 0; k < methods.size(); ++k) {
      report.training.push_back(results[t].training[k]);
      for (std::size_t s = 0; s < results[t].costs[k].size(); ++s)
        report.raw.push_back({t, methods[k].name, methods[k].lambda, static_cast<int>(s), results[t].costs[k][s]});
    }
  }
  const double T = config.trials;
  for (std::size_t k = 0; k < methods.size(); ++k) {
    for (int q : kReportQuantiles) {
      std::vector<double> per_trial;
      for (int t = 0; t < config.trials; ++t) per_trial.push_back(nearest_rank(results[t].costs[k], q));
      const double mean = std::accumulate(per_trial.begin(), per_trial.end(), 0.0) / T;
      double var = 0.0;
      for (double v : per_trial) var += (v - mean) * (v - mean);
      const double half = config.trials > 1 ? 1.96 * std::sqrt(var / (T - 1.0)) / std::sqrt(T) : 0.0;
      report.rows.push_back({methods[k].name, methods[k].lambda, q, mean, mean - half, mean + half});
    }
  }
  return report;
}

std::vector<std::string> check_ordering(const ExperimentReport& report, double tol) {
  std::vector<std::string> out;
  std::map<int, std::vector<const TrainingRow*>> by_trial;
  for (const auto& r : report.training) by_trial[r.trial].push_back(&r);
  auto le = [&](double a, double b) { return a <= b + tol * std::max(1.0, std::abs(b)); };
  for (const auto& [trial, rows] : by_trial) {
    const TrainingRow* dfo = nullptr;
    const TrainingRow* dro = nullptr;
    std::vector<const TrainingRow*> hurwicz;
    for (const auto* r : rows) {
      if (r->method == "DFO") dfo = r;
      else if (r->method == "DRO") dro = r;
      else hurwicz.push_back(r);
    }
    const std::string tag = "trial " + std::to_string(trial) + ": ";
    if (!dfo || !dro) {
      out.push_back(tag + "missing DFO or DRO row");
      continue;
    }
    if (!le(dfo->objective, dro->objective)) out.push_back(tag + "DFO > DRO");
    std::sort(hurwicz.begin(), hurwicz.end(), [](auto* a, auto* b) { return a->lambda < b->lambda; });
    for (std::size_t i = 0; i < hurwicz.size(); ++i) {
      const auto* h = hurwicz[i];
      const std::string ht = tag + "Hurwicz(" + num(h->lambda) + ")";
      if (!le(dfo->objective, h->objective)) out.push_back(ht + " < DFO");
      if (!le(h->objective, dro->objective)) out.push_back(ht + " > DRO");
      if (i > 0 && !le(h->objective, hurwicz[i - 1]->objective)) out.push_back(ht + " increases in lambda");
      if (h->lambda == 1.0 && !approx_equal(h->objective, dfo->objective, tol, tol)) out.push_back(ht + " != DFO");
      if (h->lambda == 0.0 && !approx_equal(h->objective, dro->objective, tol, tol)) out.push_back(ht + " != DRO");
    }
  }
  return out;
}

std::string report_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "method,lambda,quantile,mean,ci_lo,ci_hi\n";
  for (const auto& r : report.rows)
    out << r.method << "," << num(r.lambda) << "," << r.quantile << "," << num(r.mean) << "," << num(r.ci_lo) << ","
        << num(r.ci_hi) << "\n";
  return out.str();
}

std::string raw_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "trial,method,lambda,scenario,cost\n";
  for (const auto& r : report.raw)
    out << r.trial << "," << r.method << "," << num(r.lambda) << "," << r.scenario << "," << num(r.cost) << "\n";
  return out.str();
}

std::string training_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "trial,method,lambda,objective,x\n";
  for (const auto& r : report.training) {
    out << r.trial << "," << r.method << "," << num(r.lambda) << "," << num(r.objective) << ",";
    for (Eigen::Index i = 0; i < r.x.size(); ++i) out << (i ? " " : "") << num(r.x(i));
    out << "\n";
  }
  return out.str();
}

std::string quantiles_dat(const ExperimentReport& report) {
  std::vector<std::pair<std::string, double>> columns;
  for (const auto& r : report.rows) {
    std::pair<std::string, double> key{r.method, r.lambda};
    if (std::find(columns.begin(), columns.end(), key) == columns.end()) columns.push_back(key);
  }
  std::ostringstream out;
  out << "# quantile";
  for (const auto& [m, l] : columns) out << " " << (m == "Hurwicz" ? m + "_" + num(l) : m);
  out << "\n";
  for (int q : kReportQuantiles) {
    out << q;
    for (const auto& [m, l] : columns) {
      for (const auto& r : report.rows)
        if (r.method == m && r.lambda == l && r.quantile == q) out << " " << num(r.mean);
    }
    out << "\n";
  }
  return out.str();
}

void write_report(const ExperimentReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_text(dir / "report.csv", report_csv(report));
  write_text(dir / "raw.csv", raw_csv(report));
  write_text(dir / "training.csv", training_csv(report));
  write_text(dir / "quantiles.dat", quantiles_dat(report));
}

}  // namespace dfo
