#pragma once

#include "dfo/milp.hpp"
#include "dfo/model.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace dfo {

/// Two-stage resource allocation experiment settings.
struct TRAConfig {
  int n = 2;    // facilities
  int n1 = 3;   // customers
  double rho = 10.0;
  double h = 1.0;
  double dbar = 1000.0;
  int N = 8;
  double eps = 0.16;
  double outlier_rate = 0.05;
  std::uint64_t seed = 1;
  int test_count = 100;
  int trials = 5;
  std::vector<double> lambda_grid{0.0, 0.25, 0.5, 0.75, 1.0};

  double cost_mean = 1.0;
  double cost_variance = 0.2;
  double demand_variance_factor = 0.005;   // training and test demand: factor * dbar
  double outlier_variance_factor = 0.01;
  double test_variance_factor = 0.005;
  bool variance_per_customer = false;      // scale by dbar / n1 instead of dbar
  bool variance_as_sd = false;             // read the variance numbers as standard deviations
  std::optional<double> demand_mean;       // overrides dbar / n1
  double supply_cap = 2.0;                 // x_s <= supply_cap * dbar

  /// Throws std::invalid_argument when an invariant fails.
  void check() const;
  double mu() const;
};

/// The paper-scale configuration (n = 8, n1 = 20, N = 45).
TRAConfig paper_scale_config();

/// eps = 1 - a/b in lowest terms: q = N a, lbar = -a, ubar = b - a.
struct IntervalScaling {
  int q = 1;
  int lbar = 0;
  int ubar = 0;
};

IntervalScaling interval_scaling(const TRAConfig& config);

struct TRAInstance {
  DFOProblem problem;
  MatrixXd transport_cost;           // n x n1
  std::vector<VectorXd> test;        // out-of-sample demands
};

/// Instance for one trial; trial 0 with the same config is bit-identical.
TRAInstance generate_tra(const TRAConfig& config, int trial = 0);

/// Nearest-rank percentile of a sample (percent in (0, 100]).
double nearest_rank(std::vector<double> values, double percent);

struct ReportRow {
  std::string method;
  double lambda = 0.0;
  int quantile = 0;
  double mean = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

struct RawRow {
  int trial = 0;
  std::string method;
  double lambda = 0.0;
  int scenario = 0;
  double cost = 0.0;
};

struct TrainingRow {
  int trial = 0;
  std::string method;
  double lambda = 0.0;
  double objective = 0.0;
  VectorXd x;
};

struct ExperimentReport {
  std::vector<ReportRow> rows;
  std::vector<RawRow> raw;
  std::vector<TrainingRow> training;
};

class BenchError : public Error {
 public:
  using Error::Error;
};

inline const std::vector<int> kReportQuantiles{50, 60, 70, 80, 90};

/// DFO, DRO and one Hurwicz row per grid value, for every trial.
ExperimentReport run_experiment(const TRAConfig& config, const SolverConfig& solver = {});

/// Violations of DFO <= Hurwicz <= DRO and of monotonicity in lambda over
/// the training objectives; empty when all hold.
std::vector<std::string> check_ordering(const ExperimentReport& report, double tol = 1e-6);

std::string report_csv(const ExperimentReport& report);
std::string raw_csv(const ExperimentReport& report);
std::string training_csv(const ExperimentReport& report);
std::string quantiles_dat(const ExperimentReport& report);

/// Writes report.csv, raw.csv, training.csv and quantiles.dat.
void write_report(const ExperimentReport& report, const std::filesystem::path& dir);

}  // namespace dfo
