#include "dfo/milp.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <queue>
#include <thread>

namespace dfo {

namespace {

struct Node {
  double bound;
  long id;
  VectorXd lower;
  VectorXd upper;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.id > b.id;
  }
};

}  // namespace

Solution solve_milp(const LinearProgram& milp, const SolverConfig& config) {
  milp.check();
  if (!milp.has_integers()) return solve_lp(milp, config);

  const auto start = std::chrono::steady_clock::now();
  const int n = milp.num_vars();
  LinearProgram work = milp;
  for (int j = 0; j < n; ++j) {
    if (!milp.integer[j]) continue;
    work.lower(j) = std::ceil(milp.lower(j) - config.int_tol);
    work.upper(j) = std::floor(milp.upper(j) + config.int_tol);
  }

  Solution best;
  best.status = SolveStatus::Infeasible;
  bool have_incumbent = false;
  auto cutoff = [&](double bound) {
    return have_incumbent && bound >= best.objective - config.gap_tol * std::max(1.0, std::abs(best.objective));
  };

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  long next_id = 0;
  open.push({-kInf, next_id++, work.lower, work.upper});
  long nodes = 0;
  long iterations = 0;
  SolveStatus stop = SolveStatus::Optimal;

  while (!open.empty()) {
    if (nodes >= config.node_limit) {
      stop = SolveStatus::NodeLimit;
      break;
    }
    if (std::isfinite(config.time_limit_s)) {
      double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      if (elapsed > config.time_limit_s) {
        stop = SolveStatus::TimeLimit;
        break;
      }
    }
    Node node = open.top();
    open.pop();
    if (cutoff(node.bound)) continue;
    ++nodes;
    work.lower = node.lower;
    work.upper = node.upper;
    Solution relax = solve_lp(work, config);
    iterations += relax.iterations;
    if (relax.status == SolveStatus::Infeasible) continue;
    if (relax.status == SolveStatus::Unbounded) {
      Solution out;
      out.status = SolveStatus::Unbounded;
      out.objective = -kInf;
      out.nodes = nodes;
      return out;
    }
    if (cutoff(relax.objective)) continue;

    int branch = -1;
    double score = config.int_tol;
    for (int j = 0; j < n; ++j) {
      if (!milp.integer[j]) continue;
      double f = relax.x(j) - std::floor(relax.x(j));
      double s = std::min(f, 1.0 - f);
      if (s > score) {
        score = s;
        branch = j;
      }
    }
    if (branch < 0) {
      VectorXd x = relax.x;
      for (int j = 0; j < n; ++j) {
        if (milp.integer[j]) x(j) = std::round(x(j));
      }
      best.x = x;
      best.objective = milp.objective.dot(x) + milp.objective_offset;
      best.status = SolveStatus::Optimal;
      have_incumbent = true;
      continue;
    }
    double v = relax.x(branch);
    Node down{relax.objective, next_id++, node.lower, node.upper};
    down.upper(branch) = std::floor(v);
    Node up{relax.objective, next_id++, node.lower, node.upper};
    up.lower(branch) = std::ceil(v);
    open.push(std::move(down));
    open.push(std::move(up));
  }

  best.nodes = nodes;
  best.iterations = iterations;
  if (stop == SolveStatus::Optimal) {
    if (!have_incumbent) {
      best.status = SolveStatus::Infeasible;
      return best;
    }
    best.bound = best.objective;
    return best;
  }
  double bound = have_incumbent ? best.objective : kInf;
  while (!open.empty()) {
    bound = std::min(bound, open.top().bound);
    open.pop();
  }
  best.bound = bound;
  best.status = stop;
  if (!have_incumbent) best.objective = kInf;
  return best;
}

Solution solve(const LinearProgram& program, const SolverConfig& config) {
  return program.has_integers() ? solve_milp(program, config) : solve_lp(program, config);
}

BatchResult solve_batch(const std::vector<LinearProgram>& batch, const SolverConfig& config) {
  if (batch.empty()) throw std::invalid_argument("solve_batch: empty batch");
  BatchResult result;
  const int count = static_cast<int>(batch.size());
  result.members.resize(count);
  std::vector<std::exception_ptr> errors(count);

  auto work = [&](int k) {
    try {
      result.members[k] = solve(batch[k], config);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  };
  int workers = std::max(1, std::min(config.workers, count));
  if (workers == 1) {
    for (int k = 0; k < count; ++k) work(k);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int k = next++; k < count; k = next++) work(k);
      });
    }
    for (auto& t : pool) t.join();
  }

  for (int k = 0; k < count; ++k) {
    if (!errors[k]) continue;
    try {
      std::rethrow_exception(errors[k]);
    } catch (const std::exception& e) {
      throw Error("batch member " + std::to_string(k) + ": " + e.what());
    }
  }

  SolveStatus limit = SolveStatus::Optimal;
  for (int k = 0; k < count; ++k) {
    const Solution& s = result.members[k];
    switch (s.status) {
      case SolveStatus::Infeasible:
        result.excluded.push_back(k);
        continue;
      case SolveStatus::Unbounded:
        if (result.argmin < 0 || result.best.status != SolveStatus::Unbounded) {
          result.best = s;
          result.argmin = k;
        }
        continue;
      case SolveStatus::NodeLimit:
      case SolveStatus::TimeLimit:
        limit = s.status;
        if (!std::isfinite(s.objective)) continue;
        break;
      case SolveStatus::Optimal:
        break;
    }
    if (result.best.status == SolveStatus::Unbounded && result.argmin >= 0) continue;
    if (result.argmin < 0 || s.objective < result.best.objective - 1e-9 * std::max(1.0, std::abs(result.best.objective))) {
      result.best = s;
      result.argmin = k;
    }
  }
  if (result.argmin < 0) {
    throw AllMembersFailed(result.excluded.empty() ? 0 : result.excluded.front(),
                           "solve_batch: no member produced a solution");
  }
  if (limit != SolveStatus::Optimal && result.best.status == SolveStatus::Optimal) {
    result.best.status = limit;
    double bound = kInf;
    for (const auto& s : result.members) {
      if (s.status != SolveStatus::Infeasible) bound = std::min(bound, s.bound);
    }
    result.best.bound = bound;
  }
  return result;
}

}  // namespace dfo
