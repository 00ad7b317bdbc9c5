// Dense revised simplex with bounded variables, two phases, explicit basis
// inverse with product-form updates and periodic reinversion.

#include "dfo/milp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dfo {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr int kReinvertEvery = 50;
constexpr long kBlandAfter = 1000;

class Simplex {
 public:
  Simplex(const LinearProgram& lp, const SolverConfig& config) : lp_(lp), cfg_(config) {
    n_ = lp.num_vars();
    m_ = lp.num_rows();
    total_ = n_ + 2 * m_;
    row_scale_ = VectorXd::Ones(m_);
    A_ = lp.rows;
    b_ = lp.rhs;
    for (int i = 0; i < m_; ++i) {
      double mx = m_ > 0 && n_ > 0 ? A_.row(i).cwiseAbs().maxCoeff() : 0.0;
      if (mx > 0) {
        row_scale_(i) = 1.0 / mx;
        A_.row(i) *= row_scale_(i);
        b_(i) *= row_scale_(i);
      }
    }
    lo_ = VectorXd::Zero(total_);
    hi_ = VectorXd::Zero(total_);
    lo_.head(n_) = lp.lower;
    hi_.head(n_) = lp.upper;
    for (int i = 0; i < m_; ++i) {
      switch (lp.senses[i]) {
        case RowSense::LessEqual: lo_(n_ + i) = 0; hi_(n_ + i) = kInf; break;
        case RowSense::GreaterEqual: lo_(n_ + i) = -kInf; hi_(n_ + i) = 0; break;
        case RowSense::Equal: lo_(n_ + i) = 0; hi_(n_ + i) = 0; break;
      }
      lo_(n_ + m_ + i) = 0;
      hi_(n_ + m_ + i) = 0;
    }
    sigma_ = VectorXd::Ones(m_);
    x_ = VectorXd::Zero(total_);
    pos_.assign(total_, -1);
    basis_.assign(m_, -1);
  }

  Solution run() {
    Solution sol;
    for (int j = 0; j < n_; ++j) {
      if (lo_(j) > hi_(j) + cfg_.feas_tol) {
        sol.status = SolveStatus::Infeasible;
        return sol;
      }
    }
    init_basis();

    // Phase 1 minimizes the sum of artificials.
    cost_ = VectorXd::Zero(total_);
    bool need_phase1 = false;
    for (int i = 0; i < m_; ++i) {
      int a = n_ + m_ + i;
      if (pos_[a] >= 0) {
        cost_(a) = 1.0;
        need_phase1 = true;
      }
    }
    if (need_phase1) {
      if (iterate() != SolveStatus::Optimal) throw NumericalError("simplex: phase 1 unbounded");
      reinvert();
      double infeas = 0.0;
      for (int i = 0; i < m_; ++i) infeas += std::abs(x_(n_ + m_ + i));
      if (infeas > 1e-7) {
        sol.status = SolveStatus::Infeasible;
        sol.iterations = iterations_;
        return sol;
      }
      drive_out_artificials();
    }
    for (int i = 0; i < m_; ++i) {
      lo_(n_ + m_ + i) = 0;
      hi_(n_ + m_ + i) = 0;
      if (pos_[n_ + m_ + i] < 0) x_(n_ + m_ + i) = 0;
    }

    cost_ = VectorXd::Zero(total_);
    cost_.head(n_) = lp_.objective;
    degenerate_ = 0;
    bland_ = false;
    SolveStatus st = iterate();
    sol.iterations = iterations_;
    if (st == SolveStatus::Unbounded) {
      sol.status = SolveStatus::Unbounded;
      sol.objective = -kInf;
      return sol;
    }
    reinvert();
    sol.status = SolveStatus::Optimal;
    sol.x = x_.head(n_);
    for (int j = 0; j < n_; ++j) {
      if (pos_[j] >= 0) sol.x(j) = std::clamp(sol.x(j), lo_(j), hi_(j));
    }
    sol.objective = lp_.objective.dot(sol.x) + lp_.objective_offset;
    VectorXd y = dual_prices();
    sol.duals = y.cwiseProduct(row_scale_);
    sol.bound = sol.objective;
    double res = primal_residual(lp_, sol.x, false);
    double scale = 1.0 + (lp_.rhs.size() ? lp_.rhs.cwiseAbs().maxCoeff() : 0.0);
    if (res > 1e-6 * scale) {
      throw NumericalError("simplex: final primal residual " + std::to_string(res));
    }
    return sol;
  }

 private:
  Eigen::VectorXd column(int j) const {
    if (j < n_) return A_.col(j);
    VectorXd e = VectorXd::Zero(m_);
    if (j < n_ + m_) {
      e(j - n_) = 1.0;
    } else {
      e(j - n_ - m_) = sigma_(j - n_ - m_);
    }
    return e;
  }

  double col_dot(int j, const VectorXd& y) const {
    if (j < n_) return A_.col(j).dot(y);
    if (j < n_ + m_) return y(j - n_);
    return sigma_(j - n_ - m_) * y(j - n_ - m_);
  }

  void init_basis() {
    for (int j = 0; j < n_; ++j) {
      if (std::isfinite(lo_(j))) x_(j) = lo_(j);
      else if (std::isfinite(hi_(j))) x_(j) = hi_(j);
      else x_(j) = 0.0;
    }
    VectorXd r = b_ - A_ * x_.head(n_);
    Binv_ = MatrixXd::Identity(m_, m_);
    for (int i = 0; i < m_; ++i) {
      int s = n_ + i;
      int a = n_ + m_ + i;
      double sl = lo_(s), sh = hi_(s);
      if (r(i) >= sl - cfg_.feas_tol && r(i) <= sh + cfg_.feas_tol) {
        basis_[i] = s;
        pos_[s] = i;
        x_(s) = r(i);
        x_(a) = 0;
      } else {
        double c = std::clamp(r(i), sl, sh);
        x_(s) = c;
        double diff = r(i) - c;
        sigma_(i) = diff >= 0 ? 1.0 : -1.0;
        lo_(a) = 0;
        hi_(a) = kInf;
        x_(a) = std::abs(diff);
        basis_[i] = a;
        pos_[a] = i;
        Binv_(i, i) = sigma_(i);
      }
    }
    since_reinvert_ = 0;
  }

  void reinvert() {
    if (m_ == 0) return;
    MatrixXd B(m_, m_);
    for (int i = 0; i < m_; ++i) B.col(i) = column(basis_[i]);
    Eigen::FullPivLU<MatrixXd> lu(B);
    if (lu.rank() < m_) throw NumericalError("simplex: singular basis");
    Binv_ = lu.inverse();
    VectorXd r = b_;
    for (int j = 0; j < total_; ++j) {
      if (pos_[j] < 0 && x_(j) != 0.0) r -= column(j) * x_(j);
    }
    VectorXd xb = Binv_ * r;
    for (int i = 0; i < m_; ++i) x_(basis_[i]) = xb(i);
    since_reinvert_ = 0;
  }

  VectorXd dual_prices() const {
    VectorXd cb(m_);
    for (int i = 0; i < m_; ++i) cb(i) = cost_(basis_[i]);
    return Binv_.transpose() * cb;
  }

  SolveStatus iterate() {
    const long limit = 50L * (total_ + 10) + 5000;
    for (long it = 0;; ++it) {
      if (it > limit) throw NumericalError("simplex: iteration limit");
      if (since_reinvert_ >= kReinvertEvery) reinvert();
      VectorXd y = dual_prices();
      VectorXd dA;
      if (n_ > 0) dA = cost_.head(n_) - A_.transpose() * y;
      int q = -1;
      int dir = 0;
      double best = 0.0;
      for (int j = 0; j < total_; ++j) {
        if (pos_[j] >= 0) continue;
        if (lo_(j) == hi_(j)) continue;
        double d = j < n_ ? dA(j) : cost_(j) - col_dot(j, y);
        bool at_lo = x_(j) <= lo_(j);
        bool at_hi = x_(j) >= hi_(j);
        bool free = !at_lo && !at_hi;
        int cand = 0;
        if ((at_lo || free) && d < -cfg_.opt_tol) cand = 1;
        else if ((at_hi || free) && d > cfg_.opt_tol) cand = -1;
        if (cand == 0) continue;
        if (bland_) {
          q = j;
          dir = cand;
          break;
        }
        if (std::abs(d) > best) {
          best = std::abs(d);
          q = j;
          dir = cand;
        }
      }
      if (q < 0) return SolveStatus::Optimal;

      VectorXd alpha = Binv_ * column(q);
      double t_flip = hi_(q) - lo_(q);
      // Harris two-pass ratio test.
      double t1 = kInf;
      for (int i = 0; i < m_; ++i) {
        double rate = -dir * alpha(i);
        if (std::abs(rate) <= kPivotTol) continue;
        int bv = basis_[i];
        double bound = rate < 0 ? lo_(bv) : hi_(bv);
        if (!std::isfinite(bound)) continue;
        double dist = rate < 0 ? x_(bv) - bound : bound - x_(bv);
        t1 = std::min(t1, (std::max(dist, 0.0) + cfg_.feas_tol) / std::abs(rate));
      }
      int r = -1;
      double t = kInf;
      if (std::isfinite(t1)) {
        double best_rate = 0.0;
        for (int i = 0; i < m_; ++i) {
          double rate = -dir * alpha(i);
          if (std::abs(rate) <= kPivotTol) continue;
          int bv = basis_[i];
          double bound = rate < 0 ? lo_(bv) : hi_(bv);
          if (!std::isfinite(bound)) continue;
          double dist = std::max(rate < 0 ? x_(bv) - bound : bound - x_(bv), 0.0);
          if (dist / std::abs(rate) <= t1 && std::abs(rate) > best_rate) {
            best_rate = std::abs(rate);
            r = i;
            t = dist / std::abs(rate);
          }
        }
      }
      ++iterations_;
      if (r < 0 && !std::isfinite(t_flip)) return SolveStatus::Unbounded;
      if (r < 0 || t_flip <= t) {
        for (int i = 0; i < m_; ++i) x_(basis_[i]) += -dir * alpha(i) * t_flip;
        x_(q) = dir > 0 ? hi_(q) : lo_(q);
        note_step(t_flip);
        continue;
      }
      for (int i = 0; i < m_; ++i) x_(basis_[i]) += -dir * alpha(i) * t;
      x_(q) += dir * t;
      int leaving = basis_[r];
      double rate_r = -dir * alpha(r);
      x_(leaving) = rate_r < 0 ? lo_(leaving) : hi_(leaving);
      pivot(r, q, alpha);
      note_step(t);
    }
  }

  void note_step(double t) {
    if (t <= 1e-12) {
      if (++degenerate_ > kBlandAfter) bland_ = true;
    } else {
      degenerate_ = 0;
    }
  }

  void pivot(int r, int q, const VectorXd& alpha) {
    int leaving = basis_[r];
    pos_[leaving] = -1;
    basis_[r] = q;
    pos_[q] = r;
    double piv = alpha(r);
    Binv_.row(r) /= piv;
    for (int i = 0; i < m_; ++i) {
      if (i != r && alpha(i) != 0.0) Binv_.row(i) -= alpha(i) * Binv_.row(r);
    }
    ++since_reinvert_;
  }

  void drive_out_artificials() {
    for (int r = 0; r < m_; ++r) {
      int bv = basis_[r];
      if (bv < n_ + m_) continue;
      Eigen::RowVectorXd rho = Binv_.row(r);
      int best_j = -1;
      double best = 1e-7;
      for (int j = 0; j < n_ + m_; ++j) {
        if (pos_[j] >= 0) continue;
        double a = j < n_ ? rho.dot(A_.col(j)) : rho(j - n_);
        if (std::abs(a) > best) {
          best = std::abs(a);
          best_j = j;
        }
      }
      if (best_j < 0) continue;  // redundant row; artificial stays basic at zero
      VectorXd alpha = Binv_ * column(best_j);
      x_(bv) = 0;
      pos_[bv] = -1;
      basis_[r] = best_j;
      pos_[best_j] = r;
      Binv_.row(r) /= alpha(r);
      for (int i = 0; i < m_; ++i) {
        if (i != r && alpha(i) != 0.0) Binv_.row(i) -= alpha(i) * Binv_.row(r);
      }
      ++since_reinvert_;
    }
    reinvert();
  }

  const LinearProgram& lp_;
  SolverConfig cfg_;
  int n_ = 0, m_ = 0, total_ = 0;
  MatrixXd A_;
  VectorXd b_, row_scale_, lo_, hi_, sigma_, x_, cost_;
  MatrixXd Binv_;
  std::vector<int> basis_, pos_;
  int since_reinvert_ = 0;
  long degenerate_ = 0;
  long iterations_ = 0;
  bool bland_ = false;
};

}  // namespace

const char* to_string(RowSense sense) {
  switch (sense) {
    case RowSense::LessEqual: return "<=";
    case RowSense::Equal: return "=";
    case RowSense::GreaterEqual: return ">=";
  }
  return "?";
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::Unbounded: return "Unbounded";
    case SolveStatus::NodeLimit: return "NodeLimit";
    case SolveStatus::TimeLimit: return "TimeLimit";
  }
  return "?";
}

bool LinearProgram::has_integers() const {
  return std::any_of(integer.begin(), integer.end(), [](bool b) { return b; });
}

void LinearProgram::check() const {
  const int n = num_vars();
  const int m = num_rows();
  auto fail = [](const std::string& what) { throw std::invalid_argument("LinearProgram: " + what); };
  if (rows.rows() != m || (m > 0 && rows.cols() != n)) fail("row matrix shape");
  if (static_cast<int>(senses.size()) != m) fail("sense count");
  if (lower.size() != n || upper.size() != n) fail("bound length");
  if (!integer.empty() && static_cast<int>(integer.size()) != n) fail("integrality mask length");
  for (int j = 0; j < n && !integer.empty(); ++j) {
    if (integer[j] && (!std::isfinite(lower(j)) || !std::isfinite(upper(j)))) fail("integer variable without finite bounds");
  }
  if (!objective.allFinite() || !rhs.allFinite() || (m > 0 && !rows.allFinite())) fail("non-finite data");
}

double primal_residual(const LinearProgram& lp, const VectorXd& x, bool integrality) {
  double worst = 0.0;
  for (int j = 0; j < lp.num_vars(); ++j) {
    worst = std::max({worst, lp.lower(j) - x(j), x(j) - lp.upper(j)});
    if (integrality && !lp.integer.empty() && lp.integer[j]) worst = std::max(worst, std::abs(x(j) - std::round(x(j))));
  }
  if (lp.num_rows() > 0) {
    VectorXd ax = lp.rows * x;
    for (int i = 0; i < lp.num_rows(); ++i) {
      double v = ax(i) - lp.rhs(i);
      switch (lp.senses[i]) {
        case RowSense::LessEqual: worst = std::max(worst, v); break;
        case RowSense::GreaterEqual: worst = std::max(worst, -v); break;
        case RowSense::Equal: worst = std::max(worst, std::abs(v)); break;
      }
    }
  }
  return worst;
}

Solution solve_lp(const LinearProgram& lp, const SolverConfig& config) {
  lp.check();
  Simplex simplex(lp, config);
  return simplex.run();
}

}  // namespace dfo
