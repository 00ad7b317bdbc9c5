#include "dfo/program.hpp"

#include <map>

namespace dfo {

LinExpr& LinExpr::operator+=(const LinExpr& o) {
  terms.insert(terms.end(), o.terms.begin(), o.terms.end());
  constant += o.constant;
  return *this;
}

LinExpr& LinExpr::operator-=(const LinExpr& o) {
  for (auto [v, c] : o.terms) terms.emplace_back(v, -c);
  constant -= o.constant;
  return *this;
}

LinExpr& LinExpr::operator*=(double s) {
  for (auto& t : terms) t.second *= s;
  constant *= s;
  return *this;
}

LinExpr LinExpr::simplified() const {
  std::map<int, double> acc;
  for (auto [v, c] : terms) acc[v] += c;
  LinExpr out(constant);
  for (auto [v, c] : acc) {
    if (c != 0.0) out.terms.emplace_back(v, c);
  }
  return out;
}

LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
LinExpr operator-(LinExpr a) { return a *= -1.0; }
LinExpr operator*(double s, LinExpr a) { return a *= s; }
LinExpr operator*(LinExpr a, double s) { return a *= s; }

int ProgramBuilder::add_var(const std::string& name, double lower, double upper, bool integer) {
  names_.push_back(name);
  lower_.push_back(lower);
  upper_.push_back(upper);
  integer_.push_back(integer);
  return num_vars() - 1;
}

std::vector<int> ProgramBuilder::add_vars(const std::string& prefix, int count, double lower, double upper,
                                          bool integer) {
  std::vector<int> ids;
  for (int i = 0; i < count; ++i) ids.push_back(add_var(prefix + std::to_string(i), lower, upper, integer));
  return ids;
}

void ProgramBuilder::set_bounds(int var, double lower, double upper) {
  lower_[var] = lower;
  upper_[var] = upper;
}

void ProgramBuilder::add_row(const LinExpr& lhs, RowSense sense, double rhs, const std::string& name) {
  LinExpr e = lhs.simplified();
  double r = rhs - e.constant;
  e.constant = 0.0;
  rows_.push_back({std::move(e), sense, r, name, citation_});
}

void ProgramBuilder::add_le(const LinExpr& lhs, const LinExpr& rhs, const std::string& name) {
  add_row(lhs - rhs, RowSense::LessEqual, 0.0, name);
}

void ProgramBuilder::add_ge(const LinExpr& lhs, const LinExpr& rhs, const std::string& name) {
  add_row(lhs - rhs, RowSense::GreaterEqual, 0.0, name);
}

void ProgramBuilder::add_eq(const LinExpr& lhs, const LinExpr& rhs, const std::string& name) {
  add_row(lhs - rhs, RowSense::Equal, 0.0, name);
}

LinearProgram ProgramBuilder::build() const {
  LinearProgram lp;
  const int n = num_vars();
  const int m = num_rows();
  lp.objective = VectorXd::Zero(n);
  LinExpr obj = objective_.simplified();
  for (auto [v, c] : obj.terms) lp.objective(v) = c;
  lp.objective_offset = obj.constant;
  lp.rows = MatrixXd::Zero(m, n);
  lp.rhs = VectorXd::Zero(m);
  for (int i = 0; i < m; ++i) {
    for (auto [v, c] : rows_[i].lhs.terms) lp.rows(i, v) += c;
    lp.rhs(i) = rows_[i].rhs;
    lp.senses.push_back(rows_[i].sense);
    lp.row_names.push_back(rows_[i].name);
  }
  lp.lower = Eigen::Map<const VectorXd>(lower_.data(), n);
  lp.upper = Eigen::Map<const VectorXd>(upper_.data(), n);
  lp.integer = integer_;
  lp.var_names = names_;
  return lp;
}

std::vector<Provenance> ProgramBuilder::provenance() const {
  std::vector<Provenance> out;
  for (int i = 0; i < num_rows(); ++i) {
    if (!out.empty() && out.back().citation == rows_[i].citation) {
      out.back().row_end = i + 1;
    } else {
      out.push_back({i, i + 1, rows_[i].citation});
    }
  }
  return out;
}

}  // namespace dfo
