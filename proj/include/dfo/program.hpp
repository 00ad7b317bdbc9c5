#pragma once

#include "dfo/milp.hpp"

#include <string>
#include <utility>
#include <vector>

namespace dfo {

/// Sparse affine expression over builder variable ids.
struct LinExpr {
  std::vector<std::pair<int, double>> terms;
  double constant = 0.0;

  LinExpr() = default;
  LinExpr(double c) : constant(c) {}  // NOLINT(google-explicit-constructor)
  static LinExpr term(int var, double coef = 1.0) {
    LinExpr e;
    e.terms.emplace_back(var, coef);
    return e;
  }

  LinExpr& operator+=(const LinExpr& o);
  LinExpr& operator-=(const LinExpr& o);
  LinExpr& operator*=(double s);
  /// Sum of coefficients per variable; zero coefficients dropped.
  LinExpr simplified() const;
};

LinExpr operator+(LinExpr a, const LinExpr& b);
LinExpr operator-(LinExpr a, const LinExpr& b);
LinExpr operator-(LinExpr a);
LinExpr operator*(double s, LinExpr a);
LinExpr operator*(LinExpr a, double s);

/// Rows [row_begin, row_end) were emitted under one citation.
struct Provenance {
  int row_begin = 0;
  int row_end = 0;
  std::string citation;
};

class ProgramBuilder {
 public:
  int add_var(const std::string& name, double lower, double upper, bool integer = false);
  std::vector<int> add_vars(const std::string& prefix, int count, double lower, double upper, bool integer = false);
  LinExpr operator()(int var) const { return LinExpr::term(var); }
  void set_bounds(int var, double lower, double upper);
  double lower(int var) const { return lower_[var]; }
  double upper(int var) const { return upper_[var]; }

  /// Subsequent rows are attributed to this citation.
  void cite(const std::string& citation) { citation_ = citation; }
  const std::string& citation() const { return citation_; }

  void add_row(const LinExpr& lhs, RowSense sense, double rhs, const std::string& name = {});
  void add_le(const LinExpr& lhs, const LinExpr& rhs, const std::string& name = {});
  void add_ge(const LinExpr& lhs, const LinExpr& rhs, const std::string& name = {});
  void add_eq(const LinExpr& lhs, const LinExpr& rhs, const std::string& name = {});

  void add_objective(const LinExpr& e) { objective_ += e; }
  void set_objective(const LinExpr& e) { objective_ = e; }

  int num_vars() const { return static_cast<int>(lower_.size()); }
  int num_rows() const { return static_cast<int>(rows_.size()); }

  LinearProgram build() const;
  std::vector<Provenance> provenance() const;

 private:
  struct Row {
    LinExpr lhs;
    RowSense sense;
    double rhs;
    std::string name;
    std::string citation;
  };
  std::vector<std::string> names_;
  std::vector<double> lower_, upper_;
  std::vector<bool> integer_;
  std::vector<Row> rows_;
  LinExpr objective_;
  std::string citation_;
};

}  // namespace dfo
