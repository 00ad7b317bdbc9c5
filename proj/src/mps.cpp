#include "dfo/milp.hpp"

#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace dfo {

namespace {

std::string number12(double v) {
  char buf[64];
  for (int prec = 12; prec >= 1; --prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::string(buf).size() <= 12) return buf;
  }
  return buf;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string rpad12(const std::string& s) {
  return s.size() >= 12 ? s : std::string(12 - s.size(), ' ') + s;
}

// Fixed columns: field 1 at 2, field 2 at 5, field 3 at 15, field 4 at 25.
std::string line(const std::string& f1, const std::string& f2, const std::string& f3 = {}, const std::string& f4 = {}) {
  std::string out = " " + pad(f1, 2) + " " + pad(f2, 8) + "  " + pad(f3, 8) + "  " + (f4.empty() ? f4 : rpad12(f4));
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

std::string var_name(const LinearProgram& lp, int j) {
  if (j < static_cast<int>(lp.var_names.size()) && !lp.var_names[j].empty()) return lp.var_names[j];
  char buf[16];
  std::snprintf(buf, sizeof buf, "C%07d", j + 1);
  return buf;
}

std::string row_name(const LinearProgram& lp, int i) {
  if (i < static_cast<int>(lp.row_names.size()) && !lp.row_names[i].empty()) return lp.row_names[i];
  char buf[16];
  std::snprintf(buf, sizeof buf, "R%07d", i + 1);
  return buf;
}

}  // namespace

void write_mps_raw(std::ostream& out, const LinearProgram& lp, const std::string& name) {
  lp.check();
  const int n = lp.num_vars();
  const int m = lp.num_rows();
  const std::string obj = "COST";
  out << "NAME          " << name << "\n";
  out << "ROWS\n";
  out << line("N", obj) << "\n";
  for (int i = 0; i < m; ++i) {
    const char* s = lp.senses[i] == RowSense::LessEqual ? "L" : lp.senses[i] == RowSense::GreaterEqual ? "G" : "E";
    out << line(s, row_name(lp, i)) << "\n";
  }
  out << "COLUMNS\n";
  bool in_int = false;
  int marker = 0;
  auto set_marker = [&](bool want) {
    if (want == in_int) return;
    char buf[16];
    std::snprintf(buf, sizeof buf, "MARKER%02d", marker++ % 100);
    out << "    " << pad(buf, 8) << "  " << pad("'MARKER'", 8) << "                 " << (want ? "'INTORG'" : "'INTEND'")
        << "\n";
    in_int = want;
  };
  for (int j = 0; j < n; ++j) {
    set_marker(!lp.integer.empty() && lp.integer[j]);
    const std::string vn = var_name(lp, j);
    bool wrote = false;
    if (lp.objective(j) != 0.0) {
      out << line("", vn, obj, number12(lp.objective(j))) << "\n";
      wrote = true;
    }
    for (int i = 0; i < m; ++i) {
      if (lp.rows(i, j) == 0.0) continue;
      out << line("", vn, row_name(lp, i), number12(lp.rows(i, j))) << "\n";
      wrote = true;
    }
    if (!wrote) out << line("", vn, obj, "0") << "\n";
  }
  set_marker(false);
  out << "RHS\n";
  if (lp.objective_offset != 0.0) out << line("", "RHS", obj, number12(-lp.objective_offset)) << "\n";
  for (int i = 0; i < m; ++i) {
    if (lp.rhs(i) != 0.0) out << line("", "RHS", row_name(lp, i), number12(lp.rhs(i))) << "\n";
  }
  out << "BOUNDS\n";
  for (int j = 0; j < n; ++j) {
    const std::string vn = var_name(lp, j);
    double lo = lp.lower(j), hi = lp.upper(j);
    bool is_int = !lp.integer.empty() && lp.integer[j];
    if (std::isinf(lo) && std::isinf(hi)) {
      out << line("FR", "BND", vn) << "\n";
      continue;
    }
    if (lo == hi) {
      out << line("FX", "BND", vn, number12(lo)) << "\n";
      continue;
    }
    if (std::isinf(lo)) {
      out << line("MI", "BND", vn) << "\n";
    } else if (lo != 0.0 || is_int) {
      out << line("LO", "BND", vn, number12(lo)) << "\n";
    }
    if (std::isfinite(hi)) out << line("UP", "BND", vn, number12(hi)) << "\n";
  }
  out << "ENDATA\n";
}

LinearProgram read_mps(std::istream& in) {
  enum class Section { None, Name, Rows, Columns, Rhs, Bounds, End } section = Section::None;
  std::string obj_row;
  std::vector<std::string> rows;
  std::vector<RowSense> senses;
  std::map<std::string, int> row_index;
  std::vector<std::string> cols;
  std::map<std::string, int> col_index;
  std::vector<std::map<int, double>> entries;
  std::vector<double> cost;
  std::vector<bool> integer;
  std::map<int, double> rhs;
  double offset = 0.0;
  std::vector<double> lower, upper;
  bool in_int = false;

  auto fail = [](const std::string& msg) { throw std::runtime_error("read_mps: " + msg); };
  auto column_of = [&](const std::string& name) {
    auto it = col_index.find(name);
    if (it != col_index.end()) return it->second;
    int id = static_cast<int>(cols.size());
    col_index[name] = id;
    cols.push_back(name);
    entries.emplace_back();
    cost.push_back(0.0);
    integer.push_back(in_int);
    lower.push_back(0.0);
    upper.push_back(kInf);
    return id;
  };
  auto add_value = [&](int col, const std::string& row, double v) {
    if (row == obj_row) {
      cost[col] += v;
      return;
    }
    auto it = row_index.find(row);
    if (it == row_index.end()) fail("unknown row " + row);
    entries[col][it->second] += v;
  };

  std::string text;
  while (std::getline(in, text)) {
    if (text.empty() || text[0] == '*') continue;
    std::istringstream ls(text);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (text[0] != ' ') {
      const std::string& head = tok[0];
      if (head == "NAME") section = Section::Name;
      else if (head == "ROWS") section = Section::Rows;
      else if (head == "COLUMNS") section = Section::Columns;
      else if (head == "RHS") section = Section::Rhs;
      else if (head == "BOUNDS") section = Section::Bounds;
      else if (head == "ENDATA") section = Section::End;
      else fail("unsupported section " + head);
      continue;
    }
    switch (section) {
      case Section::Rows: {
        if (tok.size() != 2) fail("bad ROWS line");
        if (tok[0] == "N") {
          if (obj_row.empty()) obj_row = tok[1];
          continue;
        }
        RowSense s = tok[0] == "L" ? RowSense::LessEqual
                     : tok[0] == "G" ? RowSense::GreaterEqual
                     : tok[0] == "E" ? RowSense::Equal
                                     : (fail("bad row type " + tok[0]), RowSense::Equal);
        row_index[tok[1]] = static_cast<int>(rows.size());
        rows.push_back(tok[1]);
        senses.push_back(s);
        break;
      }
      case Section::Columns: {
        if (tok.size() >= 3 && tok[1] == "'MARKER'") {
          if (tok[2] == "'INTORG'") in_int = true;
          else if (tok[2] == "'INTEND'") in_int = false;
          else fail("bad marker");
          continue;
        }
        if (tok.size() != 3 && tok.size() != 5) fail("bad COLUMNS line");
        int c = column_of(tok[0]);
        for (std::size_t k = 1; k + 1 < tok.size(); k += 2) add_value(c, tok[k], std::stod(tok[k + 1]));
        break;
      }
      case Section::Rhs: {
        std::size_t first = tok.size() % 2 == 1 ? 1 : 0;
        for (std::size_t k = first; k + 1 < tok.size(); k += 2) {
          double v = std::stod(tok[k + 1]);
          if (tok[k] == obj_row) {
            offset = -v;
            continue;
          }
          auto it = row_index.find(tok[k]);
          if (it == row_index.end()) fail("unknown row " + tok[k]);
          rhs[it->second] = v;
        }
        break;
      }
      case Section::Bounds: {
        if (tok.size() < 3) fail("bad BOUNDS line");
        auto it = col_index.find(tok[2]);
        if (it == col_index.end()) fail("unknown column " + tok[2]);
        int c = it->second;
        const std::string& type = tok[0];
        double v = tok.size() >= 4 ? std::stod(tok[3]) : 0.0;
        if (type == "UP") upper[c] = v;
        else if (type == "LO") lower[c] = v;
        else if (type == "FX") lower[c] = upper[c] = v;
        else if (type == "FR") { lower[c] = -kInf; upper[c] = kInf; }
        else if (type == "MI") lower[c] = -kInf;
        else if (type == "PL") upper[c] = kInf;
        else if (type == "BV") { lower[c] = 0; upper[c] = 1; integer[c] = true; }
        else fail("unsupported bound type " + type);
        break;
      }
      default:
        fail("data outside a section");
    }
  }
  if (section != Section::End) fail("missing ENDATA");

  LinearProgram lp;
  const int n = static_cast<int>(cols.size());
  const int m = static_cast<int>(rows.size());
  lp.objective = Eigen::Map<VectorXd>(cost.data(), n);
  lp.objective_offset = offset;
  lp.rows = MatrixXd::Zero(m, n);
  for (int j = 0; j < n; ++j) {
    for (auto [i, v] : entries[j]) lp.rows(i, j) = v;
  }
  lp.senses = senses;
  lp.rhs = VectorXd::Zero(m);
  for (auto [i, v] : rhs) lp.rhs(i) = v;
  lp.lower = Eigen::Map<VectorXd>(lower.data(), n);
  lp.upper = Eigen::Map<VectorXd>(upper.data(), n);
  lp.integer = integer;
  lp.var_names = cols;
  lp.row_names = rows;
  return lp;
}

}  // namespace dfo
