#include "dfo/io.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace dfo {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

std::string child(const std::string& path, const std::string& key) { return path + "/" + key; }
std::string child(const std::string& path, std::size_t index) { return path + "/" + std::to_string(index); }

void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ParseError(path, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ParseError(child(path, key), "unknown key");
  }
}

const json& field(const json& obj, const std::string& path, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(child(path, key), "missing required field");
  return *it;
}

const json* optional_field(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return nullptr;
  return &*it;
}

double number(const json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  throw ParseError(path, "expected a number");
}

int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ParseError(path, "expected an integer");
  return j.get<int>();
}

std::string text(const json& j, const std::string& path) {
  if (!j.is_string()) throw ParseError(path, "expected a string");
  return j.get<std::string>();
}

VectorXd vector(const json& j, const std::string& path) {
  if (!j.is_array()) throw ParseError(path, "expected an array of numbers");
  VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number(j[i], child(path, i));
  return v;
}

Eigen::VectorXi int_vector(const json& j, const std::string& path) {
  if (!j.is_array()) throw ParseError(path, "expected an array of integers");
  Eigen::VectorXi v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = integer(j[i], child(path, i));
  return v;
}

// Row-major array of arrays; an empty array yields a 0 x cols matrix.
MatrixXd matrix(const json& j, const std::string& path, int cols) {
  if (!j.is_array()) throw ParseError(path, "expected an array of rows");
  if (j.empty()) return MatrixXd::Zero(0, cols);
  const auto width = j[0].is_array() ? j[0].size() : 0;
  MatrixXd m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto row_path = child(path, i);
    if (!j[i].is_array()) throw ParseError(row_path, "expected an array of numbers");
    if (j[i].size() != width) throw ParseError(row_path, "ragged matrix row");
    for (std::size_t c = 0; c < width; ++c) m(i, c) = number(j[i][c], child(row_path, c));
  }
  return m;
}

std::vector<VectorXd> points(const json& j, const std::string& path) {
  if (!j.is_array()) throw ParseError(path, "expected an array of vectors");
  std::vector<VectorXd> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(vector(j[i], child(path, i)));
  return out;
}

Norm norm(const json& j, const std::string& path) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "one" || s == "1") return Norm::one();
    if (s == "inf") return Norm::inf();
    throw ParseError(path, "unknown norm '" + s + "'");
  }
  if (j.is_number()) {
    double p = j.get<double>();
    if (!(p >= 1.0)) throw ParseError(path, "norm exponent must be >= 1");
    return Norm::real(p);
  }
  throw ParseError(path, "expected \"one\", \"inf\" or a number");
}

RowSense sense(const json& j, const std::string& path) {
  const auto s = text(j, path);
  if (s == "<=" || s == "L") return RowSense::LessEqual;
  if (s == ">=" || s == "G") return RowSense::GreaterEqual;
  if (s == "=" || s == "==" || s == "E") return RowSense::Equal;
  throw ParseError(path, "unknown row sense '" + s + "'");
}

DecisionSet parse_decisions(const json& j, const std::string& path) {
  check_keys(j, path, {"lower", "upper", "ineq_matrix", "ineq_rhs"});
  DecisionSet X;
  X.lower = vector(field(j, path, "lower"), child(path, "lower"));
  X.upper = vector(field(j, path, "upper"), child(path, "upper"));
  const int n = X.dim();
  const json* A = optional_field(j, "ineq_matrix");
  const json* b = optional_field(j, "ineq_rhs");
  if ((A == nullptr) != (b == nullptr)) throw ParseError(path, "ineq_matrix and ineq_rhs must appear together");
  X.ineq_matrix = A ? matrix(*A, child(path, "ineq_matrix"), n) : MatrixXd::Zero(0, n);
  X.ineq_rhs = b ? vector(*b, child(path, "ineq_rhs")) : VectorXd::Zero(0);
  return X;
}

AffinePiece parse_piece(const json& j, const std::string& path, int n) {
  check_keys(j, path, {"a_matrix", "a_offset", "b_row", "b_offset"});
  AffinePiece piece;
  VectorXd a0 = vector(field(j, path, "a_offset"), child(path, "a_offset"));
  const json* A = optional_field(j, "a_matrix");
  MatrixXd Am = A ? matrix(*A, child(path, "a_matrix"), n) : MatrixXd::Zero(a0.size(), n);
  if (A && A->empty()) Am = MatrixXd::Zero(a0.size(), n);
  piece.a = AffineMap(Am, a0);
  double b0 = number(field(j, path, "b_offset"), child(path, "b_offset"));
  const json* B = optional_field(j, "b_row");
  VectorXd brow = B ? vector(*B, child(path, "b_row")) : VectorXd::Zero(n);
  piece.b = AffineMap(brow.transpose(), VectorXd::Constant(1, b0));
  return piece;
}

Recourse parse_recourse(const json& j, const std::string& path, int n) {
  if (!j.is_object()) throw ParseError(path, "expected an object");
  const auto kind = text(field(j, path, "kind"), child(path, "kind"));
  if (kind == "piecewise_affine") {
    check_keys(j, path, {"kind", "mode", "pieces", "block_structure"});
    PiecewiseAffineRecourse r;
    const auto mode = text(field(j, path, "mode"), child(path, "mode"));
    if (mode == "concave_min") {
      r.mode = RecourseMode::ConcaveMin;
    } else if (mode == "convex_max") {
      r.mode = RecourseMode::ConvexMax;
    } else {
      throw ParseError(child(path, "mode"), "unknown mode '" + mode + "'");
    }
    const auto& pieces = field(j, path, "pieces");
    if (!pieces.is_array()) throw ParseError(child(path, "pieces"), "expected an array");
    for (std::size_t k = 0; k < pieces.size(); ++k)
      r.pieces.push_back(parse_piece(pieces[k], child(child(path, "pieces"), k), n));
    if (const json* blocks = optional_field(j, "block_structure")) {
      const auto bpath = child(path, "block_structure");
      if (!blocks->is_array()) throw ParseError(bpath, "expected an array of index arrays");
      std::vector<std::vector<int>> bs;
      for (std::size_t i = 0; i < blocks->size(); ++i) {
        auto v = int_vector((*blocks)[i], child(bpath, i));
        bs.emplace_back(v.data(), v.data() + v.size());
      }
      r.block_structure = std::move(bs);
    }
    return r;
  }
  if (kind == "lp") {
    check_keys(j, path, {"kind", "cost", "recourse_matrix", "tech_x", "tech_xi", "rhs", "senses", "lower"});
    LPRecourse r;
    r.cost = vector(field(j, path, "cost"), child(path, "cost"));
    r.rhs = vector(field(j, path, "rhs"), child(path, "rhs"));
    r.recourse_matrix = matrix(field(j, path, "recourse_matrix"), child(path, "recourse_matrix"),
                               static_cast<int>(r.cost.size()));
    r.tech_x = matrix(field(j, path, "tech_x"), child(path, "tech_x"), n);
    r.tech_xi = matrix(field(j, path, "tech_xi"), child(path, "tech_xi"), 0);
    const auto& senses = field(j, path, "senses");
    if (!senses.is_array()) throw ParseError(child(path, "senses"), "expected an array");
    for (std::size_t i = 0; i < senses.size(); ++i)
      r.senses.push_back(sense(senses[i], child(child(path, "senses"), i)));
    const json* lower = optional_field(j, "lower");
    r.lower = lower ? vector(*lower, child(path, "lower")) : VectorXd::Zero(r.cost.size());
    return r;
  }
  throw ParseError(child(path, "kind"), "unknown recourse kind '" + kind + "'");
}

AmbiguitySet parse_ambiguity(const json& j, const std::string& path) {
  if (!j.is_object()) throw ParseError(path, "expected an object");
  const auto kind = text(field(j, path, "kind"), child(path, "kind"));
  auto num = [&](const char* key) { return number(field(j, path, key), child(path, key)); };
  auto vec = [&](const char* key) { return vector(field(j, path, key), child(path, key)); };
  auto pts = [&](const char* key) { return points(field(j, path, key), child(path, key)); };
  if (kind == "support_ball") {
    check_keys(j, path, {"kind", "center", "radius", "norm"});
    return SupportBall{vec("center"), num("radius"), norm(field(j, path, "norm"), child(path, "norm"))};
  }
  if (kind == "wasserstein_inf") {
    check_keys(j, path, {"kind", "samples", "radius", "norm"});
    return WassersteinInf{pts("samples"), num("radius"), norm(field(j, path, "norm"), child(path, "norm"))};
  }
  if (kind == "finite_polyhedral") {
    check_keys(j, path, {"kind", "scenarios", "D", "d", "big_m"});
    FinitePolyhedral s;
    s.scenarios = pts("scenarios");
    s.D = matrix(field(j, path, "D"), child(path, "D"), static_cast<int>(s.scenarios.size()));
    s.d = vec("d");
    if (const json* m = optional_field(j, "big_m")) s.big_m = number(*m, child(path, "big_m"));
    return s;
  }
  if (kind == "interval_polyhedral") {
    check_keys(j, path, {"kind", "scenarios", "p0", "lbar", "ubar", "q"});
    IntervalPolyhedral s;
    s.scenarios = pts("scenarios");
    s.p0 = vec("p0");
    s.lbar = int_vector(field(j, path, "lbar"), child(path, "lbar"));
    s.ubar = int_vector(field(j, path, "ubar"), child(path, "ubar"));
    s.q = integer(field(j, path, "q"), child(path, "q"));
    return s;
  }
  if (kind == "l2_ball") {
    check_keys(j, path, {"kind", "scenarios", "p0", "radius"});
    return L2Ball{pts("scenarios"), vec("p0"), num("radius")};
  }
  throw ParseError(child(path, "kind"), "unknown ambiguity kind '" + kind + "'");
}

ojson number_json(double v) {
  if (std::isinf(v)) return v > 0 ? ojson("inf") : ojson("-inf");
  return ojson(v);
}

ojson vector_json(const VectorXd& v) {
  ojson a = ojson::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number_json(v(i)));
  return a;
}

ojson matrix_json(const MatrixXd& m) {
  ojson a = ojson::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(vector_json(m.row(i).transpose()));
  return a;
}

ojson points_json(const std::vector<VectorXd>& pts) {
  ojson a = ojson::array();
  for (const auto& p : pts) a.push_back(vector_json(p));
  return a;
}

ojson int_vector_json(const Eigen::VectorXi& v) {
  ojson a = ojson::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

ojson norm_json(const Norm& p) {
  switch (p.kind) {
    case Norm::Kind::One:
      return "one";
    case Norm::Kind::Inf:
      return "inf";
    case Norm::Kind::Real:
      break;
  }
  return p.p;
}

const char* sense_text(RowSense s) {
  switch (s) {
    case RowSense::LessEqual:
      return "<=";
    case RowSense::GreaterEqual:
      return ">=";
    case RowSense::Equal:
      break;
  }
  return "=";
}

ojson recourse_json(const Recourse& recourse) {
  ojson j;
  if (const auto* pw = std::get_if<PiecewiseAffineRecourse>(&recourse)) {
    j["kind"] = "piecewise_affine";
    j["mode"] = pw->mode == RecourseMode::ConcaveMin ? "concave_min" : "convex_max";
    ojson pieces = ojson::array();
    for (const auto& piece : pw->pieces) {
      ojson pj;
      pj["a_matrix"] = matrix_json(piece.a.matrix);
      pj["a_offset"] = vector_json(piece.a.offset);
      pj["b_row"] = vector_json(piece.b.matrix.row(0).transpose());
      pj["b_offset"] = number_json(piece.b.offset(0));
      pieces.push_back(pj);
    }
    j["pieces"] = pieces;
    if (pw->block_structure) j["block_structure"] = *pw->block_structure;
    return j;
  }
  const auto& lp = std::get<LPRecourse>(recourse);
  j["kind"] = "lp";
  j["cost"] = vector_json(lp.cost);
  j["recourse_matrix"] = matrix_json(lp.recourse_matrix);
  j["tech_x"] = matrix_json(lp.tech_x);
  j["tech_xi"] = matrix_json(lp.tech_xi);
  j["rhs"] = vector_json(lp.rhs);
  ojson senses = ojson::array();
  for (auto s : lp.senses) senses.push_back(sense_text(s));
  j["senses"] = senses;
  j["lower"] = vector_json(lp.lower);
  return j;
}

ojson ambiguity_json(const AmbiguitySet& set) {
  ojson j;
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, SupportBall>) {
          j["kind"] = "support_ball";
          j["center"] = vector_json(s.center);
          j["radius"] = number_json(s.radius);
          j["norm"] = norm_json(s.norm);
        } else if constexpr (std::is_same_v<T, WassersteinInf>) {
          j["kind"] = "wasserstein_inf";
          j["samples"] = points_json(s.samples);
          j["radius"] = number_json(s.radius);
          j["norm"] = norm_json(s.norm);
        } else if constexpr (std::is_same_v<T, FinitePolyhedral>) {
          j["kind"] = "finite_polyhedral";
          j["scenarios"] = points_json(s.scenarios);
          j["D"] = matrix_json(s.D);
          j["d"] = vector_json(s.d);
          if (s.big_m) j["big_m"] = number_json(*s.big_m);
        } else if constexpr (std::is_same_v<T, IntervalPolyhedral>) {
          j["kind"] = "interval_polyhedral";
          j["scenarios"] = points_json(s.scenarios);
          j["p0"] = vector_json(s.p0);
          j["lbar"] = int_vector_json(s.lbar);
          j["ubar"] = int_vector_json(s.ubar);
          j["q"] = s.q;
        } else {
          j["kind"] = "l2_ball";
          j["scenarios"] = points_json(s.scenarios);
          j["p0"] = vector_json(s.p0);
          j["radius"] = number_json(s.radius);
        }
      },
      set);
  return j;
}

bool scalar_array(const ojson& j) {
  for (const auto& e : j)
    if (e.is_structured()) return false;
  return true;
}

// Objects one key per line; numeric vectors and matrix rows on one line.
void pretty(std::ostream& out, const ojson& j, int indent) {
  const std::string pad(indent + 2, ' ');
  if (j.is_object()) {
    if (j.empty()) {
      out << "{}";
      return;
    }
    out << "{\n";
    bool first = true;
    for (const auto& [key, value] : j.items()) {
      if (!first) out << ",\n";
      first = false;
      out << pad << ojson(key).dump() << ": ";
      pretty(out, value, indent + 2);
    }
    out << "\n" << std::string(indent, ' ') << "}";
    return;
  }
  if (j.is_array() && !j.empty() && !scalar_array(j)) {
    out << "[\n";
    for (std::size_t i = 0; i < j.size(); ++i) {
      out << pad;
      pretty(out, j[i], indent + 2);
      out << (i + 1 < j.size() ? ",\n" : "\n");
    }
    out << std::string(indent, ' ') << "]";
    return;
  }
  if (j.is_array()) {
    out << "[";
    for (std::size_t i = 0; i < j.size(); ++i) out << (i ? ", " : "") << j[i].dump();
    out << "]";
    return;
  }
  out << j.dump();
}

std::string pretty(const ojson& j) {
  std::ostringstream out;
  pretty(out, j, 0);
  out << "\n";
  return out.str();
}

bool plain_name(const std::string& s) {
  if (s.empty() || s.size() > 8 || s.front() == '$') return false;
  for (unsigned char c : s)
    if (c <= ' ' || c > '~') return false;
  return true;
}

// Keeps valid first occurrences; replaces the rest by prefix + 1-based index.
NameMap mangle(const std::vector<std::string>& names, int count, char prefix, const std::set<std::string>& reserved,
               int& renamed) {
  std::vector<std::string> out(count);
  std::set<std::string> used(reserved);
  std::vector<bool> keep(count, false);
  for (int i = 0; i < count; ++i) {
    const std::string s = i < static_cast<int>(names.size()) ? names[i] : std::string();
    if (plain_name(s) && !used.count(s)) {
      keep[i] = true;
      used.insert(s);
      out[i] = s;
    }
  }
  NameMap map;
  for (int i = 0; i < count; ++i) {
    const std::string original = i < static_cast<int>(names.size()) ? names[i] : std::string();
    if (!keep[i]) {
      long idx = i + 1;
      char buf[32];
      do {
        std::snprintf(buf, sizeof buf, "%c%07ld", prefix, idx);
        idx += count;
      } while (used.count(buf));
      out[i] = buf;
      used.insert(out[i]);
      if (!original.empty()) ++renamed;
    }
    map.emplace_back(original.empty() ? out[i] : original, out[i]);
  }
  return map;
}

std::string file_label(const std::string& label) {
  std::string out;
  for (char c : label) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      out += c;
    } else if (c == '+') {
      out += 'p';
    } else if (c == '-') {
      out += 'm';
    } else if (c == ',' || c == ' ') {
      out += '_';
    }
  }
  return out;
}

ojson big_m_json(const BigMLedger& ledger) {
  ojson a = ojson::array();
  for (const auto& e : ledger.entries) {
    ojson j;
    j["name"] = e.name;
    j["value"] = number_json(e.value);
    j["formula"] = e.formula;
    j["citation"] = e.citation;
    a.push_back(j);
  }
  return a;
}

ojson compiled_ojson(const CompiledProgram& compiled) {
  ojson j;
  j["kind"] = compiled.kind == CompiledProgram::Kind::Batch ? "batch" : "single";
  j["citation"] = compiled.citation;
  j["num_decisions"] = compiled.num_decisions;
  ojson notes = ojson::object();
  for (const auto& [k, v] : compiled.notes) notes[k] = number_json(v);
  j["notes"] = notes;
  j["big_m"] = big_m_json(compiled.big_m);
  ojson programs = ojson::array();
  for (std::size_t k = 0; k < compiled.programs.size(); ++k) {
    const auto& lp = compiled.programs[k];
    ojson pj;
    pj["label"] = k < compiled.labels.size() ? compiled.labels[k] : std::string();
    pj["vars"] = lp.num_vars();
    pj["rows"] = lp.num_rows();
    int ints = 0;
    for (bool b : lp.integer) ints += b ? 1 : 0;
    pj["integers"] = ints;
    ojson prov = ojson::array();
    if (k < compiled.provenance.size()) {
      for (const auto& p : compiled.provenance[k]) {
        ojson r;
        r["rows"] = {p.row_begin, p.row_end};
        r["citation"] = p.citation;
        prov.push_back(r);
      }
    }
    pj["provenance"] = prov;
    programs.push_back(pj);
  }
  j["programs"] = programs;
  return j;
}

}  // namespace

DFOProblem parse_problem(const std::string& document) {
  json root;
  try {
    root = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ParseError("", std::string("malformed JSON: ") + e.what());
  }
  const std::string path;
  check_keys(root, path, {"decisions", "recourse", "ambiguity", "hurwicz_lambda"});
  DFOProblem p;
  p.decisions = parse_decisions(field(root, path, "decisions"), "/decisions");
  p.recourse = parse_recourse(field(root, path, "recourse"), "/recourse", p.decisions.dim());
  p.ambiguity = parse_ambiguity(field(root, path, "ambiguity"), "/ambiguity");
  if (const json* lambda = optional_field(root, "hurwicz_lambda"))
    p.hurwicz_lambda = number(*lambda, "/hurwicz_lambda");
  const auto report = validate(p);
  if (!report.ok()) {
    std::string message = "invalid problem:";
    for (const auto& v : report.violations) message += " " + v + ";";
    message.pop_back();
    throw ParseError("", message);
  }
  return p;
}

DFOProblem load_problem(const std::filesystem::path& file) {
  try {
    return parse_problem(read_text(file));
  } catch (const ParseError& e) {
    throw ParseError(file.string() + ":" + e.path(), e.message());
  }
}

std::string serialize_problem(const DFOProblem& problem) {
  ojson root;
  ojson d;
  d["lower"] = vector_json(problem.decisions.lower);
  d["upper"] = vector_json(problem.decisions.upper);
  if (problem.decisions.ineq_rhs.size() > 0) {
    d["ineq_matrix"] = matrix_json(problem.decisions.ineq_matrix);
    d["ineq_rhs"] = vector_json(problem.decisions.ineq_rhs);
  }
  root["decisions"] = d;
  root["recourse"] = recourse_json(problem.recourse);
  root["ambiguity"] = ambiguity_json(problem.ambiguity);
  if (problem.hurwicz_lambda) root["hurwicz_lambda"] = number_json(*problem.hurwicz_lambda);
  return pretty(root);
}

std::string MpsDocument::name_map() const {
  std::ostringstream out;
  for (const auto& [original, mps] : columns) out << "col " << mps << " " << original << "\n";
  for (const auto& [original, mps] : rows) out << "row " << mps << " " << original << "\n";
  return out.str();
}

MpsDocument write_mps(const LinearProgram& program, const std::string& name) {
  MpsDocument doc;
  LinearProgram lp = program;
  doc.columns = mangle(program.var_names, program.num_vars(), 'C', {}, doc.renamed);
  doc.rows = mangle(program.row_names, program.num_rows(), 'R', {"COST"}, doc.renamed);
  lp.var_names.clear();
  lp.row_names.clear();
  for (const auto& [original, mps] : doc.columns) lp.var_names.push_back(mps);
  for (const auto& [original, mps] : doc.rows) lp.row_names.push_back(mps);
  std::ostringstream out;
  write_mps_raw(out, lp, name);
  doc.text = out.str();
  return doc;
}

std::vector<ExportedFile> export_compiled(const CompiledProgram& compiled, const std::filesystem::path& dir,
                                          const std::string& stem) {
  std::filesystem::create_directories(dir);
  std::vector<ExportedFile> files;
  const bool batch = compiled.kind == CompiledProgram::Kind::Batch;
  for (std::size_t k = 0; k < compiled.programs.size(); ++k) {
    std::string base = stem;
    std::string mps_name = "DFO";
    if (batch) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "B%04zu", k);
      mps_name = buf;
      const std::string label = k < compiled.labels.size() ? file_label(compiled.labels[k]) : std::string();
      base = label.empty() ? mps_name : mps_name + "_" + label;
    }
    const auto doc = write_mps(compiled.programs[k], mps_name);
    ExportedFile f{dir / (base + ".mps"), dir / (base + ".names"), doc.renamed};
    write_text(f.mps, doc.text);
    write_text(f.names, doc.name_map());
    files.push_back(f);
  }
  write_text(dir / (stem + ".json"), compiled_to_json(compiled));
  return files;
}

std::string compiled_to_json(const CompiledProgram& compiled) { return pretty(compiled_ojson(compiled)); }

std::string result_to_json(const CompiledProgram& compiled, const CompiledResult& result) {
  ojson j;
  j["status"] = to_string(result.status);
  j["value"] = number_json(result.value);
  j["member"] = result.argmin;
  j["label"] = result.label;
  j["x"] = vector_json(result.x);
  j["excluded"] = result.excluded;
  j["citation"] = compiled.citation;
  j["big_m"] = big_m_json(compiled.big_m);
  return pretty(j);
}

std::vector<FixtureEntry> read_manifest(const std::filesystem::path& file) {
  json root;
  try {
    root = json::parse(read_text(file));
  } catch (const json::parse_error& e) {
    throw ParseError(file.string(), std::string("malformed JSON: ") + e.what());
  }
  check_keys(root, "", {"fixtures"});
  const auto& list = field(root, "", "fixtures");
  if (!list.is_array()) throw ParseError("/fixtures", "expected an array");
  std::vector<FixtureEntry> out;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const auto path = child("/fixtures", i);
    const auto& e = list[i];
    check_keys(e, path, {"file", "route", "methods", "expected", "verdict", "citation", "error"});
    FixtureEntry f;
    f.file = text(field(e, path, "file"), child(path, "file"));
    f.route = text(field(e, path, "route"), child(path, "route"));
    if (const json* m = optional_field(e, "methods")) {
      if (!m->is_array()) throw ParseError(child(path, "methods"), "expected an array");
      for (std::size_t k = 0; k < m->size(); ++k) f.methods.push_back(text((*m)[k], child(child(path, "methods"), k)));
    }
    if (const json* v = optional_field(e, "expected")) f.expected = number(*v, child(path, "expected"));
    if (const json* v = optional_field(e, "verdict")) f.verdict = text(*v, child(path, "verdict"));
    if (const json* v = optional_field(e, "citation")) f.citation = text(*v, child(path, "citation"));
    if (const json* v = optional_field(e, "error")) f.error = text(*v, child(path, "error"));
    out.push_back(std::move(f));
  }
  return out;
}

std::string manifest_to_json(const std::vector<FixtureEntry>& entries) {
  ojson list = ojson::array();
  for (const auto& f : entries) {
    ojson j;
    j["file"] = f.file;
    j["route"] = f.route;
    if (!f.methods.empty()) j["methods"] = f.methods;
    if (f.expected) j["expected"] = number_json(*f.expected);
    if (f.verdict) j["verdict"] = *f.verdict;
    if (f.citation) j["citation"] = *f.citation;
    if (f.error) j["error"] = *f.error;
    list.push_back(j);
  }
  ojson root;
  root["fixtures"] = list;
  return pretty(root);
}

std::string read_text(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error("cannot open " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& file, const std::string& content) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error("cannot write " + file.string());
  out << content;
  if (!out) throw Error("write failed for " + file.string());
}

}  // namespace dfo
