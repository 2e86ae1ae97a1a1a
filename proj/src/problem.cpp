#include "invfree/problem.hpp"

#include <cctype>
#include <cfloat>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "invfree/numfmt.hpp"

namespace invfree {

namespace {

using nlohmann::json;

const std::set<std::string>& reserved_names() {
  static const std::set<std::string> names = {"sin", "cos", "exp",
                                              "log", "sqrt", "abs"};
  return names;
}

bool valid_identifier(const std::string& s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

void reject_unknown_fields(const json& obj, const std::set<std::string>& allowed,
                           const std::string& where) {
  for (const auto& item : obj.items())
    if (!allowed.count(item.key()))
      throw ProblemParseError("unknown field '" + item.key() + "' in " + where);
}

const json& require_field(const json& obj, const std::string& key,
                          const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw ProblemParseError("missing field '" + key + "' in " + where);
  return *it;
}

DenseVector number_array(const json& arr, const std::string& where) {
  if (!arr.is_array())
    throw ProblemParseError("'" + where + "' must be an array of numbers");
  DenseVector out(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number())
      throw ProblemParseError("'" + where + "' must contain only numbers");
    out[i] = arr[i].get<double>();
  }
  return out;
}

}  // namespace

ProblemSpec parse_problem(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ProblemParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object())
    throw ProblemParseError("problem document must be a JSON object");
  reject_unknown_fields(
      doc, {"name", "variables", "equations", "initial_point", "domain", "options"},
      "problem document");

  ProblemSpec p;

  const json& name = require_field(doc, "name", "problem document");
  if (!name.is_string()) throw ProblemParseError("'name' must be a string");
  p.name = name.get<std::string>();

  const json& vars = require_field(doc, "variables", "problem document");
  if (!vars.is_array() || vars.empty())
    throw ProblemParseError("'variables' must be a non-empty array of names");
  for (const auto& v : vars) {
    if (!v.is_string() || !valid_identifier(v.get<std::string>()))
      throw ProblemParseError("variable names must be identifiers");
    const std::string vn = v.get<std::string>();
    if (reserved_names().count(vn))
      throw ProblemParseError("variable name '" + vn + "' is reserved");
    for (const auto& seen : p.variables)
      if (seen == vn)
        throw ProblemParseError("duplicate variable name '" + vn + "'");
    p.variables.push_back(vn);
  }
  const std::size_t n = p.variables.size();

  const json& eqs = require_field(doc, "equations", "problem document");
  if (!eqs.is_array())
    throw ProblemParseError("'equations' must be an array of expressions");
  if (eqs.size() != n)
    throw DimensionMismatch("expected " + std::to_string(n) + " equations, got " +
                            std::to_string(eqs.size()));

  p.initial_point =
      number_array(require_field(doc, "initial_point", "problem document"),
                   "initial_point");
  if (p.initial_point.size() != n)
    throw DimensionMismatch("initial_point has " +
                            std::to_string(p.initial_point.size()) +
                            " entries for " + std::to_string(n) + " variables");

  const json& domain = require_field(doc, "domain", "problem document");
  if (!domain.is_object()) throw ProblemParseError("'domain' must be an object");
  reject_unknown_fields(domain, {"lower", "upper"}, "domain");
  p.lower = number_array(require_field(domain, "lower", "domain"), "domain.lower");
  p.upper = number_array(require_field(domain, "upper", "domain"), "domain.upper");
  if (p.lower.size() != n || p.upper.size() != n)
    throw DimensionMismatch("domain bounds must each have " + std::to_string(n) +
                            " entries");
  for (std::size_t i = 0; i < n; ++i)
    if (!(p.lower[i] < p.upper[i]))
      throw ProblemParseError("domain is degenerate on axis " + std::to_string(i + 1) +
                              ": lower must be strictly below upper");
  for (std::size_t i = 0; i < n; ++i)
    if (p.initial_point[i] < p.lower[i] || p.initial_point[i] > p.upper[i])
      throw PointOutsideDomain("initial_point leaves the domain on axis " +
                               std::to_string(i + 1));

  if (auto it = doc.find("options"); it != doc.end()) {
    if (!it->is_object()) throw ProblemParseError("'options' must be an object");
    reject_unknown_fields(*it, {"tolerance", "max_iterations", "norm"}, "options");
    if (auto t = it->find("tolerance"); t != it->end()) {
      if (!t->is_number() || !(t->get<double>() > 0.0))
        throw ProblemParseError("'tolerance' must be a positive number");
      p.options.tolerance = t->get<double>();
    }
    if (auto m = it->find("max_iterations"); m != it->end()) {
      if (!m->is_number_integer() || m->get<long>() < 1)
        throw ProblemParseError("'max_iterations' must be a positive integer");
      p.options.max_iterations = static_cast<int>(m->get<long>());
    }
    if (auto nm = it->find("norm"); nm != it->end()) {
      if (!nm->is_string())
        throw ProblemParseError("'norm' must be \"max\" or \"euclidean\"");
      const std::string s = nm->get<std::string>();
      if (s == "max") p.options.norm = VectorNorm::max;
      else if (s == "euclidean") p.options.norm = VectorNorm::euclidean;
      else throw ProblemParseError("'norm' must be \"max\" or \"euclidean\"");
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (!eqs[i].is_string())
      throw ProblemParseError("equation " + std::to_string(i + 1) +
                              " must be a string");
    try {
      p.equations.push_back(Expression::parse(eqs[i].get<std::string>(), p.variables));
    } catch (const ExprParseError& e) {
      throw ProblemParseError(
          "equation " + std::to_string(i + 1) + ": " + e.what(),
          static_cast<int>(i + 1), e.column());
    }
  }

  // the system must at least be evaluable where iteration starts
  evaluate_residual(p, p.initial_point);
  return p;
}

ProblemSpec load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ProblemParseError("cannot read problem file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_problem(buf.str());
}

DenseVector evaluate_residual(const ProblemSpec& p, const DenseVector& x) {
  const std::size_t n = p.dimension();
  if (x.size() != n)
    throw DimensionMismatch("point has " + std::to_string(x.size()) +
                            " entries for " + std::to_string(n) + " variables");
  DenseVector r(n);
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = p.equations[i].evaluate(x.entries());
    if (!std::isfinite(r[i]))
      throw NonFiniteValue("equation " + std::to_string(i + 1) +
                               " evaluates to a non-finite value",
                           i);
  }
  return r;
}

DenseMatrix evaluate_jacobian(const ProblemSpec& p, const DenseVector& x) {
  const std::size_t n = p.dimension();
  if (x.size() != n)
    throw DimensionMismatch("point has " + std::to_string(x.size()) +
                            " entries for " + std::to_string(n) + " variables");
  DenseMatrix J(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      J(i, j) = p.equations[i].evaluate_dual(x.entries(), j).deriv;
      if (!std::isfinite(J(i, j)))
        throw NonFiniteValue("row " + std::to_string(i + 1) +
                                 " of the Jacobian is non-finite",
                             i);
    }
  }
  return J;
}

SecondDerivativeBound estimate_second_derivative_bound(const ProblemSpec& p,
                                                       int grid_points_per_axis) {
  if (grid_points_per_axis < 2)
    throw std::invalid_argument("grid needs at least 2 points per axis");
  const std::size_t n = p.dimension();
  if (n > 6)
    throw GridTooLarge("second-derivative scan supports at most 6 variables");
  double total = 1.0;
  for (std::size_t i = 0; i < n; ++i) total *= grid_points_per_axis;
  if (total > 1e7)
    throw GridTooLarge("grid of " + format_sig(total, 6) +
                       " points exceeds the 1e7 evaluation cap");

  const int m = grid_points_per_axis;
  const double fd_scale = std::cbrt(DBL_EPSILON);

  SecondDerivativeBound best;
  best.grid_points_per_axis = m;
  best.argmax_point = p.initial_point;

  std::vector<int> idx(n, 0);
  DenseVector x(n);
  while (true) {
    for (std::size_t i = 0; i < n; ++i) {
      // force exact corners so boundary maxima are never missed
      if (idx[i] == m - 1) x[i] = p.upper[i];
      else x[i] = p.lower[i] + idx[i] * ((p.upper[i] - p.lower[i]) / (m - 1));
    }
    for (std::size_t j = 0; j < n; ++j) {
      const double h = fd_scale * std::max(1.0, std::abs(x[j]));
      DenseVector xp = x, xm = x;
      xp[j] = x[j] + h;
      xm[j] = x[j] - h;
      const double denom = xp[j] - xm[j];
      const DenseMatrix Jp = evaluate_jacobian(p, xp);
      const DenseMatrix Jm = evaluate_jacobian(p, xm);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
          const double d2 = (Jp(i, k) - Jm(i, k)) / denom;
          if (std::abs(d2) > best.value) {
            best.value = std::abs(d2);
            best.argmax_point = x;
            best.component = i;
            best.row_var = j;
            best.col_var = k;
          }
        }
    }
    std::size_t axis = 0;
    while (axis < n && ++idx[axis] == m) idx[axis++] = 0;
    if (axis == n) break;
  }
  return best;
}

namespace {

const char* const kBuiltinDocuments[] = {
    R"({
  "name": "paper_example",
  "variables": ["x1", "x2"],
  "equations": ["2*x1^3 - x2^2 - 1", "x1*x2^3 - x2 - 4"],
  "initial_point": [1.2, 1.7],
  "domain": {"lower": [0.0, 0.0], "upper": [1.3, 1.8]},
  "options": {"tolerance": 1e-13, "max_iterations": 50, "norm": "max"}
})",
    R"({
  "name": "scalar_sqrt2",
  "variables": ["x1"],
  "equations": ["x1^2 - 2"],
  "initial_point": [1.5],
  "domain": {"lower": [1.0], "upper": [2.0]},
  "options": {"tolerance": 1e-13, "max_iterations": 50, "norm": "max"}
})",
    R"({
  "name": "linear_2x2",
  "variables": ["x1", "x2"],
  "equations": ["2*x1 + x2 - 3", "x1 + 3*x2 - 5"],
  "initial_point": [0.5, 0.5],
  "domain": {"lower": [0.0, 0.0], "upper": [2.0, 2.0]},
  "options": {"tolerance": 1e-13, "max_iterations": 50, "norm": "max"}
})",
    R"({
  "name": "cyclic_3x3",
  "variables": ["x1", "x2", "x3"],
  "equations": ["x1 + 0.05*(x2^2 - 1) - 1",
                "x2 + 0.05*(x3^2 - 1) - 1",
                "x3 + 0.05*(x1^2 - 1) - 1"],
  "initial_point": [0.9, 0.95, 1.05],
  "domain": {"lower": [0.0, 0.0, 0.0], "upper": [2.0, 2.0, 2.0]},
  "options": {"tolerance": 1e-13, "max_iterations": 50, "norm": "max"}
})",
};

}  // namespace

const std::vector<ProblemSpec>& builtin_problems() {
  static const std::vector<ProblemSpec> problems = [] {
    std::vector<ProblemSpec> out;
    for (const char* doc : kBuiltinDocuments) out.push_back(parse_problem(doc));
    return out;
  }();
  return problems;
}

const ProblemSpec& builtin_problem(const std::string& name) {
  for (const ProblemSpec& p : builtin_problems())
    if (p.name == name) return p;
  std::string known;
  for (const ProblemSpec& p : builtin_problems()) {
    if (!known.empty()) known += ", ";
    known += p.name;
  }
  throw UnknownProblem("no builtin problem named '" + name + "' (known: " + known +
                       ")");
}

}  // namespace invfree
