#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "invfree/expression.hpp"
#include "invfree/linalg.hpp"

namespace invfree {

class ProblemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed document or expression.  For expression failures `line` is the
// 1-based equation index and `column` the 1-based offset into its text; both
// are 0 for document-level failures.
class ProblemParseError : public ProblemError {
 public:
  ProblemParseError(const std::string& message, int line = 0, int column = 0)
      : ProblemError(message), line_(line), column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

class DimensionMismatch : public ProblemError {
 public:
  using ProblemError::ProblemError;
};

class PointOutsideDomain : public ProblemError {
 public:
  using ProblemError::ProblemError;
};

class NonFiniteValue : public ProblemError {
 public:
  NonFiniteValue(const std::string& message, std::size_t component)
      : ProblemError(message), component_(component) {}
  std::size_t component() const { return component_; }

 private:
  std::size_t component_;
};

class GridTooLarge : public ProblemError {
 public:
  using ProblemError::ProblemError;
};

class UnknownProblem : public ProblemError {
 public:
  using ProblemError::ProblemError;
};

struct ProblemOptions {
  double tolerance = 1e-13;
  int max_iterations = 50;
  VectorNorm norm = VectorNorm::max;
};

// Square system P(x) = 0 on a closed box, with a starting point inside it.
struct ProblemSpec {
  std::string name;
  std::vector<std::string> variables;
  std::vector<Expression> equations;
  DenseVector initial_point;
  DenseVector lower;
  DenseVector upper;
  ProblemOptions options;

  std::size_t dimension() const { return variables.size(); }
};

// Strict parse: unknown fields, shape mismatches, degenerate boxes, starting
// points outside the box, and equations that are non-finite there all reject.
ProblemSpec parse_problem(const std::string& json_text);
ProblemSpec load_problem(const std::string& path);

DenseVector evaluate_residual(const ProblemSpec& p, const DenseVector& x);
DenseMatrix evaluate_jacobian(const ProblemSpec& p, const DenseVector& x);

struct SecondDerivativeBound {
  double value = 0.0;              // max |d2 f_component / dx_row_var dx_col_var|
  int grid_points_per_axis = 0;
  DenseVector argmax_point;
  std::size_t component = 0;
  std::size_t row_var = 0;
  std::size_t col_var = 0;
};

// Max second-partial magnitude over a uniform grid on the box (corners always
// included), by central differences of the dual-number gradient.  Refuses
// more than six variables or over 1e7 grid points.
SecondDerivativeBound estimate_second_derivative_bound(const ProblemSpec& p,
                                                       int grid_points_per_axis);

const std::vector<ProblemSpec>& builtin_problems();
const ProblemSpec& builtin_problem(const std::string& name);

}  // namespace invfree
