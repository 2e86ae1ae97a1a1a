#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace invfree {

class ExprError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parse failure with a 1-based column offset into the expression text.
class ExprParseError : public ExprError {
 public:
  ExprParseError(const std::string& message, int column)
      : ExprError(message + " (column " + std::to_string(column) + ")"),
        column_(column) {}
  int column() const { return column_; }

 private:
  int column_;
};

// Forward-mode dual number: value and derivative along one seed direction.
struct Dual {
  double value = 0.0;
  double deriv = 0.0;
};

// Immutable scalar expression over a fixed variable list.
//
// Grammar: + - * / ^ with usual precedence, ^ right-associative and binding
// tighter than unary minus; functions sin, cos, exp, log, sqrt, abs; numeric
// literals with optional exponent.  Integer constant exponents |e| <= 64 are
// evaluated by repeated multiplication so dual derivatives stay exact.
class Expression {
 public:
  Expression() = default;

  static Expression parse(const std::string& text,
                          const std::vector<std::string>& variables);

  double evaluate(const std::vector<double>& x) const;
  // Derivative with respect to x[seed] alongside the value.
  Dual evaluate_dual(const std::vector<double>& x, std::size_t seed) const;

  // Re-parsable text form (minimal parentheses, 17-significant-digit literals).
  std::string to_string() const;

  bool valid() const { return root_ != nullptr; }

  struct Node;  // opaque; defined in the implementation file

 private:
  Expression(std::shared_ptr<const Node> root,
             std::shared_ptr<const std::vector<std::string>> names)
      : root_(std::move(root)), names_(std::move(names)) {}

  std::shared_ptr<const Node> root_;
  std::shared_ptr<const std::vector<std::string>> names_;
};

}  // namespace invfree
