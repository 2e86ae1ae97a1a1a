#include "invfree/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <type_traits>
#include <utility>

namespace invfree {

namespace {

enum class UnaryOp { negate, fn_sin, fn_cos, fn_exp, fn_log, fn_sqrt, fn_abs };
enum class BinaryOp { add, sub, mul, div, pow };

std::string format_literal(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---- dual arithmetic -------------------------------------------------------

Dual operator+(Dual a, Dual b) { return {a.value + b.value, a.deriv + b.deriv}; }
Dual operator-(Dual a, Dual b) { return {a.value - b.value, a.deriv - b.deriv}; }
Dual operator-(Dual a) { return {-a.value, -a.deriv}; }
Dual operator*(Dual a, Dual b) {
  return {a.value * b.value, a.deriv * b.value + a.value * b.deriv};
}
Dual operator/(Dual a, Dual b) {
  const double q = a.value / b.value;
  return {q, (a.deriv - q * b.deriv) / b.value};
}
Dual d_sin(Dual a) { return {std::sin(a.value), std::cos(a.value) * a.deriv}; }
Dual d_cos(Dual a) { return {std::cos(a.value), -std::sin(a.value) * a.deriv}; }
Dual d_exp(Dual a) {
  const double e = std::exp(a.value);
  return {e, e * a.deriv};
}
Dual d_log(Dual a) { return {std::log(a.value), a.deriv / a.value}; }
Dual d_sqrt(Dual a) {
  const double s = std::sqrt(a.value);
  return {s, a.deriv / (2.0 * s)};
}
Dual d_abs(Dual a) {
  const double sign = a.value > 0.0 ? 1.0 : (a.value < 0.0 ? -1.0 : 0.0);
  return {std::abs(a.value), sign * a.deriv};
}
Dual d_pow(Dual a, Dual b) {
  // general a^b = exp(b log a); exact integer exponents are handled upstream
  const double v = std::pow(a.value, b.value);
  const double da = b.value * std::pow(a.value, b.value - 1.0) * a.deriv;
  const double db = b.deriv == 0.0 ? 0.0 : v * std::log(a.value) * b.deriv;
  return {v, da + db};
}

Dual make_constant_dual(double v) { return {v, 0.0}; }
double make_constant_double(double v) { return v; }

template <typename T>
T powi(T base, long e) {
  if (e < 0) return T{1.0} / powi(base, -e);
  T out{1.0};
  for (long i = 0; i < e; ++i) out = out * base;
  return out;
}

bool integral_exponent(double v, long& e) {
  if (!std::isfinite(v) || v != std::nearbyint(v) || std::abs(v) > 64.0) return false;
  e = static_cast<long>(v);
  return true;
}

}  // namespace

struct Expression::Node {
  enum class Kind { constant, variable, unary, binary } kind;
  double constant = 0.0;
  std::size_t variable = 0;
  UnaryOp uop = UnaryOp::negate;
  BinaryOp bop = BinaryOp::add;
  std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Node = Expression::Node;

NodePtr make_constant(double v) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::constant;
  n->constant = v;
  return n;
}

NodePtr make_variable(std::size_t idx) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::variable;
  n->variable = idx;
  return n;
}

NodePtr make_unary(UnaryOp op, NodePtr child) {
  // fold -c to a negative literal so integer exponents like x^-2 stay exact
  if (op == UnaryOp::negate && child->kind == Node::Kind::constant)
    return make_constant(-child->constant);
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::unary;
  n->uop = op;
  n->lhs = std::move(child);
  return n;
}

NodePtr make_binary(BinaryOp op, NodePtr lhs, NodePtr rhs) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::binary;
  n->bop = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

// ---- recursive-descent parser ----------------------------------------------

struct Parser {
  const std::string& text;
  const std::vector<std::string>& names;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& message, std::size_t at) const {
    throw ExprParseError(message, static_cast<int>(at) + 1);
  }

  void skip_space() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
      ++pos;
  }

  bool at_end() {
    skip_space();
    return pos >= text.size();
  }

  char peek() {
    skip_space();
    return pos < text.size() ? text[pos] : '\0';
  }

  NodePtr parse_expression() {
    NodePtr lhs = parse_term();
    while (true) {
      const char c = peek();
      if (c != '+' && c != '-') return lhs;
      ++pos;
      lhs = make_binary(c == '+' ? BinaryOp::add : BinaryOp::sub, lhs, parse_term());
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_unary();
    while (true) {
      const char c = peek();
      if (c != '*' && c != '/') return lhs;
      ++pos;
      lhs = make_binary(c == '*' ? BinaryOp::mul : BinaryOp::div, lhs, parse_unary());
    }
  }

  // '^' binds tighter than unary minus and associates to the right:
  // -x^2 is -(x^2), 2^3^2 is 2^(3^2), 2^-3 is 2^(-3)
  NodePtr parse_unary() {
    if (peek() == '-') {
      ++pos;
      return make_unary(UnaryOp::negate, parse_unary());
    }
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_atom();
    if (peek() == '^') {
      ++pos;
      return make_binary(BinaryOp::pow, base, parse_unary());
    }
    return base;
  }

  NodePtr parse_atom() {
    skip_space();
    if (pos >= text.size()) fail("unexpected end of expression", pos);
    const char c = text[pos];
    if (c == '(') {
      ++pos;
      NodePtr inner = parse_expression();
      if (peek() != ')') fail("expected ')'", pos);
      ++pos;
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    fail(std::string("unexpected character '") + c + "'", pos);
  }

  NodePtr parse_number() {
    const std::size_t start = pos;
    double value = 0.0;
    const char* begin = text.data() + pos;
    const char* end = text.data() + text.size();
    auto [next, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{}) fail("malformed number", start);
    pos += static_cast<std::size_t>(next - begin);
    return make_constant(value);
  }

  NodePtr parse_identifier() {
    const std::size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      ++pos;
    const std::string name = text.substr(start, pos - start);
    if (peek() == '(') {
      UnaryOp op;
      if (name == "sin") op = UnaryOp::fn_sin;
      else if (name == "cos") op = UnaryOp::fn_cos;
      else if (name == "exp") op = UnaryOp::fn_exp;
      else if (name == "log") op = UnaryOp::fn_log;
      else if (name == "sqrt") op = UnaryOp::fn_sqrt;
      else if (name == "abs") op = UnaryOp::fn_abs;
      else fail("unknown function '" + name + "'", start);
      ++pos;  // consume '('
      NodePtr arg = parse_expression();
      if (peek() != ')') fail("expected ')' after function argument", pos);
      ++pos;
      return make_unary(op, std::move(arg));
    }
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == name) return make_variable(i);
    fail("unknown variable '" + name + "'", start);
  }
};

// ---- evaluation ------------------------------------------------------------

template <typename T, typename MakeConst, typename MakeVar>
T eval_node(const Node& n, MakeConst make_const, MakeVar make_var) {
  switch (n.kind) {
    case Node::Kind::constant:
      return make_const(n.constant);
    case Node::Kind::variable:
      return make_var(n.variable);
    case Node::Kind::unary: {
      const T a = eval_node<T>(*n.lhs, make_const, make_var);
      switch (n.uop) {
        case UnaryOp::negate: return -a;
        case UnaryOp::fn_sin:
          if constexpr (std::is_same_v<T, double>) return std::sin(a); else return d_sin(a);
        case UnaryOp::fn_cos:
          if constexpr (std::is_same_v<T, double>) return std::cos(a); else return d_cos(a);
        case UnaryOp::fn_exp:
          if constexpr (std::is_same_v<T, double>) return std::exp(a); else return d_exp(a);
        case UnaryOp::fn_log:
          if constexpr (std::is_same_v<T, double>) return std::log(a); else return d_log(a);
        case UnaryOp::fn_sqrt:
          if constexpr (std::is_same_v<T, double>) return std::sqrt(a); else return d_sqrt(a);
        case UnaryOp::fn_abs:
          if constexpr (std::is_same_v<T, double>) return std::abs(a); else return d_abs(a);
      }
      break;
    }
    case Node::Kind::binary: {
      const T a = eval_node<T>(*n.lhs, make_const, make_var);
      if (n.bop == BinaryOp::pow && n.rhs->kind == Node::Kind::constant) {
        long e = 0;
        if (integral_exponent(n.rhs->constant, e)) return powi(a, e);
      }
      const T b = eval_node<T>(*n.rhs, make_const, make_var);
      switch (n.bop) {
        case BinaryOp::add: return a + b;
        case BinaryOp::sub: return a - b;
        case BinaryOp::mul: return a * b;
        case BinaryOp::div: return a / b;
        case BinaryOp::pow:
          if constexpr (std::is_same_v<T, double>) return std::pow(a, b);
          else return d_pow(a, b);
      }
      break;
    }
  }
  throw ExprError("corrupt expression node");
}

// ---- printing --------------------------------------------------------------

int precedence(const Node& n) {
  switch (n.kind) {
    case Node::Kind::binary:
      switch (n.bop) {
        case BinaryOp::add: case BinaryOp::sub: return 1;
        case BinaryOp::mul: case BinaryOp::div: return 2;
        case BinaryOp::pow: return 4;
      }
      return 0;
    case Node::Kind::unary:
      return n.uop == UnaryOp::negate ? 3 : 5;
    default:
      return 5;
  }
}

void print_node(const Node& n, const std::vector<std::string>& names, std::string& out) {
  auto child = [&](const Node& c, bool needs_parens) {
    if (needs_parens) out += '(';
    print_node(c, names, out);
    if (needs_parens) out += ')';
  };
  switch (n.kind) {
    case Node::Kind::constant:
      out += format_literal(n.constant);
      return;
    case Node::Kind::variable:
      out += names[n.variable];
      return;
    case Node::Kind::unary:
      switch (n.uop) {
        case UnaryOp::negate:
          out += '-';
          child(*n.lhs, precedence(*n.lhs) < 3);
          return;
        case UnaryOp::fn_sin: out += "sin("; break;
        case UnaryOp::fn_cos: out += "cos("; break;
        case UnaryOp::fn_exp: out += "exp("; break;
        case UnaryOp::fn_log: out += "log("; break;
        case UnaryOp::fn_sqrt: out += "sqrt("; break;
        case UnaryOp::fn_abs: out += "abs("; break;
      }
      print_node(*n.lhs, names, out);
      out += ')';
      return;
    case Node::Kind::binary: {
      // right children of equal precedence keep parentheses (except for the
      // right-associative ^) so the printed form rebuilds the same tree
      const int prec = precedence(n);
      const char* op = nullptr;
      bool left_strict = false;
      bool right_strict = true;
      switch (n.bop) {
        case BinaryOp::add: op = " + "; break;
        case BinaryOp::sub: op = " - "; break;
        case BinaryOp::mul: op = "*"; break;
        case BinaryOp::div: op = "/"; break;
        case BinaryOp::pow: op = "^"; left_strict = true; right_strict = false; break;
      }
      child(*n.lhs, precedence(*n.lhs) < prec || (left_strict && precedence(*n.lhs) == prec));
      out += op;
      child(*n.rhs, precedence(*n.rhs) < prec || (right_strict && precedence(*n.rhs) == prec));
      return;
    }
  }
}

}  // namespace

Expression Expression::parse(const std::string& text,
                             const std::vector<std::string>& variables) {
  Parser p{text, variables};
  NodePtr root = p.parse_expression();
  if (!p.at_end())
    throw ExprParseError("unexpected trailing input", static_cast<int>(p.pos) + 1);
  return Expression(std::move(root),
                    std::make_shared<const std::vector<std::string>>(variables));
}

double Expression::evaluate(const std::vector<double>& x) const {
  if (!root_) throw ExprError("evaluating empty expression");
  return eval_node<double>(*root_, make_constant_double,
                           [&](std::size_t i) { return x.at(i); });
}

Dual Expression::evaluate_dual(const std::vector<double>& x, std::size_t seed) const {
  if (!root_) throw ExprError("evaluating empty expression");
  return eval_node<Dual>(*root_, make_constant_dual, [&](std::size_t i) {
    return Dual{x.at(i), i == seed ? 1.0 : 0.0};
  });
}

std::string Expression::to_string() const {
  if (!root_) return "";
  std::string out;
  print_node(*root_, *names_, out);
  return out;
}

}  // namespace invfree
