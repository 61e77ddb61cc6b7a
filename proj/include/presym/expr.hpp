#ifndef PRESYM_EXPR_HPP
#define PRESYM_EXPR_HPP

#include <array>
#include <memory>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace presym {

enum class UnaryOp { Neg, Sin, Cos, Exp, Ln, Sqrt };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };

/// Raised for malformed source text. `offset()` is the 1-based character
/// position of the offending token.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset);
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Raised when a tree cannot be built (e.g. a non-constant exponent).
class ExprError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EvalError : public std::runtime_error {
 public:
  enum class Kind { UnboundVariable, Domain };
  EvalError(Kind kind, const std::string& what, std::string subexpression);
  Kind kind() const noexcept { return kind_; }
  /// Printed form of the subexpression that failed.
  const std::string& subexpression() const noexcept { return subexpression_; }

 private:
  Kind kind_;
  std::string subexpression_;
};

/// Immutable symbolic expression over named real scalars.
///
/// Nodes are shared; copying an Expr is cheap. Powers always carry a
/// constant exponent, which keeps `diff` closed over the tree language.
/// Negation of a constant is folded into the constant at construction so
/// that printing and re-parsing reproduce the same tree.
class Expr {
 public:
  enum class Kind { Constant, Variable, Unary, Binary };

  Expr();  // the constant 0
  static Expr constant(double value);
  static Expr variable(std::string name);
  static Expr unary(UnaryOp op, Expr child);
  static Expr binary(BinaryOp op, Expr lhs, Expr rhs);

  Kind kind() const noexcept;
  bool is_constant() const noexcept { return kind() == Kind::Constant; }
  bool is_constant(double v) const noexcept;
  bool is_variable() const noexcept { return kind() == Kind::Variable; }

  double value() const;              // Constant only
  const std::string& name() const;   // Variable only
  UnaryOp unary_op() const;          // Unary only
  BinaryOp binary_op() const;        // Binary only
  const Expr& child() const;         // Unary only
  const Expr& lhs() const;           // Binary only
  const Expr& rhs() const;           // Binary only

  /// Number of nodes in the tree.
  std::size_t size() const noexcept;

  std::string str() const;

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  struct Node;
  struct EmptyTag {};
  explicit Expr(EmptyTag) {}
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

// Raw (unsimplified) tree builders.
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& base, double exponent);

/// Ordered (name, value) bindings. The order is the canonical coordinate
/// order used by every Jacobian built from the table.
class VariableTable {
 public:
  VariableTable() = default;
  VariableTable(std::initializer_list<std::pair<std::string, double>> bindings);
  VariableTable(std::span<const std::string> names, std::span<const double> values);

  void bind(std::string name, double value);  // throws on duplicate
  const double* find(std::string_view name) const noexcept;
  std::size_t size() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::vector<double>& values() const noexcept { return values_; }

 private:
  std::vector<std::string> names_;
  std::vector<double> values_;
};

Expr parse(std::string_view source);
double eval(const Expr& e, const VariableTable& vars);

/// Scale of the intermediate terms of `e` at a point: constants and
/// variables contribute their absolute value, sums add magnitudes and
/// products multiply them. Used as the relative reference for zero tests
/// so that cancellation between large terms is not mistaken for signal.
double eval_magnitude(const Expr& e, const VariableTable& vars);

/// Apply the fixed rewrite set until a fixpoint:
///   - constant folding (skipped when the result would be non-finite or a
///     domain error),
///   - x+0, 0+x, x-0, 0-x -> -x, a+(-b) -> a-b, a-(-b) -> a+b,
///   - x*0, 0*x, x*1, 1*x, x*(-1), (-1)*x -> -x, 0/x, x/1,
///   - x^0, x^1, -(-x),
///   - merging of constants across nested sums and products,
///     e.g. (x+2)+3 -> x+5 and 2*(3*x) -> 6*x.
/// No factoring, no like-term collection, no trig identities.
Expr simplify(const Expr& e);

Expr diff(const Expr& e, std::string_view var);

/// Simultaneous substitution followed by simplify.
Expr substitute(const Expr& e, std::span<const std::pair<std::string, Expr>> bindings);

std::set<std::string> free_variables(const Expr& e);

}  // namespace presym

#endif
