#include "presym/expr.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>

namespace presym {

// ---------------------------------------------------------------------------
// Errors

ParseError::ParseError(const std::string& what, std::size_t offset)
    : std::runtime_error("parse error at offset " + std::to_string(offset) + ": " + what),
      offset_(offset) {}

EvalError::EvalError(Kind kind, const std::string& what, std::string subexpression)
    : std::runtime_error(what + " in '" + subexpression + "'"),
      kind_(kind),
      subexpression_(std::move(subexpression)) {}

// ---------------------------------------------------------------------------
// Node storage

struct Expr::Node {
  Kind kind = Kind::Constant;
  double value = 0.0;
  std::string name;
  UnaryOp uop = UnaryOp::Neg;
  BinaryOp bop = BinaryOp::Add;
  std::array<Expr, 2> children{Expr(EmptyTag{}), Expr(EmptyTag{})};
  std::size_t size = 1;
};

namespace {

const char* function_name(UnaryOp op) {
  switch (op) {
    case UnaryOp::Sin: return "sin";
    case UnaryOp::Cos: return "cos";
    case UnaryOp::Exp: return "exp";
    case UnaryOp::Ln: return "ln";
    case UnaryOp::Sqrt: return "sqrt";
    case UnaryOp::Neg: return "-";
  }
  return "?";
}

std::optional<UnaryOp> function_from_name(std::string_view name) {
  if (name == "sin") return UnaryOp::Sin;
  if (name == "cos") return UnaryOp::Cos;
  if (name == "exp") return UnaryOp::Exp;
  if (name == "ln") return UnaryOp::Ln;
  if (name == "sqrt") return UnaryOp::Sqrt;
  return std::nullopt;
}

std::string format_number(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

}  // namespace

Expr::Expr() : Expr(constant(0.0)) {}

Expr Expr::constant(double value) {
  if (!std::isfinite(value)) throw ExprError("non-finite constant");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Constant;
  n->value = value == 0.0 ? 0.0 : value;  // no negative zero
  return Expr(std::move(n));
}

Expr Expr::variable(std::string name) {
  if (name.empty()) throw ExprError("empty variable name");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Variable;
  n->name = std::move(name);
  return Expr(std::move(n));
}

Expr Expr::unary(UnaryOp op, Expr child) {
  if (op == UnaryOp::Neg && child.is_constant()) return constant(-child.value());
  auto n = std::make_shared<Node>();
  n->kind = Kind::Unary;
  n->uop = op;
  n->size = 1 + child.size();
  n->children[0] = std::move(child);
  return Expr(std::move(n));
}

Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs) {
  if (op == BinaryOp::Pow && !rhs.is_constant())
    throw ExprError("exponent must be a constant");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Binary;
  n->bop = op;
  n->size = 1 + lhs.size() + rhs.size();
  n->children[0] = std::move(lhs);
  n->children[1] = std::move(rhs);
  return Expr(std::move(n));
}

Expr::Kind Expr::kind() const noexcept { return node_->kind; }

bool Expr::is_constant(double v) const noexcept {
  return node_->kind == Kind::Constant && node_->value == v;
}

double Expr::value() const {
  if (kind() != Kind::Constant) throw ExprError("not a constant");
  return node_->value;
}

const std::string& Expr::name() const {
  if (kind() != Kind::Variable) throw ExprError("not a variable");
  return node_->name;
}

UnaryOp Expr::unary_op() const {
  if (kind() != Kind::Unary) throw ExprError("not a unary node");
  return node_->uop;
}

BinaryOp Expr::binary_op() const {
  if (kind() != Kind::Binary) throw ExprError("not a binary node");
  return node_->bop;
}

const Expr& Expr::child() const {
  if (kind() != Kind::Unary) throw ExprError("not a unary node");
  return node_->children[0];
}

const Expr& Expr::lhs() const {
  if (kind() != Kind::Binary) throw ExprError("not a binary node");
  return node_->children[0];
}

const Expr& Expr::rhs() const {
  if (kind() != Kind::Binary) throw ExprError("not a binary node");
  return node_->children[1];
}

std::size_t Expr::size() const noexcept { return node_->size; }

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind() || a.size() != b.size()) return false;
  switch (a.kind()) {
    case Expr::Kind::Constant: return a.value() == b.value();
    case Expr::Kind::Variable: return a.name() == b.name();
    case Expr::Kind::Unary:
      return a.unary_op() == b.unary_op() && a.child() == b.child();
    case Expr::Kind::Binary:
      return a.binary_op() == b.binary_op() && a.lhs() == b.lhs() && a.rhs() == b.rhs();
  }
  return false;
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::binary(BinaryOp::Add, a, b); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::binary(BinaryOp::Sub, a, b); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::binary(BinaryOp::Mul, a, b); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::binary(BinaryOp::Div, a, b); }
Expr operator-(const Expr& a) { return Expr::unary(UnaryOp::Neg, a); }
Expr pow(const Expr& base, double exponent) {
  return Expr::binary(BinaryOp::Pow, base, Expr::constant(exponent));
}

// ---------------------------------------------------------------------------
// Printing

namespace {

// Binding strength used to decide where parentheses are required.
int precedence(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Constant: return e.value() < 0 ? 3 : 5;
    case Expr::Kind::Variable: return 5;
    case Expr::Kind::Unary: return e.unary_op() == UnaryOp::Neg ? 3 : 5;
    case Expr::Kind::Binary:
      switch (e.binary_op()) {
        case BinaryOp::Add:
        case BinaryOp::Sub: return 1;
        case BinaryOp::Mul:
        case BinaryOp::Div: return 2;
        case BinaryOp::Pow: return 4;
      }
  }
  return 5;
}

void print(const Expr& e, std::string& out);

void print_wrapped(const Expr& e, bool wrap, std::string& out) {
  if (wrap) out += '(';
  print(e, out);
  if (wrap) out += ')';
}

void print(const Expr& e, std::string& out) {
  switch (e.kind()) {
    case Expr::Kind::Constant:
      out += format_number(e.value());
      return;
    case Expr::Kind::Variable:
      out += e.name();
      return;
    case Expr::Kind::Unary:
      if (e.unary_op() == UnaryOp::Neg) {
        out += '-';
        print_wrapped(e.child(), precedence(e.child()) < 3, out);
      } else {
        out += function_name(e.unary_op());
        out += '(';
        print(e.child(), out);
        out += ')';
      }
      return;
    case Expr::Kind::Binary: {
      const Expr& l = e.lhs();
      const Expr& r = e.rhs();
      switch (e.binary_op()) {
        case BinaryOp::Add:
        case BinaryOp::Sub:
          print(l, out);
          out += e.binary_op() == BinaryOp::Add ? " + " : " - ";
          print_wrapped(r, precedence(r) <= 1 || precedence(r) == 3, out);
          return;
        case BinaryOp::Mul:
        case BinaryOp::Div:
          print_wrapped(l, precedence(l) < 2, out);
          out += e.binary_op() == BinaryOp::Mul ? "*" : "/";
          print_wrapped(r, precedence(r) <= 3, out);
          return;
        case BinaryOp::Pow:
          print_wrapped(l, precedence(l) < 5, out);
          out += '^';
          print_wrapped(r, r.value() < 0, out);
          return;
      }
    }
  }
}

}  // namespace

std::string Expr::str() const {
  std::string out;
  print(*this, out);
  return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  Expr parse_all() {
    Expr e = parse_expr();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_ + 1); }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= src_.size()) fail(std::string("expected '") + c + "' before end of input");
      fail(std::string("expected '") + c + "'");
    }
  }

  char peek() {
    skip_ws();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }

  Expr parse_expr() {
    Expr lhs = parse_term();
    for (;;) {
      if (accept('+')) {
        lhs = lhs + parse_term();
      } else if (accept('-')) {
        lhs = lhs - parse_term();
      } else {
        return lhs;
      }
    }
  }

  Expr parse_term() {
    Expr lhs = parse_factor();
    for (;;) {
      if (accept('*')) {
        lhs = lhs * parse_factor();
      } else if (accept('/')) {
        lhs = lhs / parse_factor();
      } else {
        return lhs;
      }
    }
  }

  Expr parse_factor() {
    if (accept('-')) return -parse_factor();
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_atom();
    if (accept('^')) return pow(base, parse_exponent());
    return base;
  }

  // rational := ['-'] number | '(' ['-'] number ['/' ['-'] number] ')'
  // Chained exponents associate to the right and fold to one constant.
  double parse_exponent() {
    double value = 0.0;
    if (accept('(')) {
      value = parse_signed_number();
      if (accept('/')) {
        double den = parse_signed_number();
        if (den == 0.0) fail("zero denominator in exponent");
        value /= den;
      }
      expect(')');
    } else {
      value = parse_signed_number();
    }
    if (accept('^')) value = std::pow(value, parse_exponent());
    if (!std::isfinite(value)) fail("exponent is not finite");
    return value;
  }

  double parse_signed_number() {
    bool neg = accept('-');
    skip_ws();
    if (pos_ < src_.size() && (std::isalpha(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      fail("non-constant exponent");
    if (!starts_number()) fail("expected a constant exponent");
    double v = parse_number();
    return neg ? -v : v;
  }

  bool starts_number() const {
    if (pos_ >= src_.size()) return false;
    char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) return true;
    return c == '.' && pos_ + 1 < src_.size() &&
           std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]));
  }

  double parse_number() {
    std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        digits();
      } else {
        pos_ = save;
      }
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, v);
    if (ec != std::errc() || ptr != src_.data() + pos_ || !std::isfinite(v)) {
      pos_ = start;
      fail("malformed number");
    }
    return v;
  }

  Expr parse_atom() {
    skip_ws();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    char c = src_[pos_];
    if (starts_number()) return Expr::constant(parse_number());
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        ++pos_;
      std::string ident(src_.substr(start, pos_ - start));
      if (peek() == '(') {
        auto fn = function_from_name(ident);
        if (!fn) {
          pos_ = start;
          fail("unknown function '" + ident + "'");
        }
        expect('(');
        Expr arg = parse_expr();
        expect(')');
        return Expr::unary(*fn, arg);
      }
      return Expr::variable(std::move(ident));
    }
    if (accept('(')) {
      Expr inner = parse_expr();
      expect(')');
      return inner;
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view source) { return Parser(source).parse_all(); }

// ---------------------------------------------------------------------------
// Variable tables and evaluation

VariableTable::VariableTable(std::initializer_list<std::pair<std::string, double>> bindings) {
  for (const auto& [n, v] : bindings) bind(n, v);
}

VariableTable::VariableTable(std::span<const std::string> names, std::span<const double> values) {
  if (names.size() != values.size()) throw std::invalid_argument("names/values size mismatch");
  for (std::size_t i = 0; i < names.size(); ++i) bind(names[i], values[i]);
}

void VariableTable::bind(std::string name, double value) {
  if (find(name) != nullptr) throw std::invalid_argument("duplicate variable '" + name + "'");
  names_.push_back(std::move(name));
  values_.push_back(value);
}

const double* VariableTable::find(std::string_view name) const noexcept {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return &values_[i];
  return nullptr;
}

namespace {

double apply_checked(UnaryOp op, double x, const Expr& e) {
  switch (op) {
    case UnaryOp::Neg: return -x;
    case UnaryOp::Sin: return std::sin(x);
    case UnaryOp::Cos: return std::cos(x);
    case UnaryOp::Exp: return std::exp(x);
    case UnaryOp::Ln:
      if (!(x > 0.0)) throw EvalError(EvalError::Kind::Domain, "ln of non-positive value", e.str());
      return std::log(x);
    case UnaryOp::Sqrt:
      if (!(x >= 0.0)) throw EvalError(EvalError::Kind::Domain, "sqrt of negative value", e.str());
      return std::sqrt(x);
  }
  return 0.0;
}

double apply_checked(BinaryOp op, double a, double b, const Expr& e) {
  switch (op) {
    case BinaryOp::Add: return a + b;
    case BinaryOp::Sub: return a - b;
    case BinaryOp::Mul: return a * b;
    case BinaryOp::Div:
      if (b == 0.0) throw EvalError(EvalError::Kind::Domain, "division by zero", e.str());
      return a / b;
    case BinaryOp::Pow:
      if (a < 0.0 && b != std::floor(b))
        throw EvalError(EvalError::Kind::Domain, "fractional power of negative value", e.str());
      if (a == 0.0 && b < 0.0)
        throw EvalError(EvalError::Kind::Domain, "negative power of zero", e.str());
      return std::pow(a, b);
  }
  return 0.0;
}

}  // namespace

double eval(const Expr& e, const VariableTable& vars) {
  switch (e.kind()) {
    case Expr::Kind::Constant: return e.value();
    case Expr::Kind::Variable: {
      const double* v = vars.find(e.name());
      if (v == nullptr)
        throw EvalError(EvalError::Kind::UnboundVariable, "unbound variable '" + e.name() + "'",
                        e.name());
      return *v;
    }
    case Expr::Kind::Unary: return apply_checked(e.unary_op(), eval(e.child(), vars), e);
    case Expr::Kind::Binary:
      return apply_checked(e.binary_op(), eval(e.lhs(), vars), eval(e.rhs(), vars), e);
  }
  return 0.0;
}

double eval_magnitude(const Expr& e, const VariableTable& vars) {
  switch (e.kind()) {
    case Expr::Kind::Constant: return std::abs(e.value());
    case Expr::Kind::Variable: return std::abs(eval(e, vars));
    case Expr::Kind::Unary:
      if (e.unary_op() == UnaryOp::Neg) return eval_magnitude(e.child(), vars);
      return std::abs(eval(e, vars));
    case Expr::Kind::Binary:
      switch (e.binary_op()) {
        case BinaryOp::Add:
        case BinaryOp::Sub: return eval_magnitude(e.lhs(), vars) + eval_magnitude(e.rhs(), vars);
        case BinaryOp::Mul: return eval_magnitude(e.lhs(), vars) * eval_magnitude(e.rhs(), vars);
        case BinaryOp::Div:
          return eval_magnitude(e.lhs(), vars) / std::abs(eval(e.rhs(), vars));
        case BinaryOp::Pow: {
          double n = e.rhs().value();
          double base = n >= 0 ? eval_magnitude(e.lhs(), vars) : std::abs(eval(e.lhs(), vars));
          return std::pow(base, n);
        }
      }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Simplification

namespace {

bool is_neg(const Expr& e) { return e.kind() == Expr::Kind::Unary && e.unary_op() == UnaryOp::Neg; }

bool is_op(const Expr& e, BinaryOp op) {
  return e.kind() == Expr::Kind::Binary && e.binary_op() == op;
}

std::optional<double> fold(UnaryOp op, double x) {
  try {
    double v = apply_checked(op, x, Expr());
    if (std::isfinite(v)) return v;
  } catch (const EvalError&) {
  }
  return std::nullopt;
}

std::optional<double> fold(BinaryOp op, double a, double b) {
  try {
    double v = apply_checked(op, a, b, Expr());
    if (std::isfinite(v)) return v;
  } catch (const EvalError&) {
  }
  return std::nullopt;
}

// e == rest + k (k constant); sums written as rest - k report -k.
std::optional<std::pair<Expr, double>> split_sum_constant(const Expr& e) {
  if (is_op(e, BinaryOp::Add)) {
    if (e.rhs().is_constant()) return std::make_pair(e.lhs(), e.rhs().value());
    if (e.lhs().is_constant()) return std::make_pair(e.rhs(), e.lhs().value());
  }
  if (is_op(e, BinaryOp::Sub) && e.rhs().is_constant())
    return std::make_pair(e.lhs(), -e.rhs().value());
  return std::nullopt;
}

// e == k * rest (k constant)
std::optional<std::pair<Expr, double>> split_product_constant(const Expr& e) {
  if (is_op(e, BinaryOp::Mul)) {
    if (e.lhs().is_constant()) return std::make_pair(e.rhs(), e.lhs().value());
    if (e.rhs().is_constant()) return std::make_pair(e.lhs(), e.rhs().value());
  }
  return std::nullopt;
}

Expr mk_neg(const Expr& a);
Expr mk_add(const Expr& a, const Expr& b);
Expr mk_sub(const Expr& a, const Expr& b);
Expr mk_mul(const Expr& a, const Expr& b);

// rest + k with the constant kept on the right and a negative k written as a
// subtraction.
Expr attach_constant(const Expr& rest, double k) {
  if (k == 0.0) return rest;
  if (k < 0.0) return Expr::binary(BinaryOp::Sub, rest, Expr::constant(-k));
  return Expr::binary(BinaryOp::Add, rest, Expr::constant(k));
}

Expr mk_neg(const Expr& a) {
  if (a.is_constant()) return Expr::constant(-a.value());
  if (is_neg(a)) return a.child();
  return Expr::unary(UnaryOp::Neg, a);
}

Expr mk_add(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) {
    if (auto v = fold(BinaryOp::Add, a.value(), b.value())) return Expr::constant(*v);
  }
  if (a.is_constant(0.0)) return b;
  if (b.is_constant(0.0)) return a;
  if (is_neg(b)) return mk_sub(a, b.child());
  if (is_neg(a) && !b.is_constant()) return mk_sub(b, a.child());
  if (b.is_constant()) {
    if (auto s = split_sum_constant(a)) {
      if (auto v = fold(BinaryOp::Add, s->second, b.value())) return attach_constant(s->first, *v);
    }
    return attach_constant(a, b.value());
  }
  if (a.is_constant()) {
    if (auto s = split_sum_constant(b)) {
      if (auto v = fold(BinaryOp::Add, a.value(), s->second)) return attach_constant(s->first, *v);
    }
  }
  return Expr::binary(BinaryOp::Add, a, b);
}

Expr mk_sub(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) {
    if (auto v = fold(BinaryOp::Sub, a.value(), b.value())) return Expr::constant(*v);
  }
  if (b.is_constant(0.0)) return a;
  if (a.is_constant(0.0)) return mk_neg(b);
  if (is_neg(b)) return mk_add(a, b.child());
  if (b.is_constant()) {
    if (auto s = split_sum_constant(a)) {
      if (auto v = fold(BinaryOp::Sub, s->second, b.value())) return attach_constant(s->first, *v);
    }
    return attach_constant(a, -b.value());
  }
  if (a.is_constant()) {
    if (auto s = split_sum_constant(b)) {
      // c - (rest + k) = (c - k) - rest
      if (auto v = fold(BinaryOp::Sub, a.value(), s->second)) {
        if (*v == 0.0) return mk_neg(s->first);
        return Expr::binary(BinaryOp::Sub, Expr::constant(*v), s->first);
      }
    }
  }
  return Expr::binary(BinaryOp::Sub, a, b);
}

Expr mk_mul(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) {
    if (auto v = fold(BinaryOp::Mul, a.value(), b.value())) return Expr::constant(*v);
  }
  if (a.is_constant(0.0) || b.is_constant(0.0)) return Expr::constant(0.0);
  if (a.is_constant(1.0)) return b;
  if (b.is_constant(1.0)) return a;
  if (a.is_constant(-1.0)) return mk_neg(b);
  if (b.is_constant(-1.0)) return mk_neg(a);
  const Expr* c = a.is_constant() ? &a : (b.is_constant() ? &b : nullptr);
  if (c != nullptr) {
    const Expr& other = c == &a ? b : a;
    if (is_neg(other)) return mk_mul(Expr::constant(-c->value()), other.child());
    if (auto s = split_product_constant(other)) {
      if (auto v = fold(BinaryOp::Mul, c->value(), s->second)) return mk_mul(Expr::constant(*v), s->first);
    }
    return Expr::binary(BinaryOp::Mul, *c, other);
  }
  if (is_neg(a)) return mk_neg(mk_mul(a.child(), b));
  if (is_neg(b)) return mk_neg(mk_mul(a, b.child()));
  return Expr::binary(BinaryOp::Mul, a, b);
}

Expr mk_div(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) {
    if (auto v = fold(BinaryOp::Div, a.value(), b.value())) return Expr::constant(*v);
  }
  if (a.is_constant(0.0) && !b.is_constant(0.0)) return Expr::constant(0.0);
  if (b.is_constant(1.0)) return a;
  if (b.is_constant(-1.0)) return mk_neg(a);
  if (is_neg(a)) return mk_neg(mk_div(a.child(), b));
  if (is_neg(b)) return mk_neg(mk_div(a, b.child()));
  return Expr::binary(BinaryOp::Div, a, b);
}

Expr mk_pow(const Expr& a, double n) {
  if (a.is_constant()) {
    if (auto v = fold(BinaryOp::Pow, a.value(), n)) return Expr::constant(*v);
  }
  if (n == 0.0) return Expr::constant(1.0);
  if (n == 1.0) return a;
  return Expr::binary(BinaryOp::Pow, a, Expr::constant(n));
}

Expr mk_fn(UnaryOp op, const Expr& a) {
  if (op == UnaryOp::Neg) return mk_neg(a);
  if (a.is_constant()) {
    if (auto v = fold(op, a.value())) return Expr::constant(*v);
  }
  return Expr::unary(op, a);
}

Expr mk_binary(BinaryOp op, const Expr& a, const Expr& b) {
  switch (op) {
    case BinaryOp::Add: return mk_add(a, b);
    case BinaryOp::Sub: return mk_sub(a, b);
    case BinaryOp::Mul: return mk_mul(a, b);
    case BinaryOp::Div: return mk_div(a, b);
    case BinaryOp::Pow: return mk_pow(a, b.value());
  }
  return a;
}

Expr simplify_pass(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Constant:
    case Expr::Kind::Variable: return e;
    case Expr::Kind::Unary: return mk_fn(e.unary_op(), simplify_pass(e.child()));
    case Expr::Kind::Binary:
      return mk_binary(e.binary_op(), simplify_pass(e.lhs()), simplify_pass(e.rhs()));
  }
  return e;
}

bool depends_on(const Expr& e, std::string_view var) {
  switch (e.kind()) {
    case Expr::Kind::Constant: return false;
    case Expr::Kind::Variable: return e.name() == var;
    case Expr::Kind::Unary: return depends_on(e.child(), var);
    case Expr::Kind::Binary: return depends_on(e.lhs(), var) || depends_on(e.rhs(), var);
  }
  return false;
}

// Derivative built from the rewriting constructors; children of the result
// are already in simplified form, a final simplify reaches the fixpoint.
Expr derivative(const Expr& e, std::string_view var) {
  if (!depends_on(e, var)) return Expr::constant(0.0);
  switch (e.kind()) {
    case Expr::Kind::Constant: return Expr::constant(0.0);
    case Expr::Kind::Variable: return Expr::constant(1.0);
    case Expr::Kind::Unary: {
      const Expr& a = e.child();
      Expr da = derivative(a, var);
      switch (e.unary_op()) {
        case UnaryOp::Neg: return mk_neg(da);
        case UnaryOp::Sin: return mk_mul(mk_fn(UnaryOp::Cos, a), da);
        case UnaryOp::Cos: return mk_neg(mk_mul(mk_fn(UnaryOp::Sin, a), da));
        case UnaryOp::Exp: return mk_mul(e, da);
        case UnaryOp::Ln: return mk_div(da, a);
        case UnaryOp::Sqrt: return mk_div(da, mk_mul(Expr::constant(2.0), e));
      }
      break;
    }
    case Expr::Kind::Binary: {
      const Expr& a = e.lhs();
      const Expr& b = e.rhs();
      switch (e.binary_op()) {
        case BinaryOp::Add: return mk_add(derivative(a, var), derivative(b, var));
        case BinaryOp::Sub: return mk_sub(derivative(a, var), derivative(b, var));
        case BinaryOp::Mul:
          return mk_add(mk_mul(derivative(a, var), b), mk_mul(a, derivative(b, var)));
        case BinaryOp::Div: {
          Expr da = derivative(a, var);
          Expr db = derivative(b, var);
          if (db.is_constant(0.0)) return mk_div(da, b);
          Expr num = mk_sub(mk_mul(da, b), mk_mul(a, db));
          return mk_div(num, mk_pow(b, 2.0));
        }
        case BinaryOp::Pow: {
          double n = b.value();
          return mk_mul(mk_mul(Expr::constant(n), mk_pow(a, n - 1.0)), derivative(a, var));
        }
      }
      break;
    }
  }
  return Expr::constant(0.0);
}

Expr substitute_raw(const Expr& e, const std::map<std::string, Expr, std::less<>>& map) {
  switch (e.kind()) {
    case Expr::Kind::Constant: return e;
    case Expr::Kind::Variable: {
      auto it = map.find(e.name());
      return it == map.end() ? e : it->second;
    }
    case Expr::Kind::Unary: return Expr::unary(e.unary_op(), substitute_raw(e.child(), map));
    case Expr::Kind::Binary:
      return Expr::binary(e.binary_op(), substitute_raw(e.lhs(), map), substitute_raw(e.rhs(), map));
  }
  return e;
}

void collect_variables(const Expr& e, std::set<std::string>& out) {
  switch (e.kind()) {
    case Expr::Kind::Constant: return;
    case Expr::Kind::Variable: out.insert(e.name()); return;
    case Expr::Kind::Unary: collect_variables(e.child(), out); return;
    case Expr::Kind::Binary:
      collect_variables(e.lhs(), out);
      collect_variables(e.rhs(), out);
      return;
  }
}

}  // namespace

Expr simplify(const Expr& e) {
  Expr current = simplify_pass(e);
  for (int i = 0; i < 64; ++i) {
    Expr next = simplify_pass(current);
    if (next == current) return current;
    current = std::move(next);
  }
  return current;
}

Expr diff(const Expr& e, std::string_view var) { return simplify(derivative(e, var)); }

Expr substitute(const Expr& e, std::span<const std::pair<std::string, Expr>> bindings) {
  std::map<std::string, Expr, std::less<>> map;
  for (const auto& [name, value] : bindings) map.insert_or_assign(name, value);
  return simplify(substitute_raw(e, map));
}

std::set<std::string> free_variables(const Expr& e) {
  std::set<std::string> out;
  collect_variables(e, out);
  return out;
}

}  // namespace presym
