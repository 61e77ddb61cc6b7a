#ifndef PRESYM_COMPILED_EXPR_HPP
#define PRESYM_COMPILED_EXPR_HPP

#include <span>
#include <string>
#include <vector>

#include "presym/expr.hpp"

namespace presym {

/// An Expr flattened to postfix form with variables resolved to positions in
/// a fixed coordinate layout. Evaluation takes a plain value array ordered by
/// that layout; errors carry the same messages as `eval`.
class CompiledExpr {
 public:
  CompiledExpr() = default;
  /// Throws EvalError (unbound variable) if `e` mentions a name missing
  /// from `layout`.
  CompiledExpr(const Expr& e, std::span<const std::string> layout);

  double operator()(std::span<const double> x) const;
  const Expr& source() const noexcept { return source_; }

 private:
  enum class Code : unsigned char { Const, Var, Neg, Sin, Cos, Exp, Ln, Sqrt, Add, Sub, Mul, Div, Pow };
  struct Instr {
    Code code;
    double value;      // Const / Pow exponent
    std::size_t slot;  // Var
    std::size_t node;  // index into nodes_ for diagnostics
  };

  void emit(const Expr& e, std::span<const std::string> layout);

  Expr source_;
  std::vector<Instr> program_;
  std::vector<Expr> nodes_;
  std::size_t max_depth_ = 0;
};

/// Compile each expression of `exprs` against `layout`.
std::vector<CompiledExpr> compile_all(std::span<const Expr> exprs, std::span<const std::string> layout);

}  // namespace presym

#endif
