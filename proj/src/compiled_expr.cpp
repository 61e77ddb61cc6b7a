#include "presym/compiled_expr.hpp"

#include <cmath>

namespace presym {

CompiledExpr::CompiledExpr(const Expr& e, std::span<const std::string> layout) : source_(e) {
  emit(e, layout);
  std::size_t depth = 0;
  for (const auto& in : program_) {
    switch (in.code) {
      case Code::Const:
      case Code::Var:
        ++depth;
        break;
      case Code::Add:
      case Code::Sub:
      case Code::Mul:
      case Code::Div:
        --depth;
        break;
      default:
        break;
    }
    max_depth_ = std::max(max_depth_, depth);
  }
}

void CompiledExpr::emit(const Expr& e, std::span<const std::string> layout) {
  std::size_t node = nodes_.size();
  switch (e.kind()) {
    case Expr::Kind::Constant:
      program_.push_back({Code::Const, e.value(), 0, node});
      return;
    case Expr::Kind::Variable: {
      for (std::size_t i = 0; i < layout.size(); ++i) {
        if (layout[i] == e.name()) {
          program_.push_back({Code::Var, 0.0, i, node});
          return;
        }
      }
      throw EvalError(EvalError::Kind::UnboundVariable, "unbound variable '" + e.name() + "'", e.name());
    }
    case Expr::Kind::Unary: {
      emit(e.child(), layout);
      nodes_.push_back(e);
      Code c = Code::Neg;
      switch (e.unary_op()) {
        case UnaryOp::Neg: c = Code::Neg; break;
        case UnaryOp::Sin: c = Code::Sin; break;
        case UnaryOp::Cos: c = Code::Cos; break;
        case UnaryOp::Exp: c = Code::Exp; break;
        case UnaryOp::Ln: c = Code::Ln; break;
        case UnaryOp::Sqrt: c = Code::Sqrt; break;
      }
      program_.push_back({c, 0.0, 0, nodes_.size() - 1});
      return;
    }
    case Expr::Kind::Binary: {
      if (e.binary_op() == BinaryOp::Pow) {
        emit(e.lhs(), layout);
        nodes_.push_back(e);
        program_.push_back({Code::Pow, e.rhs().value(), 0, nodes_.size() - 1});
        return;
      }
      emit(e.lhs(), layout);
      emit(e.rhs(), layout);
      nodes_.push_back(e);
      Code c = Code::Add;
      switch (e.binary_op()) {
        case BinaryOp::Add: c = Code::Add; break;
        case BinaryOp::Sub: c = Code::Sub; break;
        case BinaryOp::Mul: c = Code::Mul; break;
        case BinaryOp::Div: c = Code::Div; break;
        case BinaryOp::Pow: break;
      }
      program_.push_back({c, 0.0, 0, nodes_.size() - 1});
      return;
    }
  }
}

double CompiledExpr::operator()(std::span<const double> x) const {
  thread_local std::vector<double> stack;
  if (stack.size() < max_depth_ + 1) stack.resize(max_depth_ + 1);
  std::size_t top = 0;  // number of live entries
  auto domain = [&](const char* what, const Instr& in) -> double {
    throw EvalError(EvalError::Kind::Domain, what, nodes_[in.node].str());
  };
  for (const auto& in : program_) {
    switch (in.code) {
      case Code::Const: stack[top++] = in.value; break;
      case Code::Var: stack[top++] = x[in.slot]; break;
      case Code::Neg: stack[top - 1] = -stack[top - 1]; break;
      case Code::Sin: stack[top - 1] = std::sin(stack[top - 1]); break;
      case Code::Cos: stack[top - 1] = std::cos(stack[top - 1]); break;
      case Code::Exp: stack[top - 1] = std::exp(stack[top - 1]); break;
      case Code::Ln:
        if (!(stack[top - 1] > 0.0)) domain("ln of non-positive value", in);
        stack[top - 1] = std::log(stack[top - 1]);
        break;
      case Code::Sqrt:
        if (!(stack[top - 1] >= 0.0)) domain("sqrt of negative value", in);
        stack[top - 1] = std::sqrt(stack[top - 1]);
        break;
      case Code::Pow: {
        double a = stack[top - 1];
        double n = in.value;
        if (a < 0.0 && n != std::floor(n)) domain("fractional power of negative value", in);
        if (a == 0.0 && n < 0.0) domain("negative power of zero", in);
        stack[top - 1] = n == 2.0 ? a * a : std::pow(a, n);
        break;
      }
      case Code::Add: --top; stack[top - 1] += stack[top]; break;
      case Code::Sub: --top; stack[top - 1] -= stack[top]; break;
      case Code::Mul: --top; stack[top - 1] *= stack[top]; break;
      case Code::Div:
        --top;
        if (stack[top] == 0.0) domain("division by zero", in);
        stack[top - 1] /= stack[top];
        break;
    }
  }
  return stack[0];
}

std::vector<CompiledExpr> compile_all(std::span<const Expr> exprs, std::span<const std::string> layout) {
  std::vector<CompiledExpr> out;
  out.reserve(exprs.size());
  for (const auto& e : exprs) out.emplace_back(e, layout);
  return out;
}

}  // namespace presym
