#ifndef PRESYM_TESTS_SUPPORT_HPP
#define PRESYM_TESTS_SUPPORT_HPP

// Independent oracles for the test suites: finite differences, a random
// expression corpus and a brute-force Poisson bracket. Nothing here calls
// diff() or poisson_bracket().

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "presym/compiled_expr.hpp"
#include "presym/expr.hpp"
#include "presym/numeric.hpp"
#include "presym/problem.hpp"
#include "presym/problem_io.hpp"

namespace testsupport {

using presym::Expr;

inline std::string problem_path(const std::string& name) { return std::string(PRESYM_PROBLEM_DIR) + "/" + name; }

inline presym::ControlProblem fixture(const std::string& name) { return presym::load_problem(problem_path(name)); }

inline presym::PontryaginSystem fixture_system(const std::string& name) {
  return presym::build_pontryagin(fixture(name));
}

inline double value(const Expr& e, const std::vector<std::string>& layout, const std::vector<double>& x) {
  return presym::eval(e, presym::VariableTable(layout, x));
}

/// Central difference with a step relative to the coordinate.
inline double fd_partial(const Expr& e, const std::vector<std::string>& layout, std::vector<double> x,
                         std::size_t index, double rel_step = 1e-6) {
  const double h = rel_step * std::max(1.0, std::abs(x[index]));
  const double x0 = x[index];
  x[index] = x0 + h;
  const double fp = value(e, layout, x);
  x[index] = x0 - h;
  const double fm = value(e, layout, x);
  return (fp - fm) / (2.0 * h);
}

inline std::size_t index_of(const std::vector<std::string>& layout, const std::string& name) {
  return static_cast<std::size_t>(std::find(layout.begin(), layout.end(), name) - layout.begin());
}

/// {f, g} by finite differences in the system layout.
inline double fd_bracket(const Expr& f, const Expr& g, const presym::PontryaginSystem& sys,
                         const std::vector<double>& x) {
  const auto layout = sys.layout();
  double acc = 0.0;
  for (std::size_t i = 0; i < sys.state_count(); ++i) {
    const std::size_t qi = i;
    const std::size_t pi = sys.state_count() + i;
    acc += fd_partial(f, layout, x, qi) * fd_partial(g, layout, x, pi) -
           fd_partial(f, layout, x, pi) * fd_partial(g, layout, x, qi);
  }
  return acc;
}

inline std::vector<double> box_point(std::uint64_t seed, std::uint64_t k, const std::vector<std::string>& layout,
                                     const presym::Domain& domain = {}) {
  auto rng = presym::make_rng(seed, k);
  return presym::random_point(rng, layout, domain);
}

/// Random expressions that stay finite and inside every function's domain
/// for arguments in [-1, 1].
class ExprGenerator {
 public:
  ExprGenerator(std::vector<std::string> vars, std::uint64_t seed) : vars_(std::move(vars)), rng_(seed) {}

  Expr next(int depth = 4) { return build(depth); }

 private:
  int pick(int n) { return static_cast<int>(rng_() % static_cast<std::uint64_t>(n)); }

  Expr leaf() {
    if (pick(3) == 0) {
      static const double constants[] = {0.5, 2.0, 3.0, -1.5, 0.25, 1.0, 0.0};
      return Expr::constant(constants[pick(7)]);
    }
    return Expr::variable(vars_[static_cast<std::size_t>(pick(static_cast<int>(vars_.size())))]);
  }

  // Bounded in [-B, B] with B modest: wrap arbitrary subtrees in sin/cos
  // before using them where the domain matters.
  Expr bounded(int depth) {
    Expr inner = build(depth);
    return pick(2) == 0 ? Expr::unary(presym::UnaryOp::Sin, inner) : Expr::unary(presym::UnaryOp::Cos, inner);
  }

  Expr build(int depth) {
    if (depth <= 0) return leaf();
    switch (pick(11)) {
      case 0: return build(depth - 1) + build(depth - 1);
      case 1: return build(depth - 1) - build(depth - 1);
      case 2: return build(depth - 1) * build(depth - 1);
      case 3: return build(depth - 1) / (Expr::constant(2.0) + bounded(depth - 1));
      case 4: return Expr::unary(presym::UnaryOp::Sin, build(depth - 1));
      case 5: return Expr::unary(presym::UnaryOp::Cos, build(depth - 1));
      case 6: return Expr::unary(presym::UnaryOp::Exp, bounded(depth - 1));
      case 7: return Expr::unary(presym::UnaryOp::Ln, Expr::constant(2.0) + bounded(depth - 1));
      case 8: return Expr::unary(presym::UnaryOp::Sqrt, Expr::constant(1.5) + bounded(depth - 1));
      case 9: return presym::pow(bounded(depth - 1), pick(2) == 0 ? 2.0 : 3.0);
      default: return -build(depth - 1);
    }
  }

  std::vector<std::string> vars_;
  std::mt19937_64 rng_;
};

inline bool close_rel(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

}  // namespace testsupport

#endif
