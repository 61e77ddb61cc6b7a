#include "presym/symmetry.hpp"

#include <stdexcept>

namespace presym {

namespace {

void check_shape(const SymmetryGenerator& z, const PontryaginSystem& sys) {
  if (z.xi.size() != sys.state_count() || z.zeta.size() != sys.control_count())
    throw std::invalid_argument("generator '" + z.name + "' does not match the problem dimensions");
}

Expr sum(const std::vector<Expr>& terms) {
  Expr acc = Expr::constant(0.0);
  for (const auto& t : terms) acc = acc + t;
  return simplify(acc);
}

}  // namespace

std::vector<Expr> LiftedGenerator::components() const {
  std::vector<Expr> out = q;
  out.insert(out.end(), p.begin(), p.end());
  out.insert(out.end(), u.begin(), u.end());
  return out;
}

std::vector<Expr> lie_derivative_along_projection(const SymmetryGenerator& z, const PontryaginSystem& sys) {
  check_shape(z, sys);
  const auto& states = sys.problem.states;
  const auto& controls = sys.problem.controls;
  const auto& f = sys.problem.dynamics;
  std::vector<Expr> out;
  for (std::size_t i = 0; i < states.size(); ++i) {
    std::vector<Expr> terms;
    for (std::size_t j = 0; j < states.size(); ++j) {
      terms.push_back(z.xi[j] * diff(f[i], states[j]));
      terms.push_back(-(f[j] * diff(z.xi[i], states[j])));
    }
    for (std::size_t a = 0; a < controls.size(); ++a) terms.push_back(z.zeta[a] * diff(f[i], controls[a]));
    out.push_back(sum(terms));
  }
  return out;
}

Expr lagrangian_variation(const SymmetryGenerator& z, const PontryaginSystem& sys) {
  check_shape(z, sys);
  std::vector<Expr> terms;
  const auto& l = sys.problem.lagrangian;
  for (std::size_t i = 0; i < sys.state_count(); ++i) terms.push_back(z.xi[i] * diff(l, sys.problem.states[i]));
  for (std::size_t a = 0; a < sys.control_count(); ++a)
    terms.push_back(z.zeta[a] * diff(l, sys.problem.controls[a]));
  return sum(terms);
}

SymmetryReport check_symmetry(const SymmetryGenerator& z, const PontryaginSystem& sys, const Domain& domain,
                              const SymmetryCheckOptions& options) {
  SymmetryReport rep;
  rep.name = z.name;
  rep.lie_residuals = lie_derivative_along_projection(z, sys);
  rep.lagrangian_residual = lagrangian_variation(z, sys);

  rep.symbolic = rep.lagrangian_residual.is_constant(0.0);
  for (const auto& r : rep.lie_residuals) rep.symbolic = rep.symbolic && r.is_constant(0.0);

  std::vector<std::string> vars = sys.problem.states;
  vars.insert(vars.end(), sys.problem.controls.begin(), sys.problem.controls.end());
  bool zero = true;
  for (const auto& r : rep.lie_residuals) {
    ZeroTest t = zero_on_box(r, vars, options.trials, options.tol, domain, options.seed);
    rep.lie_residual_norms.push_back(t.worst_value);
    zero = zero && t.zero;
  }
  ZeroTest t = zero_on_box(rep.lagrangian_residual, vars, options.trials, options.tol, domain, options.seed);
  rep.lagrangian_residual_norm = t.worst_value;
  rep.symmetry = rep.symbolic || (zero && t.zero);
  return rep;
}

LiftedGenerator lift(const SymmetryGenerator& z, const PontryaginSystem& sys) {
  check_shape(z, sys);
  LiftedGenerator g;
  g.base = z;
  g.q = z.xi;
  g.u = z.zeta;
  const auto& states = sys.problem.states;
  for (std::size_t i = 0; i < states.size(); ++i) {
    std::vector<Expr> terms;
    for (std::size_t j = 0; j < states.size(); ++j) {
      Expr d = diff(z.xi[j], states[i]);
      if (!d.is_constant(0.0)) terms.push_back(Expr::variable(sys.costates[j]) * d);
    }
    g.p.push_back(simplify(-sum(terms)));
  }
  return g;
}

MomentumFunction noether_momentum(const SymmetryGenerator& z, const PontryaginSystem& sys) {
  check_shape(z, sys);
  std::vector<Expr> terms;
  for (std::size_t i = 0; i < sys.state_count(); ++i)
    if (!z.xi[i].is_constant(0.0)) terms.push_back(Expr::variable(sys.costates[i]) * z.xi[i]);
  return {z.name, sum(terms)};
}

Expr lifted_hamiltonian_residual(const SymmetryGenerator& z, const PontryaginSystem& sys) {
  LiftedGenerator g = lift(z, sys);
  const auto& h = sys.hamiltonian;
  std::vector<Expr> terms;
  for (std::size_t i = 0; i < sys.state_count(); ++i) {
    terms.push_back(g.q[i] * diff(h, sys.problem.states[i]));
    terms.push_back(g.p[i] * diff(h, sys.costates[i]));
  }
  for (std::size_t a = 0; a < sys.control_count(); ++a) terms.push_back(g.u[a] * diff(h, sys.problem.controls[a]));
  return sum(terms);
}

}  // namespace presym
