#include "presym/momentum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "presym/compiled_expr.hpp"
#include "presym/constraint_algo.hpp"
#include "presym/errors.hpp"

namespace presym {

std::vector<Expr> MomentumMap::expressions() const {
  std::vector<Expr> out;
  for (const auto& c : components) out.push_back(c.expr);
  return out;
}

MomentumMap build_momentum_map(std::span<const SymmetryGenerator> generators, const PontryaginSystem& sys,
                               const Domain& domain, const SymmetryCheckOptions& options) {
  if (generators.empty()) throw PreconditionError("momentum map needs at least one symmetry generator");
  MomentumMap j;
  for (const auto& g : generators) {
    if (!check_symmetry(g, sys, domain, options).symmetry)
      throw PreconditionError("generator '" + g.name + "' is not a symmetry of the problem");
    j.components.push_back(noether_momentum(g, sys));
    j.lifts.push_back(lift(g, sys));
  }
  return j;
}

std::vector<double> evaluate(const MomentumMap& j, const PontryaginSystem& sys, std::span<const double> x) {
  const auto layout = sys.layout();
  std::vector<double> out;
  for (const auto& c : j.components) out.push_back(CompiledExpr(c.expr, layout)(x));
  return out;
}

std::vector<double> auto_mu(const MomentumMap& j, const PontryaginSystem& sys, std::span<const Expr> constraints,
                            const Domain& domain, std::uint64_t seed) {
  std::vector<Expr> eqs = sys.problem.holonomic;
  eqs.insert(eqs.end(), constraints.begin(), constraints.end());
  SamplingOptions opts;
  opts.count = 1;
  opts.seed = seed;
  ConstraintProjector proj(eqs, sys.layout());
  auto set = sample_feasible(proj, domain, opts);
  return evaluate(j, sys, set.points.front());
}

SampleSet sample_level_set(const MomentumMap& j, const PontryaginSystem& sys, std::span<const double> mu,
                           std::span<const Expr> constraints, const Domain& domain,
                           const SamplingOptions& options) {
  if (options.count < 1) throw std::invalid_argument("count must be >= 1");
  if (mu.size() != j.size())
    throw InputError("mu has " + std::to_string(mu.size()) + " entries, the momentum map has " +
                     std::to_string(j.size()));
  std::vector<Expr> eqs;
  for (std::size_t k = 0; k < j.size(); ++k)
    eqs.push_back(simplify(j.components[k].expr - Expr::constant(mu[k])));
  eqs.insert(eqs.end(), sys.problem.holonomic.begin(), sys.problem.holonomic.end());
  eqs.insert(eqs.end(), constraints.begin(), constraints.end());
  ConstraintProjector proj(eqs, sys.layout());
  return sample_feasible(proj, domain, options);
}

namespace {

Eigen::MatrixXd omega_matrix(std::size_t states, std::size_t controls) {
  const auto n = static_cast<Eigen::Index>(2 * states + controls);
  const auto m = static_cast<Eigen::Index>(states);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < m; ++i) {
    w(i, m + i) = 1.0;
    w(m + i, i) = -1.0;
  }
  return w;
}

bool same(const PointDims& a, const PointDims& b) {
  return a.jacobian_rank == b.jacobian_rank && a.momentum_rank == b.momentum_rank &&
         a.levelset_dim == b.levelset_dim && a.omega_kernel_dim == b.omega_kernel_dim &&
         a.orbit_tangent_dim == b.orbit_tangent_dim && a.generator_rank == b.generator_rank &&
         a.base_orbit_rank == b.base_orbit_rank && a.reduced_dim == b.reduced_dim;
}

}  // namespace

LevelSetReport rank_analysis(const MomentumMap& j, const PontryaginSystem& sys,
                             std::span<const std::vector<double>> points, std::span<const Expr> constraints,
                             std::span<const double> mu) {
  if (points.empty()) throw PreconditionError("rank_analysis needs at least one point");
  const auto layout = sys.layout();
  std::vector<Expr> momenta = j.expressions();
  std::vector<Expr> eqs = momenta;
  eqs.insert(eqs.end(), sys.problem.holonomic.begin(), sys.problem.holonomic.end());
  eqs.insert(eqs.end(), constraints.begin(), constraints.end());
  ConstraintProjector full(eqs, layout);
  ConstraintProjector mom(momenta, layout);

  std::vector<std::vector<CompiledExpr>> lifted;
  for (const auto& g : j.lifts) lifted.push_back(compile_all(g.components(), layout));
  CompiledExpr h(sys.hamiltonian, layout);

  LevelSetReport rep;
  rep.mu.assign(mu.begin(), mu.end());
  rep.points.assign(points.begin(), points.end());
  rep.ambient_dim = static_cast<int>(sys.dimension());
  rep.constraint_count = static_cast<int>(eqs.size());
  const Eigen::MatrixXd omega = omega_matrix(sys.state_count(), sys.control_count());
  const auto n = static_cast<Eigen::Index>(sys.dimension());
  const auto m = static_cast<Eigen::Index>(sys.state_count());

  rep.h_min = rep.h_max = h(points.front());
  for (const auto& x : points) {
    PointDims d;
    Eigen::MatrixXd jac = full.jacobian(x);
    d.jacobian_rank = numerical_rank(jac);
    d.momentum_rank = numerical_rank(mom.jacobian(x));
    d.levelset_dim = rep.ambient_dim - d.jacobian_rank;

    Eigen::MatrixXd tangent = null_space(jac);
    Eigen::MatrixXd pulled = tangent.transpose() * omega * tangent;
    d.omega_norm = pulled.size() == 0 ? 0.0 : pulled.norm();
    d.omega_kernel_dim = static_cast<int>(tangent.cols()) - (pulled.size() == 0 ? 0 : numerical_rank(pulled));

    Eigen::MatrixXd v(n, static_cast<Eigen::Index>(lifted.size()));
    for (std::size_t k = 0; k < lifted.size(); ++k)
      for (Eigen::Index r = 0; r < n; ++r) v(r, static_cast<Eigen::Index>(k)) = lifted[k][static_cast<std::size_t>(r)](x);
    d.generator_rank = numerical_rank(v);
    d.base_orbit_rank = numerical_rank(v.topRows(m));
    Eigen::MatrixXd joined(n, v.cols() + tangent.cols());
    joined << v, tangent;
    d.orbit_tangent_dim = d.generator_rank + static_cast<int>(tangent.cols()) - numerical_rank(joined);
    d.reduced_dim = d.levelset_dim - d.orbit_tangent_dim;
    rep.per_point.push_back(d);

    double hv = h(x);
    rep.h_min = std::min(rep.h_min, hv);
    rep.h_max = std::max(rep.h_max, hv);
    rep.omega_norm_max = std::max(rep.omega_norm_max, d.omega_norm);
  }
  rep.dims = rep.per_point.front();
  for (const auto& d : rep.per_point) rep.constant_rank = rep.constant_rank && same(d, rep.dims);
  bool jac_constant = std::all_of(rep.per_point.begin(), rep.per_point.end(),
                                  [&](const PointDims& d) { return d.jacobian_rank == rep.dims.jacobian_rank; });
  rep.weakly_regular_evidence = jac_constant;
  return rep;
}

std::vector<double> tangency_check(const MomentumMap& j, const PontryaginSystem& sys,
                                   std::span<const std::vector<double>> points) {
  const auto layout = sys.layout();
  PoissonContext ctx = PoissonContext::of(sys);
  std::vector<double> out;
  for (const auto& c : j.components) {
    CompiledExpr b(poisson_bracket(c.expr, sys.hamiltonian, ctx), layout);
    double worst = 0.0;
    for (const auto& x : points) worst = std::max(worst, std::abs(b(x)));
    out.push_back(worst);
  }
  return out;
}

}  // namespace presym
