#ifndef PRESYM_MOMENTUM_HPP
#define PRESYM_MOMENTUM_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "presym/expr.hpp"
#include "presym/numeric.hpp"
#include "presym/problem.hpp"
#include "presym/sampling.hpp"
#include "presym/symmetry.hpp"

namespace presym {

struct MomentumMap {
  std::vector<MomentumFunction> components;
  std::vector<LiftedGenerator> lifts;

  std::size_t size() const noexcept { return components.size(); }
  std::vector<Expr> expressions() const;
};

/// Refuses generators that fail check_symmetry (PreconditionError), and an
/// empty list.
MomentumMap build_momentum_map(std::span<const SymmetryGenerator> generators, const PontryaginSystem& sys,
                               const Domain& domain, const SymmetryCheckOptions& options = {});

/// J evaluated at a phase point in the system layout.
std::vector<double> evaluate(const MomentumMap& j, const PontryaginSystem& sys, std::span<const double> x);

/// mu = J(x0) for a seeded point x0 of {holonomic = 0, constraints = 0}.
std::vector<double> auto_mu(const MomentumMap& j, const PontryaginSystem& sys, std::span<const Expr> constraints,
                            const Domain& domain, std::uint64_t seed);

/// Points of {J = mu} together with the holonomic constraints and
/// `constraints`. Throws SamplingError (with attempt statistics) when the
/// level set shows no feasible point in the box.
SampleSet sample_level_set(const MomentumMap& j, const PontryaginSystem& sys, std::span<const double> mu,
                           std::span<const Expr> constraints, const Domain& domain,
                           const SamplingOptions& options);

struct PointDims {
  int jacobian_rank = 0;   // momenta + holonomic + extra constraints
  int momentum_rank = 0;   // momenta alone
  int levelset_dim = 0;
  int omega_kernel_dim = 0;
  double omega_norm = 0.0;  // Frobenius norm of the pulled-back form
  int orbit_tangent_dim = 0;  // dim(span of lifted generators ∩ tangent space)
  int generator_rank = 0;
  int base_orbit_rank = 0;  // rank of the generators' state components
  int reduced_dim = 0;
};

struct LevelSetReport {
  std::vector<double> mu;
  std::vector<std::vector<double>> points;
  int ambient_dim = 0;
  int constraint_count = 0;  // rows of the Jacobian
  std::vector<PointDims> per_point;
  PointDims dims;  // values at the first point
  bool constant_rank = true;  // every PointDims entry agrees across points
  bool weakly_regular_evidence = false;
  double omega_norm_max = 0.0;
  double h_min = 0.0;
  double h_max = 0.0;
};

/// Rank and pullback diagnostics at each point. `constraints` are the
/// extra (non-holonomic) equations the points were sampled on.
LevelSetReport rank_analysis(const MomentumMap& j, const PontryaginSystem& sys,
                             std::span<const std::vector<double>> points, std::span<const Expr> constraints,
                             std::span<const double> mu);

/// max |{f_k, H}| over the points for each component.
std::vector<double> tangency_check(const MomentumMap& j, const PontryaginSystem& sys,
                                   std::span<const std::vector<double>> points);

}  // namespace presym

#endif
