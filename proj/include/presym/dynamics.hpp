#ifndef PRESYM_DYNAMICS_HPP
#define PRESYM_DYNAMICS_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "presym/compiled_expr.hpp"
#include "presym/constraint_algo.hpp"
#include "presym/momentum.hpp"
#include "presym/problem.hpp"
#include "presym/sampling.hpp"

namespace presym {

enum class Gauge { Error, Zero };

/// (q, p, u) -> (dH/dp, -dH/dq, lambda) where lambda = -A^+ v solves the
/// stacked tangency system of every ladder constraint.
class HamiltonianField {
 public:
  /// Throws PreconditionError if the ladder has not stabilized, or if the
  /// multipliers are not determined and `gauge` is Error.
  HamiltonianField(const PontryaginSystem& sys, const ConstraintLadder& ladder, Gauge gauge = Gauge::Error);

  std::vector<double> operator()(std::span<const double> x) const;
  std::size_t dimension() const noexcept { return dim_; }

 private:
  std::size_t states_ = 0;
  std::size_t controls_ = 0;
  std::size_t dim_ = 0;
  std::vector<CompiledExpr> dh_dp_;
  std::vector<CompiledExpr> dh_dq_;
  std::vector<std::vector<CompiledExpr>> a_;
  std::vector<CompiledExpr> v_;
};

struct IntegratorConfig {
  double t0 = 0.0;
  double t1 = 1.0;
  double step = 1e-3;
  /// Unset: on when the ladder has more than one level or the multipliers
  /// are not determined, off otherwise.
  std::optional<bool> retraction;
  Gauge gauge = Gauge::Error;
  double start_tol = 1e-8;
  double retraction_tol = 1e-12;
  double divergence_limit = 1e12;
  int record_every = 1;
};

struct Trajectory {
  std::vector<std::string> coordinates;  // q, p, u names
  std::vector<std::string> monitor_names;
  std::vector<double> times;
  std::vector<std::vector<double>> points;
  std::vector<std::vector<double>> monitors;  // aligned with points
  bool diverged = false;
  bool retraction = false;
  std::string message;
};

/// Fixed-step RK4 from x0. Monitors: H, f_<name> for each momentum, chi_k,
/// hol_k, and c<level>_k for ladder levels beyond the first.
/// Throws PreconditionError if x0 violates the active constraints by more
/// than cfg.start_tol. Divergence stops the run and is flagged.
Trajectory integrate(const PontryaginSystem& sys, const ConstraintLadder& ladder, const MomentumMap* j,
                     std::span<const double> x0, const IntegratorConfig& cfg);

struct MonitorDrift {
  std::string name;
  double drift = 0.0;  // max |value(t) - value(t0)|
  double max_abs = 0.0;
};

struct ConservationReport {
  std::vector<MonitorDrift> monitors;
  double max_constraint_residual = 0.0;  // chi, hol and ladder monitors
  double drift(const std::string& name) const;
};

ConservationReport conservation_report(const Trajectory& traj);

/// Seeded point on {holonomic = 0} and every ladder level.
std::vector<double> feasible_start(const PontryaginSystem& sys, const ConstraintLadder& ladder, const Domain& domain,
                                   std::uint64_t seed);

}  // namespace presym

#endif
