#ifndef PRESYM_CONSTRAINT_ALGO_HPP
#define PRESYM_CONSTRAINT_ALGO_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "presym/expr.hpp"
#include "presym/numeric.hpp"
#include "presym/problem.hpp"

namespace presym {

/// Canonical pairs (q^i, p_i); control coordinates span the kernel of omega.
struct PoissonContext {
  std::vector<std::string> positions;
  std::vector<std::string> momenta;
  std::vector<std::string> kernel;

  static PoissonContext of(const PontryaginSystem& sys);
};

/// {f, g} = sum_i df/dq^i dg/dp_i - df/dp_i dg/dq^i, simplified.
Expr poisson_bracket(const Expr& f, const Expr& g, const PoissonContext& ctx);

struct LadderOptions {
  std::size_t samples = 32;  // feasible points per tangency step
  std::uint64_t seed = 0;
  double zero_tol = 1e-9;    // "vanishes on the current set"
  int max_levels = 8;
};

/// Sampled rank statistics of a tangency matrix A_ab = dc_a/du^b.
struct MultiplierInfo {
  int controls = 0;
  int constraints = 0;
  std::vector<int> ranks;  // per sample

  int min_rank() const;
  int max_rank() const;
  bool constant_rank() const { return min_rank() == max_rank(); }
  /// The multipliers lambda^b are fixed by the tangency system at every sample.
  bool determined() const { return controls == 0 || min_rank() == controls; }
  /// Directions left free by the tangency system (worst case over samples).
  int gauge_dimension() const { return controls - min_rank(); }
};

struct TangencyResult {
  std::vector<Expr> new_constraints;
  /// Candidates formed from the cokernel that vanished on the sample set.
  std::vector<Expr> discarded;
  /// Rank data of A for the newest level.
  MultiplierInfo newest;
  /// Rank data of the tangency system stacked over every level.
  MultiplierInfo stacked;
  std::size_t sample_count = 0;
  std::size_t sampling_attempts = 0;
};

/// Nested constraint levels M1 ⊃ M2 ⊃ ... Level 1 holds the primary
/// constraints chi_a (identically vanishing entries dropped).
struct ConstraintLadder {
  std::vector<std::vector<Expr>> levels;
  /// step_info[k] describes the tangency step taken from level k + 1.
  std::vector<TangencyResult> step_info;
  bool stabilized = false;
  /// Multiplier data of the full tangency system on the final level; set
  /// once the ladder has stabilized.
  MultiplierInfo multipliers;

  int final_level_index() const { return static_cast<int>(levels.size()); }
  std::vector<Expr> all_constraints() const;
};

/// One step of the constraint algorithm. On the current feasible set,
/// a solution field is the Hamiltonian part plus sum_b lambda^b d/du^b, so
/// tangency of the newest constraints c_a reads A lambda = -v with
/// A_ab = dc_a/du^b and v_a = {c_a, H}. Combinations of v along the
/// cokernel of A are the candidate new constraints; those vanishing on the
/// sampled set are discarded.
///
/// Throws ConstantRankError when v does not vanish and the cokernel of A
/// changes across samples, SamplingError when the feasible set cannot be
/// sampled.
TangencyResult tangency_step(const PontryaginSystem& sys, const ConstraintLadder& ladder,
                             const Domain& domain, const LadderOptions& options);

/// Iterate tangency steps until nothing new is admitted or `max_levels`
/// levels exist.
ConstraintLadder run_ladder(const PontryaginSystem& sys, const Domain& domain,
                            const LadderOptions& options);

/// Continue the recursion from an existing ladder.
ConstraintLadder run_ladder(const PontryaginSystem& sys, ConstraintLadder start, const Domain& domain,
                            const LadderOptions& options);

struct FeedbackResult {
  std::vector<double> u;
  int iterations = 0;
  double residual = 0.0;
};

/// Newton iteration on chi(q, p, .) = 0 starting at u0, at most 50 steps.
/// Throws SolverError on a numerically singular W or non-convergence.
FeedbackResult solve_feedback(const PontryaginSystem& sys, std::span<const double> q,
                              std::span<const double> p, std::vector<double> u0, double tol = 1e-12);

}  // namespace presym

#endif
