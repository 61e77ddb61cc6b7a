#ifndef PRESYM_PROBLEM_HPP
#define PRESYM_PROBLEM_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "presym/expr.hpp"
#include "presym/numeric.hpp"

namespace presym {

/// Infinitesimal generator on the control bundle,
///   xi^i(q) d/dq^i + zeta^a(q, u) d/du^a.
/// `xi` depending on states only is what makes the field projectable.
struct SymmetryGenerator {
  std::string name;
  std::vector<Expr> xi;
  std::vector<Expr> zeta;
};

/// Optimal control problem in coordinates: q' = F(q, u), cost density L(q, u).
///
/// Holonomic constraints are carried as monitors and retraction targets only;
/// they never enter the Hamiltonian. They may mention controls as well as
/// states so that control sets such as a unit sphere can be expressed.
struct ControlProblem {
  std::vector<std::string> states;
  std::vector<std::string> controls;
  std::vector<Expr> dynamics;
  Expr lagrangian;
  std::vector<Expr> holonomic;
  bool time_dependent = false;
  std::vector<SymmetryGenerator> symmetries;
  Domain domain;
};

/// Name of the costate conjugate to state `i` (0-based): p1, p2, ...
std::string costate_name(std::size_t i);

/// True for names the problem may not use for its own variables.
bool is_reserved_name(const std::string& name);

/// Invariant violations of `problem`; empty means valid.
std::vector<std::string> validate(const ControlProblem& problem);

/// Append the time `t` as an extra state with unit velocity.
/// Throws PreconditionError for an autonomous problem.
ControlProblem autonomize(const ControlProblem& problem);

/// Phase coordinates ordered (q, p, u). The ordering fixes the coordinate
/// forms theta = p_i dq^i and omega = dq^i ^ dp_i, whose kernel is spanned
/// by the control directions.
struct PhasePoint {
  std::vector<double> q;
  std::vector<double> p;
  std::vector<double> u;

  std::vector<double> flat() const;
  static PhasePoint from_flat(std::span<const double> x, std::size_t states, std::size_t controls);
};

/// The Pontryagin data H = p_i F^i - L (normal case p0 = 1),
/// chi_a = dH/du^a and W_ab = dchi_a/du^b.
struct PontryaginSystem {
  ControlProblem problem;  // autonomous
  std::vector<std::string> costates;
  Expr hamiltonian;
  std::vector<Expr> chi;
  std::vector<std::vector<Expr>> W;

  std::size_t state_count() const noexcept { return problem.states.size(); }
  std::size_t control_count() const noexcept { return problem.controls.size(); }
  std::size_t dimension() const noexcept { return 2 * state_count() + control_count(); }
  /// All coordinate names in (q, p, u) order.
  std::vector<std::string> layout() const;
};

/// Throws InputError listing the violations if `problem` is invalid.
PontryaginSystem build_pontryagin(const ControlProblem& problem);

enum class Regularity { Regular, SingularConstantRank, Mixed };

struct RegularityReport {
  Regularity kind = Regularity::Regular;
  int rank = 0;            // the common rank, or the smallest seen when mixed
  int controls = 0;
  std::vector<int> ranks;  // per sample
  bool on_constraint_set = false;  // samples satisfy chi = 0
  std::string label() const;
};

/// Numerical rank of W at seeded samples on {chi = 0} when Newton can reach
/// it, otherwise on the domain box.
RegularityReport classify_regularity(const PontryaginSystem& sys, const Domain& domain, int trials,
                                     std::uint64_t seed = 0);

}  // namespace presym

#endif
