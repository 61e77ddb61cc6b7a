#ifndef PRESYM_SYMMETRY_HPP
#define PRESYM_SYMMETRY_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "presym/expr.hpp"
#include "presym/numeric.hpp"
#include "presym/problem.hpp"

namespace presym {

/// Cotangent lift of a projectable generator, split in (q, p, u) blocks.
struct LiftedGenerator {
  SymmetryGenerator base;
  std::vector<Expr> q;  // xi^i
  std::vector<Expr> p;  // -sum_j p_j dxi^j/dq^i
  std::vector<Expr> u;  // zeta^a

  std::vector<Expr> components() const;  // q, p, u concatenated
};

struct MomentumFunction {
  std::string generator;
  Expr expr;  // sum_i p_i xi^i
};

/// (L_Z X)^i = xi^j dF^i/dq^j - F^j dxi^i/dq^j + zeta^a dF^i/du^a.
std::vector<Expr> lie_derivative_along_projection(const SymmetryGenerator& z, const PontryaginSystem& sys);

/// Z(L) = xi^i dL/dq^i + zeta^a dL/du^a.
Expr lagrangian_variation(const SymmetryGenerator& z, const PontryaginSystem& sys);

struct SymmetryCheckOptions {
  int trials = 100;
  double tol = 1e-10;
  std::uint64_t seed = 0;
};

struct SymmetryReport {
  std::string name;
  std::vector<Expr> lie_residuals;
  std::vector<double> lie_residual_norms;  // max |value| over the samples
  Expr lagrangian_residual;
  double lagrangian_residual_norm = 0.0;
  bool symbolic = false;  // every residual simplified to 0
  bool symmetry = false;
};

/// Both residuals vanish on `trials` seeded points of the (q, u) box.
SymmetryReport check_symmetry(const SymmetryGenerator& z, const PontryaginSystem& sys, const Domain& domain,
                              const SymmetryCheckOptions& options = {});

LiftedGenerator lift(const SymmetryGenerator& z, const PontryaginSystem& sys);

MomentumFunction noether_momentum(const SymmetryGenerator& z, const PontryaginSystem& sys);

/// Z^c(H) = p . (L_Z X) - Z(L) when expanded.
Expr lifted_hamiltonian_residual(const SymmetryGenerator& z, const PontryaginSystem& sys);

}  // namespace presym

#endif
