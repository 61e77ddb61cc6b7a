#ifndef PRESYM_SAMPLING_HPP
#define PRESYM_SAMPLING_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "presym/compiled_expr.hpp"
#include "presym/expr.hpp"
#include "presym/numeric.hpp"

namespace presym {

/// A set {c_k(x) = 0} over a coordinate layout, with symbolic gradients,
/// and Gauss-Newton projection onto it. Rank-deficient (redundant)
/// constraint lists are handled through minimum-norm steps.
class ConstraintProjector {
 public:
  ConstraintProjector(std::vector<Expr> constraints, std::vector<std::string> layout);

  struct Result {
    bool converged = false;
    int iterations = 0;
    double residual = 0.0;  // max |c_k| at the returned point
    std::vector<double> x;
  };

  Eigen::VectorXd residual(std::span<const double> x) const;
  Eigen::MatrixXd jacobian(std::span<const double> x) const;
  Result project(std::vector<double> x, double tol = 1e-12, int max_iterations = 50) const;

  std::size_t size() const noexcept { return values_.size(); }
  const std::vector<std::string>& layout() const noexcept { return layout_; }
  const std::vector<Expr>& constraints() const noexcept { return constraints_; }

 private:
  struct GradientEntry {
    std::size_t column;
    CompiledExpr partial;
  };
  std::vector<Expr> constraints_;
  std::vector<std::string> layout_;
  std::vector<CompiledExpr> values_;
  std::vector<std::vector<GradientEntry>> gradients_;
};

struct SampleSet {
  std::vector<std::vector<double>> points;
  std::size_t attempts = 0;
  std::size_t diverged = 0;     // Newton did not converge
  std::size_t outside_box = 0;  // converged outside the domain box
};

struct SamplingOptions {
  std::size_t count = 32;
  std::size_t attempts_per_point = 200;
  double tol = 1e-12;
  std::uint64_t seed = 0;
};

/// Draw box points and Newton-project them onto the constraint set; keep
/// converged points that lie in the box. Throws SamplingError when fewer
/// than `count` points are found within count * attempts_per_point starts.
SampleSet sample_feasible(const ConstraintProjector& projector, const Domain& domain,
                          const SamplingOptions& options);

}  // namespace presym

#endif
