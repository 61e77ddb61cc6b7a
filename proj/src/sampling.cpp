#include "presym/sampling.hpp"

#include <cmath>

#include "presym/errors.hpp"

namespace presym {

ConstraintProjector::ConstraintProjector(std::vector<Expr> constraints, std::vector<std::string> layout)
    : constraints_(std::move(constraints)), layout_(std::move(layout)) {
  values_ = compile_all(constraints_, layout_);
  gradients_.resize(constraints_.size());
  for (std::size_t k = 0; k < constraints_.size(); ++k) {
    auto vars = free_variables(constraints_[k]);
    for (std::size_t j = 0; j < layout_.size(); ++j) {
      if (!vars.contains(layout_[j])) continue;
      Expr d = diff(constraints_[k], layout_[j]);
      if (d.is_constant(0.0)) continue;
      gradients_[k].push_back({j, CompiledExpr(d, layout_)});
    }
  }
}

Eigen::VectorXd ConstraintProjector::residual(std::span<const double> x) const {
  Eigen::VectorXd r(static_cast<Eigen::Index>(values_.size()));
  for (std::size_t k = 0; k < values_.size(); ++k) r(static_cast<Eigen::Index>(k)) = values_[k](x);
  return r;
}

Eigen::MatrixXd ConstraintProjector::jacobian(std::span<const double> x) const {
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(values_.size()),
                                              static_cast<Eigen::Index>(layout_.size()));
  for (std::size_t k = 0; k < gradients_.size(); ++k)
    for (const auto& g : gradients_[k])
      jac(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(g.column)) = g.partial(x);
  return jac;
}

ConstraintProjector::Result ConstraintProjector::project(std::vector<double> x, double tol,
                                                         int max_iterations) const {
  Result out;
  out.x = std::move(x);
  if (values_.empty()) {
    out.converged = true;
    return out;
  }
  for (int it = 0; it <= max_iterations; ++it) {
    Eigen::VectorXd r;
    try {
      r = residual(out.x);
    } catch (const EvalError&) {
      return out;
    }
    out.residual = r.cwiseAbs().maxCoeff();
    out.iterations = it;
    if (!std::isfinite(out.residual)) return out;
    if (out.residual <= tol) {
      out.converged = true;
      return out;
    }
    if (it == max_iterations) break;
    Eigen::VectorXd step = min_norm_solve(jacobian(out.x), r);
    for (std::size_t j = 0; j < out.x.size(); ++j) out.x[j] -= step(static_cast<Eigen::Index>(j));
  }
  return out;
}

SampleSet sample_feasible(const ConstraintProjector& projector, const Domain& domain,
                          const SamplingOptions& options) {
  SampleSet set;
  const std::size_t budget = options.count * options.attempts_per_point;
  const auto& layout = projector.layout();
  while (set.points.size() < options.count && set.attempts < budget) {
    auto rng = make_rng(options.seed, set.attempts);
    ++set.attempts;
    auto res = projector.project(random_point(rng, layout, domain), options.tol);
    if (!res.converged) {
      ++set.diverged;
      continue;
    }
    bool inside = true;
    for (std::size_t j = 0; j < layout.size() && inside; ++j) {
      Interval box = domain.at(layout[j]);
      inside = box.contains(res.x[j], 1e-12 * (1.0 + box.hi - box.lo));
    }
    if (!inside) {
      ++set.outside_box;
      continue;
    }
    set.points.push_back(std::move(res.x));
  }
  if (set.points.size() < options.count) {
    throw SamplingError("feasible-set sampling failed: found " + std::to_string(set.points.size()) +
                            " of " + std::to_string(options.count) + " points in " +
                            std::to_string(set.attempts) + " attempts (" +
                            std::to_string(set.diverged) + " diverged, " +
                            std::to_string(set.outside_box) + " outside the domain box)",
                        options.count, set.points.size(), set.attempts);
  }
  return set;
}

}  // namespace presym
