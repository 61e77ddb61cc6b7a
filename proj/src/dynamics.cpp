#include "presym/dynamics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

#include "presym/errors.hpp"

namespace presym {

HamiltonianField::HamiltonianField(const PontryaginSystem& sys, const ConstraintLadder& ladder, Gauge gauge)
    : states_(sys.state_count()), controls_(sys.control_count()), dim_(sys.dimension()) {
  if (!ladder.stabilized) throw PreconditionError("the constraint ladder did not stabilize; no solution field");
  if (gauge == Gauge::Error && !ladder.multipliers.determined())
    throw PreconditionError("multipliers are undetermined (gauge dimension " +
                            std::to_string(ladder.multipliers.gauge_dimension()) +
                            "); choose the zero gauge explicitly");
  const auto layout = sys.layout();
  for (std::size_t i = 0; i < states_; ++i) {
    dh_dp_.emplace_back(diff(sys.hamiltonian, sys.costates[i]), layout);
    dh_dq_.emplace_back(diff(sys.hamiltonian, sys.problem.states[i]), layout);
  }
  PoissonContext ctx = PoissonContext::of(sys);
  for (const auto& c : ladder.all_constraints()) {
    std::vector<CompiledExpr> row;
    for (const auto& u : sys.problem.controls) row.emplace_back(diff(c, u), layout);
    a_.push_back(std::move(row));
    v_.emplace_back(poisson_bracket(c, sys.hamiltonian, ctx), layout);
  }
}

std::vector<double> HamiltonianField::operator()(std::span<const double> x) const {
  std::vector<double> out(dim_, 0.0);
  for (std::size_t i = 0; i < states_; ++i) {
    out[i] = dh_dp_[i](x);
    out[states_ + i] = -dh_dq_[i](x);
  }
  if (controls_ == 0 || a_.empty()) return out;
  const auto rows = static_cast<Eigen::Index>(a_.size());
  const auto cols = static_cast<Eigen::Index>(controls_);
  Eigen::MatrixXd a(rows, cols);
  Eigen::VectorXd rhs(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto ru = static_cast<std::size_t>(r);
    for (Eigen::Index c = 0; c < cols; ++c) a(r, c) = a_[ru][static_cast<std::size_t>(c)](x);
    rhs(r) = -v_[ru](x);
  }
  Eigen::VectorXd lambda = min_norm_solve(a, rhs);
  for (std::size_t b = 0; b < controls_; ++b) out[2 * states_ + b] = lambda(static_cast<Eigen::Index>(b));
  return out;
}

namespace {

std::vector<Expr> active_constraints(const PontryaginSystem& sys, const ConstraintLadder& ladder) {
  std::vector<Expr> eqs = sys.problem.holonomic;
  auto all = ladder.all_constraints();
  eqs.insert(eqs.end(), all.begin(), all.end());
  return eqs;
}

bool is_constraint_monitor(const std::string& name) {
  if (name.starts_with("chi_") || name.starts_with("hol_")) return true;
  return name.size() > 1 && name[0] == 'c' && std::isdigit(static_cast<unsigned char>(name[1]));
}

}  // namespace

Trajectory integrate(const PontryaginSystem& sys, const ConstraintLadder& ladder, const MomentumMap* j,
                     std::span<const double> x0, const IntegratorConfig& cfg) {
  if (!(cfg.step > 0.0)) throw std::invalid_argument("step must be > 0");
  if (!(cfg.t1 > cfg.t0)) throw std::invalid_argument("t1 must exceed t0");
  if (cfg.record_every < 1) throw std::invalid_argument("record_every must be >= 1");
  if (x0.size() != sys.dimension()) throw std::invalid_argument("start point has the wrong dimension");

  HamiltonianField field(sys, ladder, cfg.gauge);
  const auto layout = sys.layout();
  ConstraintProjector projector(active_constraints(sys, ladder), layout);
  if (projector.size() > 0) {
    double r = projector.residual(x0).cwiseAbs().maxCoeff();
    if (!(r <= cfg.start_tol))
      throw PreconditionError("start point violates the active constraints by " + std::to_string(r) +
                              "; project it onto the constraint set first");
  }

  Trajectory traj;
  traj.coordinates = layout;
  traj.retraction = cfg.retraction.value_or(ladder.levels.size() > 1 || !ladder.multipliers.determined());

  std::vector<CompiledExpr> monitors;
  monitors.emplace_back(sys.hamiltonian, layout);
  traj.monitor_names.push_back("H");
  if (j != nullptr) {
    for (const auto& c : j->components) {
      monitors.emplace_back(c.expr, layout);
      traj.monitor_names.push_back("f_" + c.generator);
    }
  }
  for (std::size_t k = 0; k < sys.chi.size(); ++k) {
    monitors.emplace_back(sys.chi[k], layout);
    traj.monitor_names.push_back("chi_" + std::to_string(k + 1));
  }
  for (std::size_t k = 0; k < sys.problem.holonomic.size(); ++k) {
    monitors.emplace_back(sys.problem.holonomic[k], layout);
    traj.monitor_names.push_back("hol_" + std::to_string(k + 1));
  }
  for (std::size_t level = 1; level < ladder.levels.size(); ++level) {
    for (std::size_t k = 0; k < ladder.levels[level].size(); ++k) {
      monitors.emplace_back(ladder.levels[level][k], layout);
      traj.monitor_names.push_back("c" + std::to_string(level + 1) + "_" + std::to_string(k + 1));
    }
  }

  auto record = [&](double t, const std::vector<double>& x) {
    traj.times.push_back(t);
    traj.points.push_back(x);
    std::vector<double> values;
    values.reserve(monitors.size());
    for (const auto& m : monitors) values.push_back(m(x));
    traj.monitors.push_back(std::move(values));
  };

  const auto steps = static_cast<long long>(std::llround((cfg.t1 - cfg.t0) / cfg.step));
  if (steps < 1) throw std::invalid_argument("time span is shorter than one step");
  const double h = (cfg.t1 - cfg.t0) / static_cast<double>(steps);
  const std::size_t n = x0.size();

  std::vector<double> x(x0.begin(), x0.end());
  std::vector<double> tmp(n);
  record(cfg.t0, x);
  for (long long s = 1; s <= steps; ++s) {
    const double t = cfg.t0 + static_cast<double>(s) * h;
    try {
      auto k1 = field(x);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
      auto k2 = field(tmp);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
      auto k3 = field(tmp);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
      auto k4 = field(tmp);
      for (std::size_t i = 0; i < n; ++i) x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    } catch (const EvalError& e) {
      traj.diverged = true;
      traj.message = "evaluation failed at t = " + std::to_string(t) + ": " + e.what();
      break;
    }
    if (traj.retraction && projector.size() > 0) {
      auto res = projector.project(x, cfg.retraction_tol);
      if (!res.converged && traj.message.empty())
        traj.message = "retraction did not converge at t = " + std::to_string(t);
      x = std::move(res.x);
    }
    bool blown = std::any_of(x.begin(), x.end(),
                             [&](double v) { return !std::isfinite(v) || std::abs(v) > cfg.divergence_limit; });
    if (blown) {
      traj.diverged = true;
      traj.message = "state exceeded " + std::to_string(cfg.divergence_limit) + " at t = " + std::to_string(t);
      break;
    }
    if (s % cfg.record_every == 0 || s == steps) record(t, x);
  }
  return traj;
}

double ConservationReport::drift(const std::string& name) const {
  for (const auto& m : monitors)
    if (m.name == name) return m.drift;
  throw std::out_of_range("no monitor named '" + name + "'");
}

ConservationReport conservation_report(const Trajectory& traj) {
  if (traj.monitors.empty()) throw PreconditionError("conservation_report: empty trajectory");
  ConservationReport rep;
  const auto& first = traj.monitors.front();
  for (std::size_t k = 0; k < traj.monitor_names.size(); ++k) {
    MonitorDrift d{traj.monitor_names[k], 0.0, 0.0};
    for (const auto& row : traj.monitors) {
      d.drift = std::max(d.drift, std::abs(row[k] - first[k]));
      d.max_abs = std::max(d.max_abs, std::abs(row[k]));
    }
    if (is_constraint_monitor(d.name)) rep.max_constraint_residual = std::max(rep.max_constraint_residual, d.max_abs);
    rep.monitors.push_back(std::move(d));
  }
  return rep;
}

std::vector<double> feasible_start(const PontryaginSystem& sys, const ConstraintLadder& ladder, const Domain& domain,
                                   std::uint64_t seed) {
  ConstraintProjector projector(active_constraints(sys, ladder), sys.layout());
  SamplingOptions opts;
  opts.count = 1;
  opts.seed = seed;
  return sample_feasible(projector, domain, opts).points.front();
}

}  // namespace presym
