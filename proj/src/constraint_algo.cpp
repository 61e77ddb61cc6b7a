#include "presym/constraint_algo.hpp"

#include <algorithm>
#include <cmath>

#include "presym/compiled_expr.hpp"
#include "presym/errors.hpp"
#include "presym/sampling.hpp"

namespace presym {

PoissonContext PoissonContext::of(const PontryaginSystem& sys) {
  return {sys.problem.states, sys.costates, sys.problem.controls};
}

Expr poisson_bracket(const Expr& f, const Expr& g, const PoissonContext& ctx) {
  Expr sum = Expr::constant(0.0);
  for (std::size_t i = 0; i < ctx.positions.size(); ++i) {
    const auto& q = ctx.positions[i];
    const auto& p = ctx.momenta[i];
    sum = sum + diff(f, q) * diff(g, p) - diff(f, p) * diff(g, q);
  }
  return simplify(sum);
}

int MultiplierInfo::min_rank() const {
  return ranks.empty() ? 0 : *std::min_element(ranks.begin(), ranks.end());
}

int MultiplierInfo::max_rank() const {
  return ranks.empty() ? 0 : *std::max_element(ranks.begin(), ranks.end());
}

std::vector<Expr> ConstraintLadder::all_constraints() const {
  std::vector<Expr> out;
  for (const auto& level : levels) out.insert(out.end(), level.begin(), level.end());
  return out;
}

namespace {

std::uint64_t step_seed(std::uint64_t seed, std::size_t level) {
  return seed * 0x100000001b3ULL + 0x9e3779b97f4a7c15ULL * (level + 1);
}

// Rows of the returned matrix span the left null space of `a`, reduced to
// row echelon form so that exact coefficients (0, +-1, ...) print cleanly.
Eigen::MatrixXd cokernel_rows(const Eigen::MatrixXd& a, int rank) {
  const Eigen::Index n = a.rows();
  if (rank == 0) return Eigen::MatrixXd::Identity(n, n);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullU);
  Eigen::MatrixXd basis = svd.matrixU().rightCols(n - rank).transpose();

  // Gauss-Jordan with partial pivoting.
  Eigen::Index row = 0;
  for (Eigen::Index col = 0; col < basis.cols() && row < basis.rows(); ++col) {
    Eigen::Index pivot = row;
    for (Eigen::Index r = row + 1; r < basis.rows(); ++r)
      if (std::abs(basis(r, col)) > std::abs(basis(pivot, col))) pivot = r;
    if (std::abs(basis(pivot, col)) < 1e-10) continue;
    basis.row(row).swap(basis.row(pivot));
    basis.row(row) /= basis(row, col);
    for (Eigen::Index r = 0; r < basis.rows(); ++r)
      if (r != row) basis.row(r) -= basis(r, col) * basis.row(row);
    ++row;
  }
  for (Eigen::Index i = 0; i < basis.rows(); ++i) {
    for (Eigen::Index j = 0; j < basis.cols(); ++j) {
      double& v = basis(i, j);
      double r = std::round(v);
      if (std::abs(v - r) < 1e-12) v = r;
    }
  }
  return basis;
}

struct TangencySystem {
  std::vector<std::vector<CompiledExpr>> a;  // per constraint, per control
  std::vector<CompiledExpr> v;

  Eigen::MatrixXd eval_a(std::span<const double> x) const {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(a.size()),
                      static_cast<Eigen::Index>(a.empty() ? 0 : a.front().size()));
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < a[i].size(); ++j)
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = a[i][j](x);
    return m;
  }
};

TangencySystem build_system(const PontryaginSystem& sys, std::span<const Expr> constraints,
                            const std::vector<std::string>& layout, std::vector<Expr>* brackets) {
  TangencySystem ts;
  PoissonContext ctx = PoissonContext::of(sys);
  for (const auto& c : constraints) {
    std::vector<CompiledExpr> row;
    for (const auto& u : sys.problem.controls) row.emplace_back(diff(c, u), layout);
    ts.a.push_back(std::move(row));
    if (brackets != nullptr) {
      Expr vb = poisson_bracket(c, sys.hamiltonian, ctx);
      ts.v.emplace_back(vb, layout);
      brackets->push_back(std::move(vb));
    }
  }
  return ts;
}

MultiplierInfo rank_info(const TangencySystem& ts, int controls,
                         std::span<const std::vector<double>> points) {
  MultiplierInfo info;
  info.controls = controls;
  info.constraints = static_cast<int>(ts.a.size());
  for (const auto& x : points) info.ranks.push_back(numerical_rank(ts.eval_a(x)));
  return info;
}

}  // namespace

TangencyResult tangency_step(const PontryaginSystem& sys, const ConstraintLadder& ladder,
                             const Domain& domain, const LadderOptions& options) {
  if (ladder.levels.empty()) throw PreconditionError("tangency_step: ladder has no levels");
  TangencyResult result;
  const auto layout = sys.layout();
  const int controls = static_cast<int>(sys.control_count());

  std::vector<Expr> feasible = sys.problem.holonomic;
  auto all = ladder.all_constraints();
  feasible.insert(feasible.end(), all.begin(), all.end());
  ConstraintProjector projector(feasible, layout);
  SamplingOptions sopts;
  sopts.count = options.samples;
  sopts.seed = step_seed(options.seed, ladder.levels.size());
  SampleSet samples = sample_feasible(projector, domain, sopts);
  result.sample_count = samples.points.size();
  result.sampling_attempts = samples.attempts;
  const auto& points = samples.points;

  TangencySystem stacked = build_system(sys, all, layout, nullptr);
  result.stacked = rank_info(stacked, controls, points);

  const auto& newest = ladder.levels.back();
  std::vector<Expr> brackets;
  TangencySystem ts = build_system(sys, newest, layout, &brackets);
  result.newest = rank_info(ts, controls, points);
  if (newest.empty()) return result;

  bool brackets_vanish = true;
  for (const auto& b : brackets)
    brackets_vanish = brackets_vanish && zero_on_points(b, layout, points, options.zero_tol).zero;
  if (brackets_vanish) return result;

  if (!result.newest.constant_rank())
    throw ConstantRankError("tangency matrix rank varies across feasible samples (level " +
                                std::to_string(ladder.levels.size()) + ")",
                            result.newest.ranks);
  const int rank = result.newest.min_rank();
  const auto nc = static_cast<int>(newest.size());
  if (rank == nc) return result;

  Eigen::MatrixXd cok = cokernel_rows(ts.eval_a(points.front()), rank);
  for (const auto& x : points) {
    Eigen::MatrixXd ax = ts.eval_a(x);
    double scale = std::max(1.0, ax.cwiseAbs().maxCoeff());
    if ((cok * ax).cwiseAbs().maxCoeff() > 1e-8 * scale)
      throw ConstantRankError("cokernel of the tangency matrix changes across feasible samples (level " +
                                  std::to_string(ladder.levels.size()) + ")",
                              result.newest.ranks);
  }

  for (Eigen::Index k = 0; k < cok.rows(); ++k) {
    Expr candidate = Expr::constant(0.0);
    for (Eigen::Index a = 0; a < cok.cols(); ++a) {
      double coef = cok(k, a);
      if (coef == 0.0) continue;
      candidate = candidate + Expr::constant(coef) * brackets[static_cast<std::size_t>(a)];
    }
    candidate = simplify(candidate);
    if (zero_on_points(candidate, layout, points, options.zero_tol).zero) {
      result.discarded.push_back(std::move(candidate));
    } else {
      result.new_constraints.push_back(std::move(candidate));
    }
  }
  return result;
}

ConstraintLadder run_ladder(const PontryaginSystem& sys, const Domain& domain, const LadderOptions& options) {
  ConstraintLadder ladder;
  std::vector<Expr> primary;
  for (const auto& c : sys.chi)
    if (!c.is_constant(0.0)) primary.push_back(c);
  ladder.levels.push_back(std::move(primary));
  return run_ladder(sys, std::move(ladder), domain, options);
}

ConstraintLadder run_ladder(const PontryaginSystem& sys, ConstraintLadder ladder, const Domain& domain,
                            const LadderOptions& options) {
  if (options.max_levels < 1) throw std::invalid_argument("max_levels must be >= 1");
  if (ladder.levels.empty()) throw PreconditionError("run_ladder: ladder has no levels");
  ladder.stabilized = false;
  for (;;) {
    TangencyResult step = tangency_step(sys, ladder, domain, options);
    // step_info is indexed by the level the step was taken from.
    ladder.step_info.resize(ladder.levels.size() - 1);
    if (step.new_constraints.empty()) {
      ladder.multipliers = step.stacked;
      ladder.stabilized = true;
      ladder.step_info.push_back(std::move(step));
      return ladder;
    }
    if (static_cast<int>(ladder.levels.size()) >= options.max_levels) {
      ladder.step_info.push_back(std::move(step));
      return ladder;
    }
    ladder.levels.push_back(step.new_constraints);
    ladder.step_info.push_back(std::move(step));
  }
}

FeedbackResult solve_feedback(const PontryaginSystem& sys, std::span<const double> q,
                              std::span<const double> p, std::vector<double> u0, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");
  const std::size_t m = sys.state_count();
  const std::size_t k = sys.control_count();
  if (q.size() != m || p.size() != m || u0.size() != k)
    throw std::invalid_argument("solve_feedback: dimension mismatch");
  const auto layout = sys.layout();
  auto chi = compile_all(sys.chi, layout);
  std::vector<std::vector<CompiledExpr>> w;
  for (const auto& row : sys.W) w.push_back(compile_all(row, layout));

  std::vector<double> x(q.begin(), q.end());
  x.insert(x.end(), p.begin(), p.end());
  x.insert(x.end(), u0.begin(), u0.end());
  auto ki = static_cast<Eigen::Index>(k);
  FeedbackResult out;
  for (int it = 0; it <= 50; ++it) {
    Eigen::VectorXd r(ki);
    for (std::size_t a = 0; a < k; ++a) r(static_cast<Eigen::Index>(a)) = chi[a](x);
    out.residual = k == 0 ? 0.0 : r.cwiseAbs().maxCoeff();
    out.iterations = it;
    if (out.residual <= tol) {
      out.u.assign(x.begin() + static_cast<std::ptrdiff_t>(2 * m), x.end());
      return out;
    }
    if (it == 50) break;
    Eigen::MatrixXd jac(ki, ki);
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b)
        jac(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = w[a][b](x);
    if (numerical_rank(jac) < ki)
      throw SolverError("solve_feedback: W is numerically singular at iteration " + std::to_string(it));
    Eigen::VectorXd step = jac.fullPivLu().solve(r);
    for (std::size_t a = 0; a < k; ++a) x[2 * m + a] -= step(static_cast<Eigen::Index>(a));
  }
  throw SolverError("solve_feedback: no convergence in 50 iterations (residual " +
                    std::to_string(out.residual) + ")");
}

}  // namespace presym
