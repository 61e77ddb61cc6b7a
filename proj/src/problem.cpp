#include "presym/problem.hpp"

#include <algorithm>
#include <set>

#include "presym/compiled_expr.hpp"
#include "presym/errors.hpp"
#include "presym/sampling.hpp"

namespace presym {

std::string costate_name(std::size_t i) { return "p" + std::to_string(i + 1); }

bool is_reserved_name(const std::string& name) {
  if (name == "t" || name == "sin" || name == "cos" || name == "exp" || name == "ln" || name == "sqrt")
    return true;
  if (name.size() >= 2 && name[0] == 'p' &&
      std::all_of(name.begin() + 1, name.end(), [](char c) { return c >= '0' && c <= '9'; }))
    return true;
  return false;
}

namespace {

std::string join(const std::set<std::string>& names) {
  std::string out;
  for (const auto& n : names) {
    if (!out.empty()) out += ", ";
    out += n;
  }
  return out;
}

void check_vars(const Expr& e, const std::set<std::string>& allowed, const std::string& where,
                std::vector<std::string>& out) {
  std::set<std::string> unknown;
  for (const auto& v : free_variables(e))
    if (!allowed.contains(v)) unknown.insert(v);
  if (!unknown.empty()) out.push_back(where + " mentions unknown variable(s): " + join(unknown));
}

}  // namespace

std::vector<std::string> validate(const ControlProblem& problem) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  auto declare = [&](const std::string& name, const char* kind) {
    if (!seen.insert(name).second) out.push_back(std::string("duplicate name '") + name + "'");
    if (is_reserved_name(name))
      out.push_back(std::string(kind) + " name '" + name + "' is reserved");
  };
  if (problem.states.empty()) out.push_back("no states declared");
  for (const auto& s : problem.states) declare(s, "state");
  for (const auto& u : problem.controls) declare(u, "control");

  if (problem.dynamics.size() != problem.states.size())
    out.push_back("dynamics has " + std::to_string(problem.dynamics.size()) + " entries for " +
                  std::to_string(problem.states.size()) + " states");

  std::set<std::string> states(problem.states.begin(), problem.states.end());
  std::set<std::string> bundle = states;
  bundle.insert(problem.controls.begin(), problem.controls.end());
  std::set<std::string> with_time = bundle;
  if (problem.time_dependent) with_time.insert("t");

  for (std::size_t i = 0; i < problem.dynamics.size(); ++i) {
    std::string where = i < problem.states.size() ? "dynamics of " + problem.states[i]
                                                   : "dynamics entry " + std::to_string(i + 1);
    check_vars(problem.dynamics[i], with_time, where, out);
  }
  check_vars(problem.lagrangian, with_time, "lagrangian", out);
  for (std::size_t r = 0; r < problem.holonomic.size(); ++r)
    check_vars(problem.holonomic[r], bundle, "holonomic constraint " + std::to_string(r + 1), out);

  std::set<std::string> generator_names;
  for (const auto& g : problem.symmetries) {
    std::string where = "symmetry " + g.name;
    if (!generator_names.insert(g.name).second) out.push_back("duplicate symmetry '" + g.name + "'");
    if (g.xi.size() != problem.states.size())
      out.push_back(where + ": xi has " + std::to_string(g.xi.size()) + " components, expected " +
                    std::to_string(problem.states.size()));
    if (g.zeta.size() != problem.controls.size())
      out.push_back(where + ": zeta has " + std::to_string(g.zeta.size()) + " components, expected " +
                    std::to_string(problem.controls.size()));
    for (const auto& xi : g.xi) check_vars(xi, states, where + " xi (must depend on states only)", out);
    for (const auto& z : g.zeta) check_vars(z, bundle, where + " zeta", out);
  }

  for (const auto& [name, box] : problem.domain.explicit_boxes())
    if (!(box.lo < box.hi)) out.push_back("empty domain box for '" + name + "'");
  return out;
}

ControlProblem autonomize(const ControlProblem& problem) {
  if (!problem.time_dependent) throw PreconditionError("autonomize: problem is already autonomous");
  ControlProblem out = problem;
  out.time_dependent = false;
  out.states.push_back("t");
  out.dynamics.push_back(Expr::constant(1.0));
  for (auto& g : out.symmetries) g.xi.push_back(Expr::constant(0.0));
  return out;
}

std::vector<double> PhasePoint::flat() const {
  std::vector<double> x;
  x.reserve(q.size() + p.size() + u.size());
  x.insert(x.end(), q.begin(), q.end());
  x.insert(x.end(), p.begin(), p.end());
  x.insert(x.end(), u.begin(), u.end());
  return x;
}

PhasePoint PhasePoint::from_flat(std::span<const double> x, std::size_t states, std::size_t controls) {
  if (x.size() != 2 * states + controls) throw std::invalid_argument("phase point has wrong dimension");
  PhasePoint pt;
  pt.q.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(states));
  pt.p.assign(x.begin() + static_cast<std::ptrdiff_t>(states),
              x.begin() + static_cast<std::ptrdiff_t>(2 * states));
  pt.u.assign(x.begin() + static_cast<std::ptrdiff_t>(2 * states), x.end());
  return pt;
}

std::vector<std::string> PontryaginSystem::layout() const {
  std::vector<std::string> names = problem.states;
  names.insert(names.end(), costates.begin(), costates.end());
  names.insert(names.end(), problem.controls.begin(), problem.controls.end());
  return names;
}

PontryaginSystem build_pontryagin(const ControlProblem& input) {
  auto issues = validate(input);
  if (!issues.empty()) {
    std::string msg = "invalid problem:";
    for (const auto& i : issues) msg += "\n  " + i;
    throw InputError(msg);
  }
  PontryaginSystem sys;
  sys.problem = input.time_dependent ? autonomize(input) : input;
  const auto& pb = sys.problem;
  for (std::size_t i = 0; i < pb.states.size(); ++i) sys.costates.push_back(costate_name(i));

  Expr h = Expr::constant(0.0);
  for (std::size_t i = 0; i < pb.states.size(); ++i)
    h = h + Expr::variable(sys.costates[i]) * pb.dynamics[i];
  sys.hamiltonian = simplify(h - pb.lagrangian);

  for (const auto& u : pb.controls) sys.chi.push_back(diff(sys.hamiltonian, u));
  for (const auto& c : sys.chi) {
    std::vector<Expr> row;
    for (const auto& u : pb.controls) row.push_back(diff(c, u));
    sys.W.push_back(std::move(row));
  }
  return sys;
}

std::string RegularityReport::label() const {
  switch (kind) {
    case Regularity::Regular: return "REGULAR";
    case Regularity::SingularConstantRank: return "SINGULAR_CONSTANT_RANK(" + std::to_string(rank) + ")";
    case Regularity::Mixed: return "MIXED";
  }
  return "?";
}

RegularityReport classify_regularity(const PontryaginSystem& sys, const Domain& domain, int trials,
                                     std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  RegularityReport rep;
  rep.controls = static_cast<int>(sys.control_count());
  const auto layout = sys.layout();
  const auto count = static_cast<std::size_t>(trials);

  std::vector<std::vector<double>> points;
  try {
    ConstraintProjector chi(sys.chi, layout);
    SamplingOptions opts;
    opts.count = count;
    opts.seed = seed;
    points = sample_feasible(chi, domain, opts).points;
    rep.on_constraint_set = true;
  } catch (const SamplingError&) {
    points.clear();
    for (std::size_t k = 0; k < count; ++k) {
      auto rng = make_rng(seed, k);
      points.push_back(random_point(rng, layout, domain));
    }
  }

  std::vector<std::vector<CompiledExpr>> w;
  for (const auto& row : sys.W) w.push_back(compile_all(row, layout));
  const auto k = static_cast<Eigen::Index>(sys.control_count());
  for (const auto& x : points) {
    Eigen::MatrixXd m(k, k);
    for (Eigen::Index a = 0; a < k; ++a)
      for (Eigen::Index b = 0; b < k; ++b)
        m(a, b) = w[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)](x);
    rep.ranks.push_back(numerical_rank(m));
  }
  auto [lo, hi] = std::minmax_element(rep.ranks.begin(), rep.ranks.end());
  rep.rank = *lo;
  if (*lo != *hi) {
    rep.kind = Regularity::Mixed;
  } else if (*lo == rep.controls) {
    rep.kind = Regularity::Regular;
  } else {
    rep.kind = Regularity::SingularConstantRank;
  }
  return rep;
}

}  // namespace presym
