#include "presym/app.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "presym/constraint_algo.hpp"
#include "presym/dynamics.hpp"
#include "presym/errors.hpp"
#include "presym/momentum.hpp"
#include "presym/problem.hpp"
#include "presym/problem_io.hpp"
#include "presym/symmetry.hpp"

namespace presym::app {

using json = nlohmann::ordered_json;

std::string command_name(Command c) {
  switch (c) {
    case Command::Analyze: return "analyze";
    case Command::Symmetries: return "symmetries";
    case Command::Reduce: return "reduce";
    case Command::Integrate: return "integrate";
  }
  return "?";
}

namespace {

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_number(std::string_view s, const std::string& what) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v))
    throw InputError(what + ": '" + std::string(s) + "' is not a number");
  return v;
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::string_view s = text;
  while (true) {
    auto comma = s.find(',');
    out.push_back(parse_number(s.substr(0, comma), what));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

json strings(const std::vector<Expr>& exprs) {
  json out = json::array();
  for (const auto& e : exprs) out.push_back(e.str());
  return out;
}

json multiplier_json(const MultiplierInfo& m) {
  return {{"controls", m.controls},
          {"constraints", m.constraints},
          {"rank_min", m.min_rank()},
          {"rank_max", m.max_rank()},
          {"determined", m.determined()},
          {"gauge_dimension", m.gauge_dimension()}};
}

struct Loaded {
  ControlProblem problem;
  PontryaginSystem sys;
  Domain domain;
};

Loaded load(const RunConfig& cfg) {
  Loaded l;
  l.problem = load_problem(cfg.problem_path);
  l.domain = l.problem.domain;
  for (const auto& box : cfg.boxes) {
    auto eq = box.find('=');
    auto comma = box.find(',', eq == std::string::npos ? 0 : eq);
    if (eq == std::string::npos || comma == std::string::npos)
      throw InputError("--box expects name=lo,hi, got '" + box + "'");
    double lo = parse_number(std::string_view(box).substr(eq + 1, comma - eq - 1), "--box");
    double hi = parse_number(std::string_view(box).substr(comma + 1), "--box");
    if (!(lo < hi)) throw InputError("--box '" + box + "' needs lo < hi");
    l.domain.set(box.substr(0, eq), {lo, hi});
  }
  l.sys = build_pontryagin(l.problem);
  return l;
}

LadderOptions ladder_options(const RunConfig& cfg) {
  LadderOptions o;
  o.samples = cfg.samples;
  o.seed = cfg.seed;
  o.zero_tol = cfg.zero_tol;
  o.max_levels = cfg.max_levels;
  return o;
}

SymmetryCheckOptions symmetry_options(const RunConfig& cfg) {
  return {cfg.symmetry_trials, cfg.symmetry_tol, cfg.seed};
}

json header(const RunConfig& cfg) {
  return {{"schema", 1}, {"command", command_name(cfg.command)}, {"seed", cfg.seed}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

RunResult analyze(const RunConfig& cfg) {
  Loaded l = load(cfg);
  const auto& sys = l.sys;
  json out = header(cfg);
  out["states"] = sys.problem.states;
  out["controls"] = sys.problem.controls;
  out["costates"] = sys.costates;
  out["hamiltonian"] = sys.hamiltonian.str();
  out["chi"] = strings(sys.chi);
  json w = json::array();
  for (const auto& row : sys.W) w.push_back(strings(row));
  out["W"] = w;

  RegularityReport reg = classify_regularity(sys, l.domain, cfg.regularity_trials, cfg.seed);
  auto [lo, hi] = std::minmax_element(reg.ranks.begin(), reg.ranks.end());
  out["regularity"] = {{"label", reg.label()},
                       {"rank_min", reg.ranks.empty() ? 0 : *lo},
                       {"rank_max", reg.ranks.empty() ? 0 : *hi},
                       {"controls", reg.controls},
                       {"samples", reg.ranks.size()},
                       {"on_constraint_set", reg.on_constraint_set}};

  ConstraintLadder ladder = run_ladder(sys, l.domain, ladder_options(cfg));
  json levels = json::array();
  for (std::size_t k = 0; k < ladder.levels.size(); ++k) {
    json level = {{"index", k + 1}, {"constraints", strings(ladder.levels[k])}};
    if (k < ladder.step_info.size()) {
      const auto& st = ladder.step_info[k];
      level["tangency"] = {{"samples", st.sample_count},
                           {"sampling_attempts", st.sampling_attempts},
                           {"rank_min", st.newest.min_rank()},
                           {"rank_max", st.newest.max_rank()},
                           {"candidates", strings(st.new_constraints)},
                           {"discarded", strings(st.discarded)}};
    }
    levels.push_back(level);
  }
  out["ladder"] = {{"stabilized", ladder.stabilized},
                   {"final_level", ladder.final_level_index()},
                   {"max_levels", cfg.max_levels},
                   {"levels", levels}};
  if (ladder.stabilized) {
    out["multipliers"] = multiplier_json(ladder.multipliers);
  } else {
    out["multipliers"] = nullptr;
  }
  return {kOk, dump(out), ""};
}

RunResult symmetries(const RunConfig& cfg) {
  Loaded l = load(cfg);
  json out = header(cfg);
  json gens = json::array();
  for (const auto& g : l.sys.problem.symmetries) {
    SymmetryReport rep = check_symmetry(g, l.sys, l.domain, symmetry_options(cfg));
    LiftedGenerator lifted = lift(g, l.sys);
    Expr lifted_res = lifted_hamiltonian_residual(g, l.sys);
    std::vector<std::string> vars = l.sys.layout();
    ZeroTest lt = zero_on_box(lifted_res, vars, cfg.symmetry_trials, cfg.symmetry_tol, l.domain, cfg.seed);
    gens.push_back({{"name", g.name},
                    {"xi", strings(g.xi)},
                    {"zeta", strings(g.zeta)},
                    {"lie_derivative", strings(rep.lie_residuals)},
                    {"lie_residual_norms", rep.lie_residual_norms},
                    {"lagrangian_residual", rep.lagrangian_residual.str()},
                    {"lagrangian_residual_norm", rep.lagrangian_residual_norm},
                    {"lifted_p_components", strings(lifted.p)},
                    {"lifted_hamiltonian_residual", lifted_res.str()},
                    {"lifted_hamiltonian_residual_norm", lt.worst_value},
                    {"symbolic", rep.symbolic},
                    {"symmetry", rep.symmetry},
                    {"momentum", noether_momentum(g, l.sys).expr.str()}});
  }
  out["trials"] = cfg.symmetry_trials;
  out["tolerance"] = cfg.symmetry_tol;
  out["generators"] = gens;
  return {kOk, dump(out), ""};
}

RunResult reduce(const RunConfig& cfg) {
  Loaded l = load(cfg);
  const auto& sys = l.sys;
  if (sys.problem.symmetries.empty()) throw InputError("reduce needs at least one symmetry generator");
  MomentumMap j = build_momentum_map(sys.problem.symmetries, sys, l.domain, symmetry_options(cfg));

  if (cfg.restrict_to != "ladder" && cfg.restrict_to != "none")
    throw InputError("--restrict must be none or ladder");
  ConstraintLadder ladder = run_ladder(sys, l.domain, ladder_options(cfg));
  std::vector<Expr> extra;
  if (cfg.restrict_to == "ladder") extra = ladder.all_constraints();

  std::vector<double> mu;
  bool automatic = cfg.mu == "auto";
  if (automatic) {
    mu = auto_mu(j, sys, extra, l.domain, cfg.seed);
  } else {
    mu = parse_list(cfg.mu, "--mu");
  }

  json out = header(cfg);
  out["momenta"] = json::array();
  for (const auto& c : j.components) out["momenta"].push_back({{"generator", c.generator}, {"expr", c.expr.str()}});
  out["mu"] = mu;
  out["mu_source"] = automatic ? "auto" : "given";
  out["restrict"] = cfg.restrict_to;

  SamplingOptions so;
  so.count = cfg.level_samples;
  so.seed = cfg.seed + 1;
  SampleSet set;
  try {
    set = sample_level_set(j, sys, mu, extra, l.domain, so);
  } catch (const SamplingError& e) {
    out["feasible"] = false;
    out["infeasibility"] = {{"message", e.what()},
                            {"requested", e.requested()},
                            {"found", e.found()},
                            {"attempts", e.attempts()}};
    return {kInfeasible, dump(out), e.what()};
  }
  LevelSetReport rep = rank_analysis(j, sys, set.points, extra, mu);
  // {f, H} vanishes only where the ladder constraints hold, so it is checked
  // on points of the final level rather than on the level set itself.
  std::vector<Expr> final_set = sys.problem.holonomic;
  for (const auto& c : ladder.all_constraints()) final_set.push_back(c);
  SamplingOptions fo;
  fo.count = cfg.level_samples;
  fo.seed = cfg.seed + 2;
  auto ladder_points = sample_feasible(ConstraintProjector(final_set, sys.layout()), l.domain, fo).points;
  auto tangency = tangency_check(j, sys, ladder_points);

  auto dims_json = [](const PointDims& d) {
    return json{{"jacobian_rank", d.jacobian_rank},
                {"momentum_rank", d.momentum_rank},
                {"levelset_dim", d.levelset_dim},
                {"omega_pullback_kernel_dim", d.omega_kernel_dim},
                {"omega_pullback_norm", d.omega_norm},
                {"orbit_tangent_dim", d.orbit_tangent_dim},
                {"generator_rank", d.generator_rank},
                {"base_orbit_rank", d.base_orbit_rank},
                {"reduced_dim", d.reduced_dim}};
  };
  out["feasible"] = true;
  out["sampling"] = {{"points", set.points.size()}, {"attempts", set.attempts}};
  out["ambient_dim"] = rep.ambient_dim;
  out["holonomic_constraints"] = sys.problem.holonomic.size();
  out["extra_constraints"] = extra.size();
  out["jacobian_rows"] = rep.constraint_count;
  json summary = dims_json(rep.dims);
  for (auto it = summary.begin(); it != summary.end(); ++it) out[it.key()] = it.value();
  out["omega_pullback_norm_max"] = rep.omega_norm_max;
  out["constant_rank"] = rep.constant_rank;
  out["weakly_regular_evidence"] = rep.weakly_regular_evidence;
  out["hamiltonian_range"] = {rep.h_min, rep.h_max};
  out["momentum_tangency_residuals"] = {{"points", ladder_points.size()}, {"max_abs", tangency}};
  json per = json::array();
  for (const auto& d : rep.per_point) per.push_back(dims_json(d));
  out["per_point"] = per;
  out["points"] = rep.points;
  return {kOk, dump(out), ""};
}

RunResult integrate_cmd(const RunConfig& cfg) {
  Loaded l = load(cfg);
  const auto& sys = l.sys;
  ConstraintLadder ladder = run_ladder(sys, l.domain, ladder_options(cfg));

  std::unique_ptr<MomentumMap> j;
  if (!sys.problem.symmetries.empty()) {
    // Monitors only; non-symmetries are still tracked so drift shows up.
    j = std::make_unique<MomentumMap>();
    for (const auto& g : sys.problem.symmetries) {
      j->components.push_back(noether_momentum(g, sys));
      j->lifts.push_back(lift(g, sys));
    }
  }

  IntegratorConfig ic;
  ic.t0 = cfg.t0;
  ic.t1 = cfg.t1;
  ic.step = cfg.step;
  ic.record_every = cfg.record_every;
  if (cfg.retraction == "on") {
    ic.retraction = true;
  } else if (cfg.retraction == "off") {
    ic.retraction = false;
  } else if (cfg.retraction != "auto") {
    throw InputError("--retraction must be auto, on or off");
  }
  if (cfg.gauge == "zero") {
    ic.gauge = Gauge::Zero;
  } else if (cfg.gauge != "error") {
    throw InputError("--gauge must be error or zero");
  }

  std::vector<double> x0;
  if (cfg.from == "auto") {
    x0 = feasible_start(sys, ladder, l.domain, cfg.seed);
  } else {
    x0 = parse_list(cfg.from, "--from");
    if (x0.size() != sys.dimension())
      throw InputError("--from needs " + std::to_string(sys.dimension()) + " values (states, costates, controls)");
  }

  Trajectory traj = integrate(sys, ladder, j.get(), x0, ic);
  std::ostringstream csv;
  csv << "t";
  for (const auto& c : traj.coordinates) csv << ',' << c;
  for (const auto& m : traj.monitor_names) csv << ',' << m;
  csv << '\n';
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    csv << format_number(traj.times[k]);
    for (double v : traj.points[k]) csv << ',' << format_number(v);
    for (double v : traj.monitors[k]) csv << ',' << format_number(v);
    csv << '\n';
  }
  if (traj.diverged) return {kInfeasible, csv.str(), "integration aborted: " + traj.message};
  return {kOk, csv.str(), traj.message};
}

json error_json(const RunConfig& cfg, const std::string& kind, const std::string& message) {
  json out = header(cfg);
  out["error"] = {{"kind", kind}, {"message", message}};
  return out;
}

}  // namespace

RunResult run(const RunConfig& cfg) {
  try {
    switch (cfg.command) {
      case Command::Analyze: return analyze(cfg);
      case Command::Symmetries: return symmetries(cfg);
      case Command::Reduce: return reduce(cfg);
      case Command::Integrate: return integrate_cmd(cfg);
    }
  } catch (const ConstantRankError& e) {
    json out = error_json(cfg, "constant_rank_violation", e.what());
    out["error"]["ranks"] = e.ranks();
    return {kRankViolation, dump(out), e.what()};
  } catch (const SamplingError& e) {
    json out = error_json(cfg, "infeasible", e.what());
    out["error"]["requested"] = e.requested();
    out["error"]["found"] = e.found();
    out["error"]["attempts"] = e.attempts();
    return {kInfeasible, dump(out), e.what()};
  } catch (const std::exception& e) {
    return {kInputError, "", e.what()};
  }
  return {kInputError, "", "unknown command"};
}

}  // namespace presym::app
