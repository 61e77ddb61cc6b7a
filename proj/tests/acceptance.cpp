// Acceptance criteria 1-5. One PASS/FAIL line per criterion; exit status is
// nonzero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "presym/app.hpp"
#include "presym/constraint_algo.hpp"
#include "presym/dynamics.hpp"
#include "presym/momentum.hpp"
#include "presym/symmetry.hpp"
#include "support.hpp"

using namespace presym;
using json = nlohmann::json;

namespace {

struct Check {
  std::vector<std::string> failures;
  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(3);
  s << v;
  return s.str();
}

app::RunConfig config(app::Command c, const std::string& fixture) {
  app::RunConfig cfg;
  cfg.command = c;
  cfg.problem_path = testsupport::problem_path(fixture);
  return cfg;
}

void regular_pipeline(Check& c) {
  auto r = app::run(config(app::Command::Analyze, "lq.ocp"));
  c.expect(r.exit_code == 0, "analyze exit " + std::to_string(r.exit_code));
  auto j = json::parse(r.output);
  c.expect(j["regularity"]["label"] == "REGULAR", "label " + j["regularity"]["label"].get<std::string>());
  c.expect(j["ladder"]["levels"].size() == 1, "ladder levels != 1");
  c.expect(j["chi"][0] == "p1 - u1", "chi " + j["chi"][0].get<std::string>());

  auto sys = testsupport::fixture_system("lq.ocp");
  double worst = 0.0;
  for (std::uint64_t k = 0; k < 100; ++k) {
    auto x = testsupport::box_point(101, k, sys.layout());
    std::vector<double> q = {x[0]}, p = {x[1]};
    auto fb = solve_feedback(sys, q, p, {0.0});
    worst = std::max(worst, std::abs(fb.u[0] - p[0]));
    c.expect(fb.residual <= 1e-12, "feedback residual " + fmt(fb.residual));
  }
  c.expect(worst <= 1e-12, "feedback |u - p| " + fmt(worst));

  auto ladder = run_ladder(sys, Domain{}, {});
  IntegratorConfig ic;
  std::vector<double> x0 = {0.0, 1.0, 1.0};
  auto traj = integrate(sys, ladder, nullptr, x0, ic);
  double q1 = traj.points.back()[0];
  c.expect(std::abs(q1 - 1.0) <= 1e-9, "q(1) = " + fmt(q1));
  double pdrift = 0.0;
  for (const auto& x : traj.points) pdrift = std::max(pdrift, std::abs(x[1] - 1.0));
  c.expect(pdrift <= 1e-15, "p drift " + fmt(pdrift));
}

void singular_detection(Check& c) {
  auto sys = testsupport::fixture_system("bounded_curvature.ocp");
  const auto layout = sys.layout();
  const char* qxy[] = {"p5*y3 - p6*y2", "p6*y1 - p4*y3", "p4*y2 - p5*y1"};
  for (int a = 0; a < 3; ++a) {
    Expr want = parse(qxy[a]);
    for (std::uint64_t k = 0; k < 100; ++k) {
      auto x = testsupport::box_point(103, k, layout);
      double d = std::abs(testsupport::value(sys.chi[a], layout, x) - testsupport::value(want, layout, x));
      if (d > 1e-12) {
        c.expect(false, "chi_" + std::to_string(a + 1) + " differs from q x y by " + fmt(d));
        break;
      }
    }
  }
  auto reg = classify_regularity(sys, Domain{}, 32);
  for (int r : reg.ranks) c.expect(r == 0, "W rank " + std::to_string(r));

  auto ladder = run_ladder(sys, Domain{}, {});
  c.expect(ladder.levels.size() >= 2 && !ladder.levels[1].empty(), "level 2 empty");
  if (ladder.levels.size() < 2) return;
  for (std::size_t a = 0; a < ladder.levels[1].size() && a < sys.chi.size(); ++a) {
    for (std::uint64_t k = 0; k < 100; ++k) {
      auto x = testsupport::box_point(107, k, layout);
      double sym = testsupport::value(ladder.levels[1][a], layout, x);
      double fd = testsupport::fd_bracket(sys.chi[a], sys.hamiltonian, sys, x);
      if (!testsupport::close_rel(sym, fd, 1e-6)) {
        c.expect(false, "level 2 entry " + std::to_string(a + 1) + " vs bracket oracle: " + fmt(sym) + " / " + fmt(fd));
        break;
      }
    }
  }
}

void noether_suite(Check& c) {
  auto sys = testsupport::fixture_system("bounded_curvature.ocp");
  const auto layout = sys.layout();
  for (const auto& g : sys.problem.symmetries) {
    auto rep = check_symmetry(g, sys, Domain{});
    double worst = rep.lagrangian_residual_norm;
    for (double n : rep.lie_residual_norms) worst = std::max(worst, n);
    c.expect(rep.symmetry && worst < 1e-10, g.name + " residual " + fmt(worst));
  }
  // costates of y are p4..p6
  const char* printed[] = {"p1", "p2", "p3", "x1*p2 - x2*p1 + y1*p5 - y2*p4", "x2*p3 - x3*p2 + y2*p6 - y3*p5",
                           "x3*p1 - x1*p3 + y3*p4 - y1*p6"};
  for (std::size_t k = 0; k < 6; ++k) {
    Expr f = noether_momentum(sys.problem.symmetries[k], sys).expr;
    Expr want = parse(printed[k]);
    for (std::uint64_t s = 0; s < 100; ++s) {
      auto x = testsupport::box_point(109, s, layout);
      double d = std::abs(testsupport::value(f, layout, x) - testsupport::value(want, layout, x));
      if (d > 1e-12) {
        c.expect(false, "momentum " + std::to_string(k + 1) + " differs by " + fmt(d));
        break;
      }
    }
  }

  auto ladder = run_ladder(sys, Domain{}, {});
  auto j = build_momentum_map(sys.problem.symmetries, sys, Domain{});
  auto x0 = feasible_start(sys, ladder, Domain{}, 0);
  IntegratorConfig ic;
  ic.t1 = 10.0;
  ic.gauge = Gauge::Zero;
  auto traj = integrate(sys, ladder, &j, x0, ic);
  c.expect(!traj.diverged, "trajectory diverged");
  auto rep = conservation_report(traj);
  for (const auto& m : rep.monitors) {
    if (m.name == "H" || m.name.starts_with("f_") || m.name == "hol_1")
      c.expect(m.drift < 1e-8, m.name + " drift " + fmt(m.drift));
  }
}

void reduction_accounting(Check& c) {
  auto r = app::run(config(app::Command::Reduce, "bounded_curvature.ocp"));
  c.expect(r.exit_code == 0, "reduce exit " + std::to_string(r.exit_code));
  if (r.exit_code != 0) return;
  auto j = json::parse(r.output);
  for (const auto& d : j["per_point"]) {
    int ls = d["levelset_dim"];
    int rd = d["reduced_dim"];
    if (ls != 7 || rd != 2) {
      c.expect(false, "generic mu: levelset_dim " + std::to_string(ls) + " (want 7), reduced_dim " +
                          std::to_string(rd) + " (want 2), orbit_tangent_dim " +
                          std::to_string(d["orbit_tangent_dim"].get<int>()));
      break;
    }
  }

  auto zero = config(app::Command::Reduce, "bounded_curvature.ocp");
  zero.mu = "0,0,0,0,0,0";
  auto z = app::run(zero);
  c.expect(z.exit_code == 0, "reduce mu=0 exit " + std::to_string(z.exit_code));
  if (z.exit_code != 0) return;
  auto jz = json::parse(z.output);
  for (const auto& x : jz["points"]) {
    std::vector<double> v = x;
    const double* y = &v[3];
    const double* q = &v[9];
    double worst = std::max({std::abs(v[6]), std::abs(v[7]), std::abs(v[8]), std::abs(q[1] * y[2] - q[2] * y[1]),
                             std::abs(q[2] * y[0] - q[0] * y[2]), std::abs(q[0] * y[1] - q[1] * y[0])});
    c.expect(worst <= 1e-10, "mu=0 point off p = 0, q x y = 0 by " + fmt(worst));
  }
  double omega = jz["omega_pullback_norm_max"];
  c.expect(omega < 1e-8, "mu=0 pullback norm " + fmt(omega));
  double hmin = jz["hamiltonian_range"][0];
  double hmax = jz["hamiltonian_range"][1];
  c.expect(hmax - hmin <= 1e-10, "H spread " + fmt(hmax - hmin));
  c.expect(std::abs(hmin + 1.0) <= 1e-10, "H value " + fmt(hmin));
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void property_suites(Check& c) {
  std::string filter = std::string(PRESYM_UNIT_TESTS) +
                       " --test-case='property:*,ladder idempotence' --minimal > /dev/null 2>&1";
  c.expect(std::system(filter.c_str()) == 0, "property suites in unit_tests failed");

  const auto dir = std::filesystem::temp_directory_path();
  const std::string bc = testsupport::problem_path("bounded_curvature.ocp");
  const char* runs[] = {"analyze", "symmetries", "reduce", "integrate --gauge zero --t1 0.5"};
  for (const char* sub : runs) {
    std::string outputs[2];
    for (int k = 0; k < 2; ++k) {
      auto path = dir / ("presym_accept_" + std::to_string(k));
      std::string cmd = std::string(PRESYM_CLI) + " " + sub + " --problem " + bc + " --seed 7 --out " + path.string();
      c.expect(std::system(cmd.c_str()) == 0, std::string(sub) + " failed");
      outputs[k] = slurp(path);
    }
    c.expect(!outputs[0].empty() && outputs[0] == outputs[1], std::string(sub) + " reruns differ");
  }
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<void(Check&)> body;
    double budget_s;
  };
  std::vector<Criterion> criteria = {
      {"1 regular pipeline", regular_pipeline, 1.0},
      {"2 singular detection", singular_detection, 10.0},
      {"3 noether suite", noether_suite, 0.0},
      {"4 reduction accounting", reduction_accounting, 0.0},
      {"5 property suites", property_suites, 0.0},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    Check c;
    auto start = std::chrono::steady_clock::now();
    try {
      cr.body(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (cr.budget_s > 0.0) c.expect(secs < cr.budget_s, "runtime " + fmt(secs) + " s over budget");
    bool ok = c.failures.empty();
    if (!ok) ++failed;
    std::printf("%s criterion %s (%.2f s)\n", ok ? "PASS" : "FAIL", cr.name, secs);
    for (const auto& f : c.failures) std::printf("    %s\n", f.c_str());
  }
  return failed == 0 ? 0 : 1;
}
