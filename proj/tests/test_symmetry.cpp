#include <doctest.h>

#include "presym/constraint_algo.hpp"
#include "presym/sampling.hpp"
#include "presym/symmetry.hpp"
#include "support.hpp"

using namespace presym;

namespace {

ControlProblem one_state(const char* f, const char* l) {
  ControlProblem p;
  p.states = {"q1"};
  p.controls = {"u1"};
  p.dynamics = {parse(f)};
  p.lagrangian = parse(l);
  return p;
}

SymmetryGenerator shift() { return {"shift", {Expr::constant(1.0)}, {Expr::constant(0.0)}}; }

const SymmetryGenerator& generator(const PontryaginSystem& sys, const std::string& name) {
  for (const auto& g : sys.problem.symmetries)
    if (g.name == name) return g;
  throw std::runtime_error("no generator " + name);
}

bool value_equal(const Expr& a, const Expr& b, const std::vector<std::string>& layout, double tol = 1e-12) {
  for (std::uint64_t k = 0; k < 100; ++k) {
    auto x = testsupport::box_point(47, k, layout);
    double va = testsupport::value(a, layout, x);
    double vb = testsupport::value(b, layout, x);
    if (std::abs(va - vb) > tol * (1.0 + std::abs(vb))) return false;
  }
  return true;
}

// rotation of the bounded-curvature problem without rotating u
SymmetryGenerator rotation_without_zeta() {
  return {"r12_no_zeta",
          {parse("-x2"), parse("x1"), parse("0"), parse("-y2"), parse("y1"), parse("0")},
          {parse("0"), parse("0"), parse("0")}};
}

}  // namespace

TEST_CASE("lie derivative along the projection") {
  auto lq = build_pontryagin(one_state("u1", "0.5*u1^2"));
  for (const auto& c : lie_derivative_along_projection(shift(), lq)) CHECK(c.str() == "0");

  auto lin = build_pontryagin(one_state("q1", "0"));
  CHECK(lie_derivative_along_projection(shift(), lin).at(0).str() == "1");

  auto bc = testsupport::fixture_system("bounded_curvature.ocp");
  std::vector<std::string> vars = bc.problem.states;
  vars.insert(vars.end(), bc.problem.controls.begin(), bc.problem.controls.end());
  Domain d;
  for (const auto& c : lie_derivative_along_projection(generator(bc, "r12"), bc))
    CHECK(numerically_zero(c, vars, 100, 1e-10, d));
}

TEST_CASE("flow conjugation oracle for a non-symmetry") {
  // X = q1 d/dq1, Z = d/dq1: [Z, X] = d/dq1, so the shifted flow and the
  // flow of the shifted point differ at first order in s by s*t.
  auto lin = build_pontryagin(one_state("q1", "0"));
  auto comp = lie_derivative_along_projection(shift(), lin).at(0);
  const double t = 1e-3;
  const double s = 1e-3;
  const double q0 = 0.4;
  auto flow = [](double q, double time) { return q * std::exp(time); };
  double defect = (flow(q0 + s, t) - (flow(q0, t) + s)) / (s * t);
  CHECK(defect == doctest::Approx(eval(comp, {{"q1", q0}})).epsilon(1e-2));
}

TEST_CASE("check_symmetry") {
  Domain d;
  auto bc = testsupport::fixture_system("bounded_curvature.ocp");
  for (const auto& g : bc.problem.symmetries) {
    auto rep = check_symmetry(g, bc, d);
    CHECK_MESSAGE(rep.symmetry, g.name);
    for (double n : rep.lie_residual_norms) CHECK(n < 1e-10);
    CHECK(rep.lagrangian_residual_norm < 1e-10);
  }
  auto lq = build_pontryagin(one_state("u1", "0.5*u1^2"));
  auto rep = check_symmetry(shift(), lq, d);
  CHECK(rep.symmetry);
  CHECK(rep.symbolic);
  CHECK(noether_momentum(shift(), lq).expr.str() == "p1");

  auto quad = build_pontryagin(one_state("u1", "q1^2"));
  auto bad = check_symmetry(shift(), quad, d);
  CHECK_FALSE(bad.symmetry);
  CHECK(bad.lagrangian_residual.str() == "2*q1");

  CHECK_FALSE(check_symmetry(rotation_without_zeta(), bc, d).symmetry);
}

TEST_CASE("lift") {
  auto lq = build_pontryagin(one_state("u1", "0.5*u1^2"));
  for (const auto& c : lift(shift(), lq).p) CHECK(c.str() == "0");

  auto bc = testsupport::fixture_system("bounded_curvature.ocp");
  auto g = lift(generator(bc, "r12"), bc);
  const char* expected[] = {"-p2", "p1", "0", "-p5", "p4", "0"};
  for (int i = 0; i < 6; ++i) CHECK(g.p[i].str() == expected[i]);
  CHECK(g.components().size() == bc.dimension());

  ControlProblem two;
  two.states = {"q1", "q2"};
  two.controls = {"u1"};
  two.dynamics = {parse("u1"), parse("0")};
  two.lagrangian = parse("0");
  auto sys2 = build_pontryagin(two);
  SymmetryGenerator linear{"lin", {parse("q2"), parse("-q1")}, {parse("0")}};
  auto l2 = lift(linear, sys2);
  CHECK(l2.p[0].str() == "p2");
  CHECK(l2.p[1].str() == "-p1");
}

TEST_CASE("property: lift is linear in the generator") {
  auto bc = testsupport::fixture_system("bounded_curvature.ocp");
  const auto& z1 = generator(bc, "r23");
  const auto& z2 = generator(bc, "r31");
  const double a = -0.75;
  SymmetryGenerator comb{"comb", {}, {}};
  for (std::size_t i = 0; i < z1.xi.size(); ++i) comb.xi.push_back(Expr::constant(a) * z1.xi[i] + z2.xi[i]);
  for (std::size_t i = 0; i < z1.zeta.size(); ++i) comb.zeta.push_back(Expr::constant(a) * z1.zeta[i] + z2.zeta[i]);
  auto lc = lift(comb, bc).components();
  auto l1 = lift(z1, bc).components();
  auto l2 = lift(z2, bc).components();
  const auto layout = bc.layout();
  for (std::size_t k = 0; k < lc.size(); ++k) CHECK(value_equal(lc[k], Expr::constant(a) * l1[k] + l2[k], layout));
}

TEST_CASE("noether momenta") {
  auto bc = testsupport::fixture_system("bounded_curvature.ocp");
  const auto layout = bc.layout();
  CHECK(noether_momentum(generator(bc, "t1"), bc).expr.str() == "p1");
  CHECK(noether_momentum(generator(bc, "t2"), bc).expr.str() == "p2");
  CHECK(noether_momentum(generator(bc, "t3"), bc).expr.str() == "p3");
  // q-costates of y are p4..p6
  CHECK(value_equal(noether_momentum(generator(bc, "r12"), bc).expr, parse("x1*p2 - x2*p1 + y1*p5 - y2*p4"), layout));
  CHECK(value_equal(noether_momentum(generator(bc, "r23"), bc).expr, parse("x2*p3 - x3*p2 + y2*p6 - y3*p5"), layout));
  CHECK(value_equal(noether_momentum(generator(bc, "r31"), bc).expr, parse("x3*p1 - x1*p3 + y3*p4 - y1*p6"), layout));
  SymmetryGenerator zero{"zero", std::vector<Expr>(6, Expr::constant(0.0)), std::vector<Expr>(3, Expr::constant(0.0))};
  CHECK(noether_momentum(zero, bc).expr.str() == "0");
}

TEST_CASE("lifted hamiltonian residual") {
  auto lq = build_pontryagin(one_state("u1", "0.5*u1^2"));
  CHECK(lifted_hamiltonian_residual(shift(), lq).str() == "0");

  auto bc = testsupport::fixture_system("bounded_curvature.ocp");
  Domain d;
  CHECK(numerically_zero(lifted_hamiltonian_residual(generator(bc, "r23"), bc), bc.layout(), 100, 1e-10, d));

  // H = p1*u1 - q1^2, so d/dq1 applied to H gives -2*q1
  auto quad = build_pontryagin(one_state("u1", "q1^2"));
  Expr r = lifted_hamiltonian_residual(shift(), quad);
  CHECK(value_equal(r, parse("-2*q1"), quad.layout()));
}

TEST_CASE("property: the two symmetry criteria agree on a 10-generator corpus") {
  Domain d;
  auto bc = testsupport::fixture_system("bounded_curvature.ocp");
  auto lq = testsupport::fixture_system("lq.ocp");
  auto broken = testsupport::fixture_system("broken_generators.ocp");
  std::vector<std::pair<const PontryaginSystem*, SymmetryGenerator>> corpus;
  for (const auto& g : bc.problem.symmetries) corpus.emplace_back(&bc, g);
  corpus.emplace_back(&lq, lq.problem.symmetries.at(0));
  corpus.emplace_back(&broken, generator(broken, "shift1"));
  corpus.emplace_back(&broken, generator(broken, "rotate"));
  corpus.emplace_back(&bc, rotation_without_zeta());
  REQUIRE(corpus.size() == 10);

  int non_symmetries = 0;
  for (const auto& [sys, g] : corpus) {
    bool by_definition = check_symmetry(g, *sys, d).symmetry;
    bool by_lift = numerically_zero(lifted_hamiltonian_residual(g, *sys), sys->layout(), 100, 1e-10, d);
    CHECK_MESSAGE(by_definition == by_lift, g.name);
    if (!by_definition) ++non_symmetries;
  }
  CHECK(non_symmetries == 3);
}

TEST_CASE("property: momenta commute with H on the primary constraint set") {
  Domain d;
  auto bc = testsupport::fixture_system("bounded_curvature.ocp");
  auto ctx = PoissonContext::of(bc);
  std::vector<Expr> m1 = bc.problem.holonomic;
  m1.insert(m1.end(), bc.chi.begin(), bc.chi.end());
  SamplingOptions so;
  so.count = 50;
  auto pts = sample_feasible(ConstraintProjector(m1, bc.layout()), d, so).points;
  for (const auto& g : bc.problem.symmetries) {
    Expr b = poisson_bracket(noether_momentum(g, bc).expr, bc.hamiltonian, ctx);
    CHECK_MESSAGE(zero_on_points(b, bc.layout(), pts, 1e-9).zero, g.name);
  }
}

TEST_CASE("property: Lie derivative along the projection as a commutator") {
  // (L_Z X)(f) = Z(X(f o pi)) - X((Z0 f) o pi) for functions f(q)
  auto check = [](const PontryaginSystem& sys, const SymmetryGenerator& z) {
    const auto& q = sys.problem.states;
    const auto& u = sys.problem.controls;
    std::vector<std::string> vars = q;
    vars.insert(vars.end(), u.begin(), u.end());
    testsupport::ExprGenerator gen(q, 53);
    auto apply_x = [&](const Expr& g) {
      Expr acc = Expr::constant(0.0);
      for (std::size_t i = 0; i < q.size(); ++i) acc = acc + sys.problem.dynamics[i] * diff(g, q[i]);
      return acc;
    };
    auto apply_z = [&](const Expr& g) {
      Expr acc = Expr::constant(0.0);
      for (std::size_t i = 0; i < q.size(); ++i) acc = acc + z.xi[i] * diff(g, q[i]);
      for (std::size_t a = 0; a < u.size(); ++a) acc = acc + z.zeta[a] * diff(g, u[a]);
      return acc;
    };
    auto lzx = lie_derivative_along_projection(z, sys);
    for (int k = 0; k < 5; ++k) {
      Expr f = gen.next(3);
      Expr lhs = Expr::constant(0.0);
      for (std::size_t i = 0; i < q.size(); ++i) lhs = lhs + lzx[i] * diff(f, q[i]);
      Expr z0f = Expr::constant(0.0);
      for (std::size_t i = 0; i < q.size(); ++i) z0f = z0f + z.xi[i] * diff(f, q[i]);
      Expr rhs = apply_z(apply_x(f)) - apply_x(z0f);
      for (std::uint64_t s = 0; s < 100; ++s) {
        auto x = testsupport::box_point(59, s, vars);
        double l = testsupport::value(lhs, vars, x);
        double r = testsupport::value(rhs, vars, x);
        REQUIRE(std::abs(l - r) <= 1e-8 * (1.0 + std::abs(r)));
      }
    }
  };
  auto bc = testsupport::fixture_system("bounded_curvature.ocp");
  check(bc, generator(bc, "r12"));
  check(bc, rotation_without_zeta());
  auto broken = testsupport::fixture_system("broken_generators.ocp");
  check(broken, generator(broken, "rotate"));
}
