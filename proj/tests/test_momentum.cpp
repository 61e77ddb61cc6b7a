#include <doctest.h>

#include <Eigen/Dense>

#include "presym/constraint_algo.hpp"
#include "presym/errors.hpp"
#include "presym/momentum.hpp"
#include "support.hpp"

using namespace presym;

namespace {

MomentumMap fixture_map(const PontryaginSystem& sys) {
  return build_momentum_map(sys.problem.symmetries, sys, Domain{});
}

SampleSet level_points(const MomentumMap& j, const PontryaginSystem& sys, const std::vector<double>& mu,
                       std::uint64_t seed, std::size_t count = 12) {
  SamplingOptions so;
  so.count = count;
  so.seed = seed;
  return sample_level_set(j, sys, mu, {}, Domain{}, so);
}

// rank of the finite-difference Jacobian of `eqs`, independent of the
// symbolic gradients used by the library
int fd_rank(const std::vector<Expr>& eqs, const std::vector<std::string>& layout, const std::vector<double>& x) {
  Eigen::MatrixXd jac(static_cast<Eigen::Index>(eqs.size()), static_cast<Eigen::Index>(layout.size()));
  for (std::size_t r = 0; r < eqs.size(); ++r)
    for (std::size_t c = 0; c < layout.size(); ++c)
      jac(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = testsupport::fd_partial(eqs[r], layout, x, c);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac);
  const auto& s = svd.singularValues();
  int rank = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k)
    if (s(k) > 1e-6 * s(0)) ++rank;
  return rank;
}

}  // namespace

TEST_CASE("build_momentum_map") {
  auto bc = testsupport::fixture_system("bounded_curvature.ocp");
  auto j = fixture_map(bc);
  REQUIRE(j.size() == 6);
  CHECK(j.components[0].expr.str() == "p1");
  CHECK(j.components[1].expr.str() == "p2");
  CHECK(j.components[2].expr.str() == "p3");
  CHECK(j.components[3].generator == "r12");
  CHECK(j.lifts.size() == 6);

  auto lq = testsupport::fixture_system("lq.ocp");
  auto single = fixture_map(lq);
  REQUIRE(single.size() == 1);
  CHECK(single.components[0].expr.str() == "p1");

  std::vector<SymmetryGenerator> none;
  CHECK_THROWS_AS(build_momentum_map(none, lq, Domain{}), PreconditionError);

  auto broken = testsupport::fixture_system("broken_generators.ocp");
  CHECK_THROWS_AS(fixture_map(broken), PreconditionError);
  std::vector<SymmetryGenerator> only_shift2 = {broken.problem.symmetries.at(1)};
  CHECK(build_momentum_map(only_shift2, broken, Domain{}).components.at(0).expr.str() == "p2");
}

TEST_CASE("sample_level_set at a generic level") {
  auto bc = testsupport::fixture_system("bounded_curvature.ocp");
  auto j = fixture_map(bc);
  auto mu = auto_mu(j, bc, {}, Domain{}, 0);
  auto set = level_points(j, bc, mu, 1, 16);
  REQUIRE(set.points.size() == 16);
  const auto layout = bc.layout();
  for (const auto& x : set.points) {
    auto jx = evaluate(j, bc, x);
    for (std::size_t k = 0; k < mu.size(); ++k) CHECK(std::abs(jx[k] - mu[k]) <= 1e-10);
    for (const auto& h : bc.problem.holonomic) CHECK(std::abs(testsupport::value(h, layout, x)) <= 1e-10);
  }
  CHECK_THROWS_AS(sample_level_set(j, bc, std::vector<double>{1.0}, {}, Domain{}, {}), InputError);
}

TEST_CASE("sample_level_set at mu = 0") {
  auto bc = testsupport::fixture_system("bounded_curvature.ocp");
  auto j = fixture_map(bc);
  auto set = level_points(j, bc, std::vector<double>(6, 0.0), 5, 16);
  const auto layout = bc.layout();
  for (const auto& x : set.points) {
    // layout: x1..x3, y1..y3, p1..p6, u1..u3; q = (p4, p5, p6)
    const double* y = &x[3];
    const double* q = &x[9];
    for (int i = 6; i < 9; ++i) CHECK(std::abs(x[i]) <= 1e-10);
    CHECK(std::abs(q[1] * y[2] - q[2] * y[1]) <= 1e-10);
    CHECK(std::abs(q[2] * y[0] - q[0] * y[2]) <= 1e-10);
    CHECK(std::abs(q[0] * y[1] - q[1] * y[0]) <= 1e-10);
    CHECK(testsupport::value(bc.hamiltonian, layout, x) == doctest::Approx(-1.0).epsilon(1e-10));
  }
}

TEST_CASE("sample_level_set reports an infeasible level") {
  auto lq = testsupport::fixture_system("lq.ocp");
  auto j = fixture_map(lq);
  Domain capped;
  capped.set("p1", {-1.0, 1.0});
  SamplingOptions so;
  so.count = 4;
  try {
    sample_level_set(j, lq, std::vector<double>{2.0}, {}, capped, so);
    FAIL("expected SamplingError");
  } catch (const SamplingError& e) {
    CHECK(e.found() == 0);
    CHECK(e.requested() == 4);
    CHECK(e.attempts() == 4 * 200);
  }
}

TEST_CASE("rank_analysis at a generic level") {
  auto bc = testsupport::fixture_system("bounded_curvature.ocp");
  auto j = fixture_map(bc);
  auto mu = auto_mu(j, bc, {}, Domain{}, 0);
  auto set = level_points(j, bc, mu, 1);
  auto rep = rank_analysis(j, bc, set.points, {}, mu);
  CHECK(rep.ambient_dim == 15);
  CHECK(rep.constraint_count == 8);
  CHECK(rep.constant_rank);
  CHECK(rep.weakly_regular_evidence);
  std::vector<Expr> eqs = j.expressions();
  eqs.insert(eqs.end(), bc.problem.holonomic.begin(), bc.problem.holonomic.end());
  for (std::size_t k = 0; k < rep.per_point.size(); ++k) {
    const auto& d = rep.per_point[k];
    CHECK(d.jacobian_rank == fd_rank(eqs, bc.layout(), set.points[k]));
    CHECK(d.jacobian_rank == 8);
    CHECK(d.momentum_rank == 6);
    CHECK(d.levelset_dim == 7);
    CHECK(d.reduced_dim == d.levelset_dim - d.orbit_tangent_dim);
    CHECK(d.reduced_dim >= 0);
    CHECK(d.levelset_dim <= rep.ambient_dim);
    CHECK(d.orbit_tangent_dim <= d.generator_rank);
  }
}

TEST_CASE("rank_analysis at mu = 0: the pulled-back form vanishes") {
  auto bc = testsupport::fixture_system("bounded_curvature.ocp");
  auto j = fixture_map(bc);
  std::vector<double> mu(6, 0.0);
  auto set = level_points(j, bc, mu, 5);
  auto rep = rank_analysis(j, bc, set.points, {}, mu);
  CHECK(rep.omega_norm_max < 1e-8);
  for (const auto& d : rep.per_point) CHECK(d.omega_kernel_dim == d.levelset_dim);
  CHECK(rep.h_max - rep.h_min <= 1e-10);
}

TEST_CASE("rank_analysis for a single translation") {
  auto lq = testsupport::fixture_system("lq.ocp");
  auto j = fixture_map(lq);
  std::vector<double> mu = {0.4};
  auto set = level_points(j, lq, mu, 6);
  auto rep = rank_analysis(j, lq, set.points, {}, mu);
  CHECK(rep.dims.jacobian_rank == 1);
  CHECK(rep.dims.levelset_dim == rep.ambient_dim - 1);
  CHECK(rep.constant_rank);
  std::vector<std::vector<double>> none;
  CHECK_THROWS_AS(rank_analysis(j, lq, none, {}, mu), PreconditionError);
}

TEST_CASE("tangency_check") {
  Domain d;
  auto lq = testsupport::fixture_system("lq.ocp");
  auto jl = fixture_map(lq);
  auto pts = level_points(jl, lq, {0.4}, 7).points;
  CHECK(tangency_check(jl, lq, pts).at(0) <= 1e-12);

  auto bc = testsupport::fixture_system("bounded_curvature.ocp");
  auto jb = fixture_map(bc);
  std::vector<Expr> m1 = bc.chi;
  SamplingOptions so;
  so.count = 16;
  auto on_m1 = sample_level_set(jb, bc, auto_mu(jb, bc, m1, d, 8), m1, d, so).points;
  for (double r : tangency_check(jb, bc, on_m1)) CHECK(r <= 1e-9);

  // shift1 is refused by build_momentum_map; assemble it by hand
  auto broken = testsupport::fixture_system("broken_generators.ocp");
  MomentumMap forced;
  forced.components.push_back(noether_momentum(broken.problem.symmetries.at(0), broken));
  forced.lifts.push_back(lift(broken.problem.symmetries.at(0), broken));
  std::vector<std::vector<double>> box;
  for (std::uint64_t k = 0; k < 20; ++k) box.push_back(testsupport::box_point(61, k, broken.layout()));
  CHECK(tangency_check(forced, broken, box).at(0) > 0.1);
}

TEST_CASE("property: pullback kernel dimension does not depend on the sampling seed") {
  for (const char* name : {"bounded_curvature.ocp", "lq.ocp"}) {
    auto sys = testsupport::fixture_system(name);
    auto j = fixture_map(sys);
    auto mu = auto_mu(j, sys, {}, Domain{}, 11);
    auto a = rank_analysis(j, sys, level_points(j, sys, mu, 21).points, {}, mu);
    auto b = rank_analysis(j, sys, level_points(j, sys, mu, 22).points, {}, mu);
    CHECK_MESSAGE(a.dims.omega_kernel_dim == b.dims.omega_kernel_dim, name);
    CHECK(a.constant_rank);
    CHECK(b.constant_rank);
  }
}
