#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "mtl/error.hpp"

using namespace mtl;

namespace {

const double kA = 1.0 / std::sqrt(3.0);

}  // namespace

TEST_CASE("sech^2 closed form") {
  const Grid g = default_grid(1, 1.0);
  Spectral sp(g);
  const RealField q = closed_form_1d(g, 1.0, kA);
  CHECK(q[g.points / 2] == doctest::Approx(1.5 * std::sqrt(3.0)).epsilon(1e-14));
  RealField q2(q.size()), q3(q.size()), r(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    q2[i] = q[i] * q[i];
    q3[i] = q2[i] * q[i];
  }
  CHECK(sp.integrate(q2) == doctest::Approx(18.0).epsilon(1e-12));
  CHECK(sp.integrate(q3) == doctest::Approx(108.0 * std::sqrt(3.0) / 5.0).epsilon(1e-12));
  const RealField lap = sp.laplacian(q);
  double worst = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) worst = std::max(worst, std::abs(-q[i] + lap[i] + kA * q2[i]));
  CHECK(worst <= 1e-10);
}

TEST_CASE("scalar Petviashvili converges to the closed form") {
  const Grid g = default_grid(1, 1.0);
  Spectral sp(g);
  const ScalarSolution s = petviashvili_scalar(sp, 1.0, kA, 2);
  const RealField q = closed_form_1d(g, 1.0, kA);
  double worst = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) worst = std::max(worst, std::abs(q[i] - s.profile[i]));
  CHECK(worst <= 1e-8);
  CHECK(std::abs(s.factor - 1.0) <= 1e-13);
  REQUIRE(s.factor_history.size() > 10);
  // Monotone approach to 1 after the transient.
  const std::size_t tail = s.factor_history.size() / 2;
  for (std::size_t i = tail + 1; i < s.factor_history.size(); ++i)
    CHECK(std::abs(s.factor_history[i] - 1.0) <= std::abs(s.factor_history[i - 1] - 1.0) + 1e-14);
}

TEST_CASE("Cazenave-type identity in three dimensions") {
  const double omega = 2.0, a = (std::sqrt(3.0) + std::sqrt(5.0)) / 6.0;
  const Grid g = default_grid(3, omega);
  Spectral sp(g);
  const ScalarSolution s = petviashvili_scalar(sp, omega, a, 2);
  RealField q2(s.profile.size()), q3(s.profile.size());
  for (std::size_t i = 0; i < q2.size(); ++i) {
    q2[i] = s.profile[i] * s.profile[i];
    q3[i] = q2[i] * s.profile[i];
  }
  CHECK(cazenave_residual(3, omega, a, sp.integrate(q2), sp.integrate(q3)) <= 1e-6);
}

TEST_CASE("sphere maximization") {
  SUBCASE("quadratic system: x^2 y") {
    const SynchronousForm f = synchronous_form(test::shipped("quadratic_sync_1d").spec);
    CHECK(f.degree == 3);
    CHECK(f.frequency == doctest::Approx(1.0));
    const SphereMaximum m = maximize_on_sphere(f.sphere, 2, 3);
    CHECK(std::abs(m.best.point[0]) == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-12));
    CHECK(m.best.point[1] == doctest::Approx(kA).epsilon(1e-12));
    CHECK(m.best.coupling == doctest::Approx(kA).epsilon(1e-12));
    CHECK(m.maximizers.size() == 2);
  }
  SUBCASE("three-wave system: y z^2 + 2 x y z") {
    const SynchronousForm f = synchronous_form(test::shipped("three_wave_1d").spec);
    const SphereMaximum m = maximize_on_sphere(f.sphere, 3, 3);
    // (sqrt3 + sqrt15)/9 at (sqrt((5-sqrt5)/15), 1/sqrt3, sqrt((5+sqrt5)/15)).
    CHECK(m.best.value == doctest::Approx((std::sqrt(3.0) + std::sqrt(15.0)) / 9.0).epsilon(1e-13));
    CHECK(std::abs(m.best.point[0]) == doctest::Approx(std::sqrt((5.0 - std::sqrt(5.0)) / 15.0)).epsilon(1e-10));
    CHECK(std::abs(m.best.point[1]) == doctest::Approx(kA).epsilon(1e-10));
    CHECK(std::abs(m.best.point[2]) == doctest::Approx(std::sqrt((5.0 + std::sqrt(5.0)) / 15.0)).epsilon(1e-10));
  }
  SUBCASE("zero polynomial") {
    const SphereMaximum m = maximize_on_sphere({}, 2, 3);
    CHECK(m.best.value == 0.0);
    CHECK(m.degenerate);
  }
}

TEST_CASE("synchronous construction and identities") {
  const test::Solved s = test::solve("quadratic_sync_1d");
  CHECK(s.gs.state.max_residual() <= 1e-10);
  CHECK(first_integral_check(s.cfg.spec, s.gs.state).max() <= 1e-6);
  CHECK(pohozaev_check(s.cfg.spec, *s.gs.spectral, s.gs.state).residual <= 1e-6);
  // P = sqrt(2/3) q, Q = q / sqrt3 with int q^2 = 18.
  CHECK(s.gs.state.mass_integrals[0] == doctest::Approx(12.0).epsilon(1e-10));
  CHECK(s.gs.state.mass_integrals[1] == doctest::Approx(6.0).epsilon(1e-10));
  CHECK(cache_discrepancy(s.cfg.spec, *s.gs.spectral, s.gs.state) <= 1e-14);
}

TEST_CASE("coupled Petviashvili") {
  SUBCASE("synchronous profile is a fixed point") {
    const test::Solved s = test::solve("quadratic_sync_1d", {"sigma=2"});
    const CoupledSolution c = petviashvili_coupled(s.cfg.spec, *s.gs.spectral, s.gs.state.omega, s.gs.state.profiles);
    CHECK(c.iterations <= 5);
    CHECK(c.state.max_residual() <= 1e-8);
  }
  SUBCASE("zero guess is rejected") {
    const RunConfig cfg = test::shipped("quadratic_sync_1d");
    const Grid g = cfg.resolve_grid();
    Spectral sp(g);
    std::vector<RealField> zero(2, RealField(g.size(), 0.0));
    CHECK_THROWS_AS(petviashvili_coupled(cfg.spec, sp, cfg.spec.omegas, zero), PreconditionError);
  }
  SUBCASE("Rabi system from a two-bump guess") {
    const test::Solved s = test::solve("rabi_2d", {"grid.points=256", "grid.half_width=16"});
    CHECK(s.gs.state.max_residual() <= 1e-8);
    CHECK(s.gs.state.mass_integrals[0] > 0.0);
    CHECK(s.gs.state.mass_integrals[1] > 0.0);
    CHECK(first_integral_check(s.cfg.spec, s.gs.state).max() <= 1e-5);
  }
}

TEST_CASE("identities on trivial data") {
  const RunConfig cfg = test::shipped("quadratic_sync_1d");
  const Grid g{1, 10.0, 64};
  Spectral sp(g);
  const BoundState zero = make_bound_state(cfg.spec, sp, std::vector<RealField>(2, RealField(g.size(), 0.0)), cfg.spec.omegas);
  CHECK(zero.max_residual() == 0.0);
  CHECK(pohozaev_check(cfg.spec, sp, zero).residual == 0.0);
  for (double gi : zero.gradient_integrals) CHECK(gi == 0.0);
}

TEST_CASE("Pohozaev in the critical configuration") {
  const RunConfig cfg = test::shipped(
      "cubic_3d", {"system.dimension=2", "sigma=1/3", "mu=0", "system.term.mass_u.coefficient=0", "grid.half_width=20", "grid.points=256"});
  const GroundState gs = compute_ground_state(cfg);
  const PohozaevResult p = pohozaev_check(cfg.spec, *gs.spectral, gs.state);
  CHECK(p.critical);
  CHECK(p.critical_ratio <= 1e-6);
}
