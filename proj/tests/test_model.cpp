#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"

using namespace mtl;

namespace {

SystemSpec single_component(double lambda, double omega) {
  SystemSpec s;
  s.dimension = 1;
  s.components = 1;
  s.lambdas = {lambda};
  s.omegas = {omega};
  s.terms.push_back({-0.5, {{2, 2}}});
  return s;
}

}  // namespace

TEST_CASE("gauge check on the quadratic system") {
  SystemSpec spec = test::shipped("quadratic_sync_1d").spec;
  const GaugeResult ok = validate_gauge(spec);
  CHECK(ok.ok);
  CHECK(ok.exact);
  CHECK(*gauge_phase_sum_exact(spec, spec.terms[1]) == Rational(0));

  MonomialTerm modulus{1.0, {{1, 1}, {0, 0}}};
  CHECK(gauge_phase_sum(spec, modulus) == 0.0);

  // u1^2 u2 instead of conj(u1)^2 u2.
  spec.terms[1].exponents = {{2, 0}, {1, 0}};
  const GaugeResult bad = validate_gauge(spec);
  REQUIRE_FALSE(bad.ok);
  REQUIRE(bad.violations.size() == 1);
  CHECK(bad.violations[0].term == 1);
  CHECK(*bad.violations[0].exact_mismatch == Rational(4));
}

TEST_CASE("gauge invariance count and fundamental frequency") {
  const SystemSpec quad = test::shipped("quadratic_sync_1d").spec;
  CHECK(gauge_invariance_count(quad) == 1);
  CHECK(*fundamental_frequency(quad) == Rational(1));
  const SystemSpec three = test::shipped("three_wave_1d").spec;
  CHECK(*fundamental_frequency(three) == Rational(1));

  SystemSpec decoupled;
  decoupled.dimension = 1;
  decoupled.components = 2;
  decoupled.lambdas = {1, 1};
  decoupled.omegas = {1, 1};
  decoupled.terms = {{-0.5, {{2, 2}, {0, 0}}}, {-0.5, {{0, 0}, {2, 2}}}};
  CHECK(gauge_invariance_count(decoupled) == 2);
}

TEST_CASE("homogeneity degrees") {
  const SystemSpec spec = test::shipped("three_wave_1d").spec;
  for (const auto& t : spec.terms) {
    int total = 0;
    for (int j = 0; j < spec.components; ++j) total += t.beta(j);
    CHECK(t.alpha() == total);
  }
  CHECK(spec.terms[0].diagonal_quadratic_component().value_or(-1) == 0);
}

TEST_CASE("mass of simple fields") {
  const SystemSpec spec = single_component(1.0, 2.0);
  const Grid g{1, 5.0, 16};
  Spectral sp(g);
  CHECK(mass(spec, sp, FieldState::zero(g, 1)) == 0.0);
  FieldState one = FieldState::zero(g, 1);
  for (auto& z : one.fields[0]) z = 1.0;
  CHECK(mass(spec, sp, one) == doctest::Approx(10.0).epsilon(1e-14));
}

TEST_CASE("hamiltonian of a plane wave") {
  SystemSpec spec = single_component(1.0, 1.0);
  spec.terms.clear();
  const Grid g{1, 5.0, 64};
  Spectral sp(g);
  CHECK(hamiltonian(spec, sp, FieldState::zero(g, 1)).total == 0.0);
  const double k = 2.0 * std::numbers::pi * 3.0 / 10.0;
  FieldState w = FieldState::zero(g, 1);
  for (std::size_t i = 0; i < g.size(); ++i) w.fields[0][i] = std::polar(1.0, k * g.position(i)[0]);
  CHECK(hamiltonian(spec, sp, w).kinetic == doctest::Approx(0.5 * k * k * 10.0).epsilon(1e-12));
}

TEST_CASE("stationary residual of the synchronous closed form") {
  const RunConfig cfg = test::shipped("quadratic_sync_1d", {"sigma=2"});
  const GroundState gs = compute_ground_state(cfg);
  const StationaryResidual r = stationary_residual(cfg.spec, *gs.spectral, gs.state.profiles, &gs.state.omega);
  CHECK(r.max_linf() <= 1e-10);

  std::vector<RealField> zero(2, RealField(gs.state.grid.size(), 0.0));
  CHECK(stationary_residual(cfg.spec, *gs.spectral, zero).max_linf() == 0.0);

  auto scaled = [&](double eps) {
    auto p = gs.state.profiles;
    for (auto& f : p)
      for (auto& x : f) x *= 1.0 + eps;
    return stationary_residual(cfg.spec, *gs.spectral, p, &gs.state.omega).max_linf();
  };
  const double r1 = scaled(1e-4), r2 = scaled(2e-4);
  CHECK(r2 / r1 == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("nonlinear gradient matches a finite difference of the density") {
  const SystemSpec spec = test::shipped("three_wave_1d").spec;
  const Complex u[3] = {{0.3, -0.2}, {0.7, 0.1}, {-0.4, 0.5}};
  Complex g[3];
  nonlinear_gradient_point(spec, u, g);
  auto density = [&](const Complex* v) {
    std::vector<ComplexField> f(3);
    for (int j = 0; j < 3; ++j) f[j] = {v[j]};
    double n = 0.0;
    for (const auto& t : spec.terms) n += term_density(t, f)[0];
    return n;
  };
  const double h = 1e-6;
  for (int j = 0; j < 3; ++j) {
    Complex a[3] = {u[0], u[1], u[2]}, b[3] = {u[0], u[1], u[2]};
    a[j] += h;
    b[j] -= h;
    const double dre = (density(a) - density(b)) / (2 * h);
    a[j] = u[j] + Complex(0, h);
    b[j] = u[j] - Complex(0, h);
    const double dim = (density(a) - density(b)) / (2 * h);
    // d/d conj(u) = (d/dRe + i d/dIm) / 2
    CHECK(std::abs(g[j] - 0.5 * Complex(dre, dim)) < 1e-8);
  }
}
