#include <doctest.h>

#include <cmath>

#include "helpers.hpp"

using namespace mtl;

namespace {

FieldState gaussian(const Grid& g, int components, double amplitude, double width) {
  FieldState s = FieldState::zero(g, components);
  for (int j = 0; j < components; ++j)
    for (std::size_t i = 0; i < g.size(); ++i)
      s.fields[j][i] = amplitude * std::exp(-g.radius_squared(i) / (width * width)) * std::polar(1.0, 0.2 * j);
  return s;
}

SystemSpec scalar_cubic(int d) {
  SystemSpec s;
  s.dimension = d;
  s.components = 1;
  s.lambdas = {1};
  s.omegas = {1};
  s.omegas_exact = {Rational(1)};
  s.terms.push_back({-0.5, {{2, 2}}});
  return s;
}

double second_moment(const Spectral& sp, const ComplexField& u) {
  const Grid& g = sp.grid();
  RealField f(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) f[i] = g.radius_squared(i) * std::norm(u[i]);
  return sp.integrate(f);
}

}  // namespace

TEST_CASE("conservation on a short run") {
  const RunConfig cfg = test::shipped("quadratic_sync_1d", {"sigma=2", "grid.points=512"});
  const Grid g = cfg.resolve_grid();
  Spectral sp(g);
  EvolveOptions o;
  o.final_time = 1.0;
  o.dt = 1e-3;
  o.sample_every = 100;
  const SimulationTrace tr = evolve(cfg.spec, sp, gaussian(g, 2, 1.0, 2.0), o);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    CHECK(tr.total_mass[i] == doctest::Approx(tr.total_mass[0]).epsilon(1e-12));
    CHECK(tr.hamiltonian[i] == doctest::Approx(tr.hamiltonian[0]).epsilon(1e-7));
  }
}

TEST_CASE("Strang splitting is second order") {
  const SystemSpec spec = test::shipped("quadratic_sync_1d", {"sigma=2"}).spec;
  const Grid g{1, 20.0, 256};
  Spectral sp(g);
  const FieldState u0 = gaussian(g, 2, 1.0, 2.0);
  FieldState ref = u0;
  for (int i = 0; i < 2000; ++i) yoshida_step(spec, sp, ref, 2.5e-4);
  auto error = [&](int steps) {
    FieldState s = u0;
    for (int i = 0; i < steps; ++i) strang_step(spec, sp, s, 0.5 / steps);
    double e = 0.0;
    for (int j = 0; j < 2; ++j)
      for (std::size_t i = 0; i < g.size(); ++i) e = std::max(e, std::abs(s.fields[j][i] - ref.fields[j][i]));
    return e;
  };
  const double e1 = error(50), e2 = error(100);
  CHECK(std::log2(e1 / e2) >= 1.9);
}

TEST_CASE("free evolution spreads a Gaussian exactly") {
  SystemSpec spec = scalar_cubic(1);
  spec.terms.clear();
  const Grid g{1, 40.0, 1024};
  Spectral sp(g);
  const FieldState u0 = gaussian(g, 1, 1.0, 1.5);
  EvolveOptions o;
  o.final_time = 2.0;
  o.dt = 1e-2;
  o.sample_every = 200;
  FieldState u1;
  const SimulationTrace tr = evolve(spec, sp, u0, o, nullptr, &u1);
  // V(t) = V(0) + 4 t^2 int |grad u0|^2 for real data.
  const double expected = second_moment(sp, u0.fields[0]) + 4.0 * 4.0 * sp.gradient_norm_squared(u0.fields[0]);
  CHECK(second_moment(sp, u1.fields[0]) == doctest::Approx(expected).epsilon(1e-10));
  CHECK(blowup_monitor(spec, tr).empty());
}

TEST_CASE("blow-up flag on negative-energy data") {
  const SystemSpec spec = scalar_cubic(2);
  CHECK(blowup_hypothesis(spec));
  const Grid g{2, 8.0, 256};
  Spectral sp(g);
  const FieldState u0 = gaussian(g, 1, 4.0, 1.0);
  REQUIRE(hamiltonian(spec, sp, u0).total < 0.0);
  EvolveOptions o;
  o.final_time = 0.05;
  o.dt = 1e-4;
  o.sample_every = 20;
  o.adaptive = false;
  const SimulationTrace tr = evolve(spec, sp, u0, o);
  int blowup = -1, loss = -1;
  for (int i = 0; i < static_cast<int>(tr.events.size()); ++i) {
    if (tr.events[i].kind == EventKind::BlowupSuspected && blowup < 0) blowup = i;
    if (tr.events[i].kind == EventKind::ResolutionLoss && loss < 0) loss = i;
  }
  REQUIRE(blowup >= 0);
  if (loss >= 0) CHECK(tr.events[blowup].time <= tr.events[loss].time);
}

TEST_CASE("bound state is stationary up to its phase") {
  const test::Solved s = test::solve("quadratic_sync_1d", {"sigma=2"});
  EvolveOptions o;
  o.final_time = 2.0;
  o.dt = 1e-3;
  o.sample_every = 100;
  o.integrator = Integrator::Yoshida4;
  const SimulationTrace tr = evolve(s.cfg.spec, *s.gs.spectral,
                                    FieldState::from_real(s.gs.state.grid, s.gs.state.profiles), o, &s.gs.state);
  CHECK(test::max_abs(tr.orbit_distance) <= 1e-8);
  CHECK(blowup_monitor(s.cfg.spec, tr).empty());
  CHECK(tr.events.empty());
}

TEST_CASE("orbit distance") {
  const test::Solved s = test::solve("quadratic_sync_1d", {"sigma=40"});
  const Spectral& sp = *s.gs.spectral;
  const BoundState& bs = s.gs.state;
  const double period = orbit_period(s.cfg.spec);
  CHECK(period == doctest::Approx(2.0 * std::acos(-1.0)));

  const OrbitDistance self = orbit_distance(sp, FieldState::from_real(bs.grid, bs.profiles), bs, period);
  CHECK(self.distance <= 1e-12);
  CHECK(std::remainder(self.theta, period) == doctest::Approx(0.0).epsilon(1e-10));

  const std::array<double, 3> y{12 * bs.grid.spacing(), 0, 0};
  const OrbitDistance moved = orbit_distance(sp, orbit_point(sp, bs, 0.7, y), bs, period);
  CHECK(moved.distance <= 1e-10);
  CHECK(std::fmod(moved.theta + period, period) == doctest::Approx(0.7).epsilon(1e-8));
  CHECK(std::abs(moved.shift[0]) == doctest::Approx(y[0]).epsilon(1e-8));

  // Real even bump: orthogonal to the gauge and translation tangents.
  const double eps = 1e-3;
  RealField bump(bs.grid.size());
  for (std::size_t i = 0; i < bump.size(); ++i) bump[i] = std::exp(-bs.grid.radius_squared(i) / 4.0);
  FieldState u = FieldState::from_real(bs.grid, bs.profiles);
  for (std::size_t i = 0; i < bump.size(); ++i) u.fields[0][i] += eps * bump[i];
  const double expected = eps * std::sqrt(sp.l2_norm_squared(bump) + sp.gradient_norm_squared(bump));
  CHECK(orbit_distance(sp, u, bs, period).distance == doctest::Approx(expected).epsilon(0.05));
}

TEST_CASE("perturbed initial data") {
  const test::Solved s = test::solve("quadratic_sync_1d", {"sigma=40"});
  const Spectral& sp = *s.gs.spectral;
  const BoundState& bs = s.gs.state;
  const FieldState at0 = perturbed_initial_data(s.cfg.spec, sp, bs, s.report, 0.0);
  for (int j = 0; j < 2; ++j)
    for (std::size_t i = 0; i < bs.grid.size(); ++i) CHECK(at0.fields[j][i] == Complex(bs.profiles[j][i]));
  const double m0 = mass(s.cfg.spec, sp, FieldState::from_real(bs.grid, bs.profiles));
  const double period = orbit_period(s.cfg.spec);
  double slopes[3];
  double t0 = 1e-2;
  for (double& slope : slopes) {
    const FieldState u = perturbed_initial_data(s.cfg.spec, sp, bs, s.report, t0);
    CHECK(mass(s.cfg.spec, sp, u) == doctest::Approx(m0).epsilon(1e-13));
    slope = orbit_distance(sp, u, bs, period).distance / t0;
    t0 /= 2.0;
  }
  CHECK(slopes[1] == doctest::Approx(slopes[0]).epsilon(0.1));
  CHECK(slopes[2] == doctest::Approx(slopes[1]).epsilon(0.1));
  CHECK_THROWS(perturbed_initial_data(s.cfg.spec, sp, bs, test::solve("quadratic_sync_1d").report, 1e-2));
}

TEST_CASE("virial diagnostics") {
  const RunConfig cfg = test::shipped("quadratic_sync_1d", {"sigma=2", "grid.points=1024"});
  CHECK(virial_ratio(cfg.spec).value_or(0.0) == doctest::Approx(1.0));
  CHECK_FALSE(virial_ratio(test::shipped("quadratic_sync_1d").spec).has_value());
  const Grid g = cfg.resolve_grid();
  Spectral sp(g);
  const VirialSample zero = virial_diagnostics(cfg.spec, sp, FieldState::zero(g, 2), 0.0);
  CHECK(zero.value == 0.0);
  CHECK(zero.rate == 0.0);
}

TEST_CASE("memory budget") {
  CHECK_THROWS(check_memory_budget(Grid{3, 10.0, 1024}, 2));
  CHECK_NOTHROW(check_memory_budget(Grid{3, 10.0, 128}, 3));
}
