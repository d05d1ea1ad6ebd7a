#include <doctest.h>

#include <cmath>

#include "helpers.hpp"

using namespace mtl;

namespace {

InstabilityReport structural_report(const SystemSpec& spec) {
  InstabilityReport r;
  r.structural.push_back(check_supercritical(spec));
  return r;
}

bool any_applies(const std::vector<StructuralVerdict>& v) {
  for (const auto& s : v)
    if (s.applies) return true;
  return false;
}

}  // namespace

TEST_CASE("abstract quadratic matrix") {
  // d = 1, beta = 2, k1 = 1/2, int Q2^2 = 1, int Q1^2 Q2 = 1.
  SystemSpec spec = test::shipped("quadratic_sync_1d").spec;
  spec.terms[0].coefficient = 2.0;
  const Matrix a = assemble_matrix(spec, {0.5, 1.0}, {2.0, -1.0}, 1);
  CHECK(a(0, 0) == doctest::Approx(0.375).epsilon(1e-15));
  CHECK(a(0, 1) == doctest::Approx(3.125).epsilon(1e-15));
  CHECK(a(1, 0) == doctest::Approx(3.125).epsilon(1e-15));
  CHECK(a(1, 1) == doctest::Approx(1.125).epsilon(1e-15));
  CHECK(determinant(a) == doctest::Approx(0.375 * 1.125 - 3.125 * 3.125));
  CHECK(eigen_symmetric(a).values[0] < 0.0);
}

TEST_CASE("critical exponents annihilate the scaling entry") {
  const SystemSpec spec =
      test::shipped("cubic_3d", {"system.dimension=2", "sigma=1/3", "mu=0", "system.term.mass_u.coefficient=0", "grid.half_width=auto", "grid.points=auto"}).spec;
  std::vector<double> integrals(spec.terms.size(), -0.7);
  const Matrix a = assemble_matrix(spec, {1.3, 1.0}, integrals, 1);
  CHECK(a(0, 0) == doctest::Approx(0.0));
}

TEST_CASE("verdicts on the quadratic system") {
  SUBCASE("sigma = 25 lies below the exact d = 1 threshold") {
    const test::Solved s = test::solve("quadratic_sync_1d");
    CHECK(s.report.verdict == Verdict::Inconclusive);
    CHECK(s.report.min_eigenvalue > 0.0);
    CHECK(s.report.reference == 1);
    CHECK_FALSE(s.report.direction.has_value());
  }
  SUBCASE("sigma = 40 is unstable and the direction is mass-tangent") {
    const test::Solved s = test::solve("quadratic_sync_1d", {"sigma=40"});
    REQUIRE(s.report.verdict == Verdict::Unstable);
    REQUIRE(s.report.direction.has_value());
    const DirectionField df = unstable_direction_field(s.cfg.spec, *s.gs.spectral, s.gs.state, s.report);
    CHECK(df.mass_tangency <= 1e-10);
    CHECK(df.quadratic_form < 0.0);
    CHECK(df.finite_difference == doctest::Approx(df.quadratic_form).epsilon(1e-4));
    const auto back = vector_from_direction(s.report, *s.report.direction);
    const Direction again = direction_from_vector(s.report, back);
    CHECK(again.lambda_prime == doctest::Approx(s.report.direction->lambda_prime));
  }
  SUBCASE("sweep sign change matches the exact oracle") {
    const auto oracle = quadratic_threshold_oracle(1);
    REQUIRE(oracle.threshold);
    CHECK(*oracle.threshold > 25.0);
    CHECK(*oracle.threshold < 40.0);
    CHECK(quadratic_scaled_determinant(1, Rational(25)).value() > 0.0);
    CHECK(quadratic_scaled_determinant(1, Rational(40)).value() < 0.0);
  }
}

TEST_CASE("exact threshold oracle at d = 3") {
  const auto oracle = quadratic_threshold_oracle(3);
  REQUIRE(oracle.threshold);
  CHECK(*oracle.threshold == doctest::Approx(2.0 + 1.5 * std::sqrt(2.0)).epsilon(1e-12));
  CHECK(oracle.statement_candidate == doctest::Approx(2.0 + 1.5 * std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("degenerate matrix") {
  const RunConfig cfg = test::shipped("quadratic_sync_1d");
  const Grid g{1, 10.0, 64};
  Spectral sp(g);
  const BoundState zero = make_bound_state(cfg.spec, sp, std::vector<RealField>(2, RealField(g.size(), 0.0)), cfg.spec.omegas);
  const InstabilityReport r = verdict(cfg.spec, zero);
  CHECK(r.verdict == Verdict::Degenerate);
}

TEST_CASE("k ratios for equal components") {
  const RunConfig cfg = test::shipped("rabi_2d");
  const Grid g{2, 10.0, 64};
  Spectral sp(g);
  RealField bump(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) bump[i] = std::exp(-g.radius_squared(i));
  const BoundState bs = make_bound_state(cfg.spec, sp, {bump, bump}, cfg.spec.omegas, 1e300);
  for (double k : compute_k_ratios(cfg.spec, bs)) CHECK(k == doctest::Approx(1.0));
}

TEST_CASE("supercritical check") {
  CHECK(check_supercritical(test::shipped("cubic_3d").spec).applies);
  CHECK(check_supercritical(test::shipped("quadratic_sync_1d", {"system.dimension=5"}).spec).applies);
  CHECK_FALSE(check_supercritical(test::shipped("quadratic_sync_3d").spec).applies);
  CHECK_FALSE(structural_report(test::shipped("quadratic_sync_1d").spec).structural[0].reason.empty());
}

TEST_CASE("critical check I") {
  CHECK(any_applies(check_critical_I(test::shipped("quadratic_sync_1d", {"system.dimension=4"}).spec, nullptr)));
  CHECK_FALSE(any_applies(
      check_critical_I(test::shipped("quadratic_sync_1d", {"system.dimension=4", "sigma=1/2"}).spec, nullptr)));
  CHECK(any_applies(check_critical_I(test::shipped("cubic_3d", {"system.dimension=2"}).spec, nullptr)));
}

TEST_CASE("critical check II") {
  CHECK_FALSE(any_applies(check_critical_II(test::shipped("rabi_2d", {"r=0"}).spec, nullptr)));
  const test::Solved asym = test::solve("rabi_2d", {"k22=2", "grid.points=256", "grid.half_width=16"});
  CHECK(any_applies(check_critical_II(asym.cfg.spec, &asym.gs.state)));
  const test::Solved sym = test::solve("rabi_2d", {"grid.points=256", "grid.half_width=16"});
  CHECK_FALSE(any_applies(check_critical_II(sym.cfg.spec, &sym.gs.state)));
}

TEST_CASE("sweep of a single point") {
  int calls = 0;
  const SweepResult r = sweep_parameter(
      [&](double s) {
        ++calls;
        SweepPoint p;
        p.parameter = s;
        p.min_eigenvalue = 1.0;
        return p;
      },
      2.0, 2.0, 1);
  CHECK(r.points.size() == 1);
  CHECK_FALSE(r.bracket.has_value());
  CHECK(calls == 1);
}

TEST_CASE("sweep bisects a sign change") {
  const SweepResult r = sweep_parameter(
      [](double s) {
        SweepPoint p;
        p.parameter = s;
        p.min_eigenvalue = 3.0 - s;
        p.verdict = p.min_eigenvalue < 0 ? Verdict::Unstable : Verdict::Inconclusive;
        return p;
      },
      0.0, 10.0, 10, 1e-6);
  REQUIRE(r.threshold);
  CHECK(*r.threshold == doctest::Approx(3.0).epsilon(1e-6));
}
