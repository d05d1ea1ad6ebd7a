#include <doctest.h>

#include <cmath>
#include <string>

#include "helpers.hpp"
#include "mtl/error.hpp"

using namespace mtl;

namespace {

const char* kMinimal = R"(
[parameters]
w = 1

[system]
dimension = 1
lambda = 1, 1
omega = w, 3 * w

[system.term.coupling]
coefficient = -1
p = 0, 1
q = 2, 0
)";

std::string config_error(const std::string& text, const std::vector<std::string>& overrides = {}) {
  try {
    parse_config_text(text, overrides);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("expressions") {
  const std::map<std::string, Scalar> vars{{"s", {25.0, Rational(25)}}};
  const Scalar a = evaluate_expression("1 * (1 - 2 * s)", vars);
  CHECK(a.value == -49.0);
  CHECK(*a.exact == Rational(-49));
  CHECK(*evaluate_expression("sqrt(4) / 3", vars).exact == Rational(2, 3));
  CHECK(*evaluate_expression("2^-2", vars).exact == Rational(1, 4));
  CHECK(*evaluate_expression("-abs(-3/2)", vars).exact == Rational(-3, 2));
  const Scalar r = evaluate_expression("sqrt(3)", vars);
  CHECK_FALSE(r.exact.has_value());
  CHECK(r.value == doctest::Approx(std::sqrt(3.0)));
  CHECK_FALSE(evaluate_expression("pi", vars).exact.has_value());
  CHECK_THROWS_AS(evaluate_expression("1 / 0", vars), ConfigError);
  CHECK_THROWS_AS(evaluate_expression("x + 1", vars), ConfigError);
  CHECK_THROWS_AS(evaluate_expression("(1", vars), ConfigError);
}

TEST_CASE("shipped quadratic config") {
  const RunConfig cfg = test::shipped("quadratic_sync_1d");
  const SystemSpec& s = cfg.spec;
  CHECK(s.dimension == 1);
  CHECK(s.components == 2);
  CHECK(s.lambdas == std::vector<double>{1, 25});
  CHECK(s.omegas == std::vector<double>{1, 2});
  CHECK(s.omegas_exact == std::vector<Rational>{Rational(1), Rational(2)});
  REQUIRE(s.terms.size() == 2);
  CHECK(s.terms[0].coefficient == -49.0);
  CHECK(s.terms[0].exponents == std::vector<std::pair<int, int>>{{0, 0}, {1, 1}});
  CHECK(s.terms[1].coefficient == -1.0);
  CHECK(s.terms[1].exponents == std::vector<std::pair<int, int>>{{0, 2}, {1, 0}});
  CHECK(cfg.solver.method == SolverMethod::ClosedForm);
  REQUIRE(cfg.criterion.sweep);
  CHECK(cfg.criterion.sweep->steps == 29);
  const Grid g = cfg.resolve_grid();
  CHECK(g.points == 2048);
  CHECK(g.half_width == doctest::Approx(40.0));
}

TEST_CASE("every shipped config parses") {
  for (const auto& name : builtin_config_names()) {
    CAPTURE(name);
    CHECK_NOTHROW(builtin_config(name));
    CHECK_NOTHROW(test::shipped(name));
  }
}

TEST_CASE("gauge violation is rejected with its exact mismatch") {
  const std::string msg = config_error(kMinimal);
  CHECK(msg.find("term 'coupling' breaks gauge invariance") != std::string::npos);
  CHECK(msg.find("= 1") != std::string::npos);
  CHECK(msg.find("line 10") != std::string::npos);
}

TEST_CASE("structural errors") {
  CHECK(config_error("") == "missing [system]");
  const std::string unknown = config_error(std::string(kMinimal) + "\n[grid]\npoint = 64\n");
  CHECK(unknown.find("unknown key 'point' in [grid]") != std::string::npos);
  CHECK(unknown.find("line 16") != std::string::npos);
  CHECK(config_error("[system]\ndimension = 1\ndimension = 2\n").find("line 3: duplicate key") != std::string::npos);
  CHECK(config_error(std::string(kMinimal) + "[bogus]\n").find("unknown section [bogus]") != std::string::npos);
  CHECK(config_error("x = 1\n").find("key outside of any section") != std::string::npos);
  CHECK(config_error(kMinimal, {"nonexistent=3"}).find("unknown parameter 'nonexistent'") != std::string::npos);
}

TEST_CASE("overrides") {
  const RunConfig base = test::shipped("quadratic_sync_1d");
  const RunConfig low = reparse(base, {"sigma=1"});
  CHECK(low.spec.lambdas[1] == 1.0);
  CHECK(low.spec.terms[0].coefficient == -1.0);
  const RunConfig d3 = reparse(base, {"system.dimension=3", "grid.points=64", "solver.method=synchronous"});
  CHECK(d3.spec.dimension == 3);
  CHECK(d3.resolve_grid().points == 64);
  CHECK(d3.solver.method == SolverMethod::Synchronous);
  CHECK(reparse(base, {"simulate.integrator=yoshida4"}).simulate.evolve.integrator == Integrator::Yoshida4);
}

TEST_CASE("linear decay rate") {
  CHECK(linear_decay_rate(test::shipped("quadratic_sync_1d").spec) == doctest::Approx(1.0));
  CHECK(linear_decay_rate(test::shipped("rabi_2d").spec) == doctest::Approx(0.5));
}
