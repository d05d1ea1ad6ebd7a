#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mtl/error.hpp"
#include "mtl/spectral.hpp"

using namespace mtl;

TEST_CASE("grid layout and validation") {
  Grid g{2, 5.0, 16};
  CHECK(g.size() == 256);
  CHECK(g.stride(0) == 16);
  CHECK(g.spacing() == doctest::Approx(10.0 / 16));
  CHECK(g.position(17)[0] == doctest::Approx(-5.0 + g.spacing()));
  CHECK(g.axis_index(17, 1) == 1);
  CHECK_THROWS_AS(Grid({4, 1.0, 16}).validate(), PreconditionError);
  CHECK_THROWS_AS(Grid({1, 1.0, 24}).validate(), PreconditionError);
}

TEST_CASE("laplacian and gradient of a resolved mode") {
  const Grid g{1, std::numbers::pi, 32};
  Spectral sp(g);
  RealField u(g.size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::sin(3.0 * g.position(i)[0]);
  const RealField lap = sp.laplacian(u);
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(lap[i] == doctest::Approx(-9.0 * u[i]).epsilon(1e-12));
  CHECK(sp.l2_norm_squared(u) == doctest::Approx(std::numbers::pi));
  CHECK(sp.gradient_norm_squared(u) == doctest::Approx(9.0 * std::numbers::pi));
}

TEST_CASE("translate and rescale a Gaussian") {
  const Grid g{1, 20.0, 256};
  Spectral sp(g);
  ComplexField u(g.size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::exp(-g.position(i)[0] * g.position(i)[0]);
  const ComplexField t = sp.translate(u, {0.3, 0.0, 0.0});
  const ComplexField s = sp.rescale(u, 2.0);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double x = g.position(i)[0];
    CHECK(std::abs(t[i] - std::exp(-(x + 0.3) * (x + 0.3))) < 1e-12);
    // u(2x) wraps around the box for |x| > L/2.
    if (std::abs(x) < 10.0) CHECK(std::abs(s[i] - std::exp(-4.0 * x * x)) < 1e-12);
  }
}

TEST_CASE("x dot grad in two dimensions") {
  const Grid g{2, 12.0, 128};
  Spectral sp(g);
  RealField u(g.size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::exp(-g.radius_squared(i));
  const RealField v = sp.x_dot_grad(u);
  for (std::size_t i = 0; i < u.size(); i += 97) CHECK(v[i] == doctest::Approx(-2.0 * g.radius_squared(i) * u[i]).epsilon(1e-10));
}
