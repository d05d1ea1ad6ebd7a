#include <doctest.h>

#include <stdexcept>

#include "mtl/rational.hpp"

using mtl::Rational;

TEST_CASE("rational arithmetic stays reduced") {
  const Rational a(6, 8), b(-1, 3);
  CHECK(a == Rational(3, 4));
  CHECK((a + b) == Rational(5, 12));
  CHECK((a * b) == Rational(-1, 4));
  CHECK((a / b) == Rational(-9, 4));
  CHECK(Rational(3, -6) == Rational(-1, 2));
  CHECK(Rational(-1, 2).to_string() == "-1/2");
  CHECK(Rational(4).to_string() == "4");
}

TEST_CASE("rational literals parse exactly") {
  CHECK(*Rational::parse("3/2") == Rational(3, 2));
  CHECK(*Rational::parse("1.25") == Rational(5, 4));
  CHECK(*Rational::parse("-3e-2") == Rational(-3, 100));
  CHECK_FALSE(Rational::parse("pi").has_value());
  CHECK_FALSE(Rational::parse("1/0").has_value());
}

TEST_CASE("gcd of fractions") {
  CHECK(mtl::gcd(Rational(1, 2), Rational(1, 3)) == Rational(1, 6));
  CHECK(mtl::gcd(Rational(1), Rational(2)) == Rational(1));
  CHECK(mtl::gcd(Rational(3), Rational(2)) == Rational(1));
  CHECK(mtl::gcd(Rational(3, 2), Rational(1, 1)) == Rational(1, 2));
}

TEST_CASE("overflow is reported") {
  const Rational big(std::int64_t{1} << 62);
  CHECK_THROWS_AS(big * big, std::overflow_error);
}
