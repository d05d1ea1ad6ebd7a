#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace mtl {

/// Exact fraction num/den with den > 0 and gcd(num, den) = 1.
///
/// Arithmetic throws std::overflow_error when a result does not fit in
/// 64-bit numerator/denominator; callers that can degrade to floating point
/// catch it.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  bool is_zero() const { return num_ == 0; }

  Rational operator-() const;
  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }
  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator<(const Rational& a, const Rational& b);

  /// "n" or "n/d".
  std::string to_string() const;

  /// Parses integer, decimal ("1.25", "-3e-2") or fraction ("3/2") literals
  /// exactly. Returns nullopt for anything else.
  static std::optional<Rational> parse(std::string_view text);

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

Rational abs(const Rational& r);

/// Greatest common divisor of two nonzero fractions: the largest g with
/// a/g and b/g both integers.
Rational gcd(const Rational& a, const Rational& b);

}  // namespace mtl
