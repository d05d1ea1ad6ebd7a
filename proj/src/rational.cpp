#include "mtl/rational.hpp"

#include <cctype>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace mtl {

namespace {

using i128 = __int128;

std::int64_t narrow(i128 v) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min())
    throw std::overflow_error("rational overflow");
  return static_cast<std::int64_t>(v);
}

i128 gcd128(i128 a, i128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    i128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

Rational make(i128 num, i128 den) {
  if (den == 0) throw std::domain_error("rational division by zero");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  i128 g = gcd128(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return Rational(narrow(num), narrow(den));
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  std::int64_t g = std::gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  num_ = num;
  den_ = den;
}

Rational Rational::operator-() const { return Rational(-num_, den_); }

Rational operator+(const Rational& a, const Rational& b) {
  return make(i128(a.num_) * b.den_ + i128(b.num_) * a.den_, i128(a.den_) * b.den_);
}

Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational operator*(const Rational& a, const Rational& b) {
  return make(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
}

Rational operator/(const Rational& a, const Rational& b) {
  return make(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
}

bool operator<(const Rational& a, const Rational& b) {
  return i128(a.num_) * b.den_ < i128(b.num_) * a.den_;
}

std::string Rational::to_string() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

std::optional<Rational> Rational::parse(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  text = trim(text);
  if (text.empty()) return std::nullopt;

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    auto n = parse(text.substr(0, slash));
    auto d = parse(text.substr(slash + 1));
    if (!n || !d || d->is_zero()) return std::nullopt;
    try {
      return *n / *d;
    } catch (const std::overflow_error&) {
      return std::nullopt;
    }
  }

  std::size_t i = 0;
  bool negative = false;
  if (text[i] == '+' || text[i] == '-') {
    negative = text[i] == '-';
    ++i;
  }
  i128 mantissa = 0;
  int frac_digits = 0;
  bool any_digit = false;
  bool seen_point = false;
  const i128 limit = i128(1) << 100;
  for (; i < text.size(); ++i) {
    char c = text[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      mantissa = mantissa * 10 + (c - '0');
      if (mantissa > limit) return std::nullopt;
      if (seen_point) ++frac_digits;
      any_digit = true;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!any_digit) return std::nullopt;
  int exponent = 0;
  if (i < text.size()) {
    if (text[i] != 'e' && text[i] != 'E') return std::nullopt;
    ++i;
    bool eneg = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
      eneg = text[i] == '-';
      ++i;
    }
    if (i >= text.size()) return std::nullopt;
    for (; i < text.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(text[i]))) return std::nullopt;
      exponent = exponent * 10 + (text[i] - '0');
      if (exponent > 30) return std::nullopt;
    }
    if (eneg) exponent = -exponent;
  }
  exponent -= frac_digits;
  i128 num = negative ? -mantissa : mantissa;
  i128 den = 1;
  for (int k = 0; k < exponent; ++k) {
    num *= 10;
    if (num > limit || num < -limit) return std::nullopt;
  }
  for (int k = 0; k > exponent; --k) {
    den *= 10;
    if (den > limit) return std::nullopt;
  }
  try {
    return make(num, den);
  } catch (const std::overflow_error&) {
    return std::nullopt;
  }
}

Rational abs(const Rational& r) { return r.num() < 0 ? -r : r; }

Rational gcd(const Rational& a, const Rational& b) {
  if (a.is_zero()) return abs(b);
  if (b.is_zero()) return abs(a);
  // gcd(p/q, r/s) = gcd(p*s, r*q) / (q*s), then reduced.
  i128 x = i128(a.num()) * b.den();
  i128 y = i128(b.num()) * a.den();
  return make(gcd128(x, y), i128(a.den()) * b.den());
}

}  // namespace mtl
