#pragma once

// Scalar support: exact rationals for affine data, binary64 otherwise.

#include <boost/multiprecision/gmp.hpp>

#include <charconv>
#include <cmath>
#include <string>
#include <string_view>
#include <system_error>
#include <type_traits>

#include "hcantor/error.hpp"

namespace hcantor {

using Rational = boost::multiprecision::mpq_rational;
using BigInt = boost::multiprecision::mpz_int;

template <class T>
inline constexpr bool is_exact_v = std::is_same_v<T, Rational>;

template <class T>
concept Scalar = std::is_same_v<T, Rational> || std::is_same_v<T, double>;

/// Tolerance for identifying two binary64 intervals (endpoint match, unit floor).
inline constexpr double kMatchTol = 1e-9;
/// Slack allowed on binary64 containment tests.
inline constexpr double kContainTol = 1e-11;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }
inline double to_double(double x) { return x; }

template <Scalar T>
T from_rational(const Rational& r) {
  if constexpr (is_exact_v<T>) {
    return r;
  } else {
    return to_double(r);
  }
}

/// Exact binary value of a double.
inline Rational exact_rational(double x) {
  if (!std::isfinite(x)) fail(ErrorKind::domain, "non-finite value");
  return Rational(x);
}

inline std::string to_string(const Rational& r) {
  const BigInt num = boost::multiprecision::numerator(r);
  const BigInt den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

/// Shortest decimal that round-trips to the same double.
inline std::string shortest_decimal(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) fail(ErrorKind::domain, "unprintable double");
  return std::string(buf, ptr);
}

namespace detail {

inline BigInt parse_integer(std::string_view s, std::string_view whole) {
  if (s.empty()) fail(ErrorKind::parse, "empty integer in '" + std::string(whole) + "'");
  bool neg = false;
  if (s.front() == '+' || s.front() == '-') {
    neg = s.front() == '-';
    s.remove_prefix(1);
  }
  if (s.empty()) fail(ErrorKind::parse, "bad integer in '" + std::string(whole) + "'");
  BigInt v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') fail(ErrorKind::parse, "bad digit in '" + std::string(whole) + "'");
    v = v * 10 + (c - '0');
  }
  return neg ? BigInt(-v) : v;
}

// Decimal literal like "-0.125" or "3e-2", converted exactly.
inline Rational parse_decimal(std::string_view s) {
  const std::string_view whole = s;
  long long exp10 = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    const BigInt ev = parse_integer(s.substr(e + 1), whole);
    exp10 = ev.convert_to<long long>();
    s = s.substr(0, e);
  }
  bool neg = false;
  if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
    neg = s.front() == '-';
    s.remove_prefix(1);
  }
  if (s.empty() || s.front() == '+' || s.front() == '-') fail(ErrorKind::parse, "bad number '" + std::string(whole) + "'");
  std::string digits;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    digits = std::string(s.substr(0, dot)) + std::string(s.substr(dot + 1));
    exp10 -= static_cast<long long>(s.size() - dot - 1);
  } else {
    digits = std::string(s);
  }
  if (digits.empty()) fail(ErrorKind::parse, "bad number '" + std::string(whole) + "'");
  Rational v(parse_integer(digits, whole));
  const BigInt ten_pow = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(exp10 < 0 ? -exp10 : exp10));
  if (exp10 < 0) {
    v /= Rational(ten_pow);
  } else {
    v *= Rational(ten_pow);
  }
  return neg ? Rational(-v) : v;
}

}  // namespace detail

/// Parses "p/q", "n", or a decimal literal into an exact rational.
inline Rational parse_rational(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (s.empty()) fail(ErrorKind::parse, "empty number");
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    const BigInt num = detail::parse_integer(s.substr(0, slash), s);
    const BigInt den = detail::parse_integer(s.substr(slash + 1), s);
    if (den == 0) fail(ErrorKind::parse, "zero denominator in '" + std::string(s) + "'");
    return Rational(num, den);
  }
  return detail::parse_decimal(s);
}

/// Exact rational of a double's shortest decimal form, so 0.3 reads as 3/10.
inline Rational decimal_rational(double x) {
  if (!std::isfinite(x)) fail(ErrorKind::parse, "non-finite number");
  return detail::parse_decimal(shortest_decimal(x));
}

inline bool approx_equal(double a, double b, double tol = kMatchTol) {
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) <= tol * scale;
}

template <Scalar T>
int sign_of(const T& x) {
  return x > 0 ? 1 : (x < 0 ? -1 : 0);
}

}  // namespace hcantor
