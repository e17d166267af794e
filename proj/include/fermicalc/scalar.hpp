#pragma once

// Coefficient rings used throughout the engine.
//
// Exact mode works over GMP rationals (`Rational`); float mode over `double`.
// Everything generic in the library is written against `coeff_traits<T>`, which
// is also specialised for s-polynomials in spoly.hpp.

#include <gmpxx.h>

#include <charconv>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>

namespace fermicalc {

using Rational = mpq_class;

template <class T>
struct coeff_traits;

template <>
struct coeff_traits<Rational> {
  static constexpr bool exact = true;
  static Rational zero() { return Rational(0); }
  static Rational one() { return Rational(1); }
  static bool is_zero(const Rational& x) { return sgn(x) == 0; }
  static Rational from_rational(const Rational& x) { return x; }
  static Rational abs(const Rational& x) { return ::abs(x); }
  static double to_double(const Rational& x) { return x.get_d(); }
};

template <>
struct coeff_traits<double> {
  static constexpr bool exact = false;
  static double zero() { return 0.0; }
  static double one() { return 1.0; }
  static bool is_zero(double x) { return x == 0.0; }
  static double from_rational(const Rational& x) { return x.get_d(); }
  static double abs(double x) { return std::fabs(x); }
  static double to_double(double x) { return x; }
};

template <class T>
concept ScalarType = std::same_as<T, Rational> || std::same_as<T, double>;

/// Parses "3/7", "-2", "0.125" or "1e-3" into an exact rational.
/// Decimal and exponent forms are read as exact decimal fractions.
inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  if (s.find('/') != std::string::npos) {
    Rational q;
    if (q.set_str(s, 10) != 0) throw std::invalid_argument("bad rational literal '" + s + "'");
    if (q.get_den() == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
    q.canonicalize();
    return q;
  }
  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string::npos) {
    std::string exp_part = s.substr(e + 1);
    auto [ptr, ec] = std::from_chars(exp_part.data() + (exp_part[0] == '+' ? 1 : 0),
                                     exp_part.data() + exp_part.size(), exponent);
    if (ec != std::errc() || ptr != exp_part.data() + exp_part.size())
      throw std::invalid_argument("bad exponent in '" + s + "'");
    s = s.substr(0, e);
  }
  std::string digits;
  long frac_digits = 0;
  bool seen_point = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if ((c == '-' || c == '+') && i == 0) {
      if (c == '-') digits.push_back('-');
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else if (c >= '0' && c <= '9') {
      digits.push_back(c);
      if (seen_point) ++frac_digits;
    } else {
      throw std::invalid_argument("bad number literal '" + std::string(text) + "'");
    }
  }
  if (digits.empty() || digits == "-") throw std::invalid_argument("bad number literal '" + std::string(text) + "'");
  mpz_class num(digits, 10);
  long shift = exponent - frac_digits;
  mpz_class pow10;
  mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(shift < 0 ? -shift : shift));
  Rational q = shift >= 0 ? Rational(num * pow10) : Rational(num, pow10);
  q.canonicalize();
  return q;
}

/// Exact rational value of a double (every finite double is a dyadic rational).
inline Rational exact_from_double(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("non-finite value");
  Rational q;
  mpq_set_d(q.get_mpq_t(), x);
  return q;
}

/// True when the shortest round-trip decimal spelling of `x` denotes exactly `x`
/// (0.5 and 0.375 qualify, 0.1 does not).
inline bool double_is_exact_decimal(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) return false;
  return parse_rational(std::string_view(buf, static_cast<std::size_t>(end - buf))) == exact_from_double(x);
}

inline std::string to_string(const Rational& q) { return q.get_str(10); }

inline std::string to_string(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string to_string(long double x) { return to_string(static_cast<double>(x)); }

}  // namespace fermicalc
