#pragma once

// Sparse multivariate polynomials in interpolation parameters s_1..s_k with
// exact rational coefficients, integrable over the unit cube.

#include "scalar.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fermicalc {

class SPolynomial {
 public:
  static constexpr int max_variables = 8;
  static constexpr int max_degree = 255;

  /// Exponents packed 8 bits per variable; variable i (1-based) in byte i-1.
  using Exponents = std::uint64_t;
  using Term = std::pair<Exponents, Rational>;

  SPolynomial() = default;
  SPolynomial(long c) : SPolynomial(Rational(c)) {}  // NOLINT(google-explicit-constructor)
  SPolynomial(const Rational& c) {                   // NOLINT(google-explicit-constructor)
    if (sgn(c) != 0) terms_.emplace_back(0, c);
  }

  /// The polynomial s_i.
  static SPolynomial variable(int i) {
    if (i < 1 || i > max_variables) throw std::out_of_range("s-variable index out of range");
    SPolynomial p;
    p.terms_.emplace_back(Exponents{1} << (8 * (i - 1)), Rational(1));
    return p;
  }

  static int exponent(Exponents e, int i) { return static_cast<int>((e >> (8 * (i - 1))) & 0xFFU); }

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].first == 0); }
  Rational constant_term() const { return !terms_.empty() && terms_[0].first == 0 ? terms_[0].second : Rational(0); }

  bool has_nonnegative_coefficients() const {
    return std::all_of(terms_.begin(), terms_.end(), [](const Term& t) { return sgn(t.second) >= 0; });
  }

  /// Highest variable index that occurs.
  int variable_count() const {
    int k = 0;
    for (const auto& [e, c] : terms_)
      for (int i = 1; i <= max_variables; ++i)
        if (exponent(e, i)) k = std::max(k, i);
    return k;
  }

  /// Exact integral over [0,1]^k: each s^a contributes 1/(a+1).
  Rational integrate_unit_cube() const {
    Rational total(0);
    for (const auto& [e, c] : terms_) {
      Rational term = c;
      for (int i = 1; i <= max_variables; ++i) term /= exponent(e, i) + 1;
      total += term;
    }
    return total;
  }

  /// Value at s = point (point[i-1] is s_i; missing variables count as 0).
  Rational evaluate(const std::vector<Rational>& point) const {
    Rational total(0);
    for (const auto& [e, c] : terms_) {
      Rational term = c;
      for (int i = 1; i <= max_variables; ++i) {
        const int a = exponent(e, i);
        if (a == 0) continue;
        if (static_cast<std::size_t>(i) > point.size()) {
          term = 0;
          break;
        }
        for (int k = 0; k < a; ++k) term *= point[static_cast<std::size_t>(i - 1)];
      }
      total += term;
    }
    return total;
  }

  SPolynomial& operator+=(const SPolynomial& o) {
    std::vector<Term> out;
    out.reserve(terms_.size() + o.terms_.size());
    auto a = terms_.begin();
    auto b = o.terms_.begin();
    while (a != terms_.end() || b != o.terms_.end()) {
      if (b == o.terms_.end() || (a != terms_.end() && a->first < b->first)) {
        out.push_back(std::move(*a++));
      } else if (a == terms_.end() || b->first < a->first) {
        out.push_back(*b++);
      } else {
        Rational s = a->second + b->second;
        if (sgn(s) != 0) out.emplace_back(a->first, std::move(s));
        ++a;
        ++b;
      }
    }
    terms_ = std::move(out);
    return *this;
  }

  SPolynomial& operator-=(const SPolynomial& o) { return *this += -o; }

  SPolynomial& operator*=(const SPolynomial& o) {
    *this = *this * o;
    return *this;
  }

  /// Division by a nonzero constant (needed by generic series code).
  SPolynomial& operator/=(const SPolynomial& o) {
    if (!o.is_constant() || o.is_zero()) throw std::domain_error("SPolynomial division by a non-constant");
    const Rational c = o.constant_term();
    for (auto& t : terms_) t.second /= c;
    return *this;
  }

  friend SPolynomial operator-(SPolynomial a) {
    for (auto& t : a.terms_) t.second = -t.second;
    return a;
  }
  friend SPolynomial operator+(SPolynomial a, const SPolynomial& b) { return a += b; }
  friend SPolynomial operator-(SPolynomial a, const SPolynomial& b) { return a -= b; }
  friend SPolynomial operator/(SPolynomial a, const SPolynomial& b) { return a /= b; }

  friend SPolynomial operator*(const SPolynomial& a, const SPolynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<Term> raw;
    raw.reserve(a.terms_.size() * b.terms_.size());
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) raw.emplace_back(add_exponents(ea, eb), ca * cb);
    return from_raw(std::move(raw));
  }

  friend bool operator==(const SPolynomial& a, const SPolynomial& b) { return a.terms_ == b.terms_; }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string s;
    for (const auto& [e, c] : terms_) {
      if (!s.empty()) s += " + ";
      s += "(" + c.get_str() + ")";
      for (int i = 1; i <= max_variables; ++i) {
        const int a = exponent(e, i);
        if (a == 0) continue;
        s += "*s" + std::to_string(i);
        if (a > 1) s += "^" + std::to_string(a);
      }
    }
    return s;
  }

 private:
  static Exponents add_exponents(Exponents a, Exponents b) {
    Exponents out = 0;
    for (int i = 0; i < max_variables; ++i) {
      const unsigned sum = ((a >> (8 * i)) & 0xFFU) + ((b >> (8 * i)) & 0xFFU);
      if (sum > max_degree) throw std::overflow_error("SPolynomial degree overflow");
      out |= Exponents{sum} << (8 * i);
    }
    return out;
  }

  static SPolynomial from_raw(std::vector<Term> raw) {
    std::sort(raw.begin(), raw.end(), [](const Term& x, const Term& y) { return x.first < y.first; });
    SPolynomial p;
    for (auto& t : raw) {
      if (!p.terms_.empty() && p.terms_.back().first == t.first)
        p.terms_.back().second += t.second;
      else
        p.terms_.push_back(std::move(t));
    }
    std::erase_if(p.terms_, [](const Term& t) { return sgn(t.second) == 0; });
    return p;
  }

  std::vector<Term> terms_;  // sorted by packed exponent, nonzero coefficients
};

inline std::string to_string(const SPolynomial& p) { return p.to_string(); }

template <>
struct coeff_traits<SPolynomial> {
  static constexpr bool exact = true;
  static SPolynomial zero() { return {}; }
  static SPolynomial one() { return SPolynomial(1L); }
  static bool is_zero(const SPolynomial& x) { return x.is_zero(); }
  static SPolynomial from_rational(const Rational& x) { return SPolynomial(x); }
};

}  // namespace fermicalc
