#pragma once

// Connected parts of subset functions, truncated correlations, the polymer
// logarithm, and the effective action.

#include "errors.hpp"
#include "gaussian.hpp"
#include "grassmann.hpp"

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace fermicalc {

inline constexpr int subset_p_max = 12;

inline int lowest_member(std::uint32_t mask) { return std::countr_zero(mask); }

/// Values alpha(Q) for every Q subset of {1..p}, indexed by bitmask (bit q-1 for q).
template <class T>
struct SubsetFunction {
  int p = 0;
  std::vector<GrassmannElement<T>> values;

  SubsetFunction() = default;
  SubsetFunction(int p_, Universe u) : p(p_) {
    if (p < 0 || p > subset_p_max) throw std::out_of_range("subset functions support p <= 12");
    values.assign(std::size_t{1} << p, GrassmannElement<T>(u));
  }

  std::uint32_t full() const { return (std::uint32_t{1} << p) - 1; }
  GrassmannElement<T>& operator[](std::uint32_t q) { return values[q]; }
  const GrassmannElement<T>& operator[](std::uint32_t q) const { return values[q]; }
};

/// alpha^c(Q) = alpha(Q) - sum_{J containing min Q, J != Q} alpha^c(J) alpha(Q \ J).
template <class T>
SubsetFunction<T> connected_recursion(const SubsetFunction<T>& alpha) {
  const Universe u = alpha.values.at(0).universe();
  if (!(alpha[0] == GrassmannElement<T>::one(u))) throw std::invalid_argument("connected_recursion: alpha(empty) must be 1");
  for (const auto& v : alpha.values)
    if (!is_even(v)) throw std::invalid_argument("connected_recursion: values must be even");
  SubsetFunction<T> conn(alpha.p, u);
  for (std::uint32_t q = 1; q <= alpha.full(); ++q) {
    const std::uint32_t first = std::uint32_t{1} << lowest_member(q);
    GrassmannElement<T> value = alpha[q];
    const std::uint32_t others = q & ~first;
    // proper subsets J = first | (strict subset of others)
    for (std::uint32_t sub = (others - 1) & others;; sub = (sub - 1) & others) {
      if (others == 0) break;
      const std::uint32_t j = first | sub;
      if (!conn[j].is_zero()) value -= conn[j] * alpha[q & ~j];
      if (sub == 0) break;
    }
    conn[q] = std::move(value);
  }
  return conn;
}

/// Rebuilds alpha(Q) = sum over partitions of Q of prod alpha^c(blocks).
template <class T>
SubsetFunction<T> sum_over_partitions(const SubsetFunction<T>& conn) {
  const Universe u = conn.values.at(0).universe();
  SubsetFunction<T> alpha(conn.p, u);
  alpha[0] = GrassmannElement<T>::one(u);
  for (std::uint32_t q = 1; q <= conn.full(); ++q) {
    const std::uint32_t first = std::uint32_t{1} << lowest_member(q);
    const std::uint32_t others = q & ~first;
    GrassmannElement<T> value(u);
    for (std::uint32_t sub = others;; sub = (sub - 1) & others) {
      const std::uint32_t block = first | sub;
      value += conn[block] * alpha[q & ~block];
      if (sub == 0) break;
    }
    alpha[q] = std::move(value);
  }
  return alpha;
}

template <ScalarType T>
void require_even_inputs(const std::vector<GrassmannElement<T>>& vs) {
  if (vs.empty()) throw std::invalid_argument("need at least one input");
  for (const auto& v : vs) {
    if (!is_even(v)) throw std::invalid_argument("inputs must be even");
    if (!(v.universe() == vs.front().universe())) throw std::invalid_argument("inputs over different universes");
  }
}

/// alpha(Q) = mu_C * prod_{q in Q} V_q for all Q.
template <ScalarType T>
SubsetFunction<T> convolved_products(const Covariance<T>& cov, const std::vector<GrassmannElement<T>>& vs) {
  require_even_inputs(vs);
  const int p = static_cast<int>(vs.size());
  const Universe u = vs.front().universe();
  SubsetFunction<T> products(p, u);
  products[0] = GrassmannElement<T>::one(u);
  for (std::uint32_t q = 1; q <= products.full(); ++q) {
    const std::uint32_t top = std::uint32_t{1} << (31 - std::countl_zero(q));
    products[q] = products[q & ~top] * vs[static_cast<std::size_t>(std::countr_zero(top))];
  }
  SubsetFunction<T> alpha(p, u);
  for (std::uint32_t q = 0; q <= products.full(); ++q) alpha[q] = convolve_wick(cov, products[q]);
  return alpha;
}

/// <V_1; ...; V_p>^T as the connected part of the convolved products.
template <ScalarType T>
GrassmannElement<T> truncated_correlation(const Covariance<T>& cov, const std::vector<GrassmannElement<T>>& vs) {
  auto alpha = convolved_products(cov, vs);
  return connected_recursion(alpha)[alpha.full()];
}

/// Polymer-log weight: sum over connected graphs on the m polymers, using only
/// edges between overlapping polymers, of (-1)^{#edges}.
inline long long polymer_log_coefficient(const std::vector<std::uint32_t>& polymers) {
  const int m = static_cast<int>(polymers.size());
  if (m == 0) return 0;
  if (m == 1) return 1;
  if (m > 7) throw std::out_of_range("polymer_log_coefficient supports at most 7 polymers");
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if (polymers[static_cast<std::size_t>(i)] & polymers[static_cast<std::size_t>(j)]) edges.emplace_back(i, j);
  long long total = 0;
  const std::uint64_t graphs = std::uint64_t{1} << edges.size();
  for (std::uint64_t g = 0; g < graphs; ++g) {
    std::uint32_t reached = 1;
    for (bool grew = true; grew;) {
      grew = false;
      for (std::size_t e = 0; e < edges.size(); ++e) {
        if (!((g >> e) & 1U)) continue;
        const std::uint32_t a = std::uint32_t{1} << edges[e].first;
        const std::uint32_t b = std::uint32_t{1} << edges[e].second;
        if (((reached & a) != 0) != ((reached & b) != 0)) {
          reached |= a | b;
          grew = true;
        }
      }
    }
    if (reached == (std::uint32_t{1} << m) - 1) total += (std::popcount(g) % 2) ? -1 : 1;
  }
  return total;
}

/// Polynomials in lambda_1..lambda_p with Grassmann coefficients, truncated at
/// multidegree (1,...,1): a coefficient per subset of lambdas.
template <class T>
struct LambdaPolynomial {
  SubsetFunction<T> coeffs;

  LambdaPolynomial(int p, Universe u) : coeffs(p, u) {}

  friend LambdaPolynomial operator*(const LambdaPolynomial& a, const LambdaPolynomial& b) {
    const Universe u = a.coeffs.values[0].universe();
    LambdaPolynomial out(a.coeffs.p, u);
    for (std::uint32_t x = 0; x <= a.coeffs.full(); ++x) {
      if (a.coeffs[x].is_zero()) continue;
      for (std::uint32_t y = 0; y <= b.coeffs.full(); ++y)
        if (!(x & y) && !b.coeffs[y].is_zero()) out.coeffs[x | y] += a.coeffs[x] * b.coeffs[y];
    }
    return out;
  }

  LambdaPolynomial& operator+=(const LambdaPolynomial& o) {
    for (std::uint32_t x = 0; x <= coeffs.full(); ++x) coeffs[x] += o.coeffs[x];
    return *this;
  }
};

/// Multilinear part of log(sum_Q alpha(Q) prod_{q in Q} lambda_q) with alpha(empty)=1.
template <class T>
LambdaPolynomial<T> lambda_log(const SubsetFunction<T>& alpha) {
  const Universe u = alpha.values.at(0).universe();
  LambdaPolynomial<T> x(alpha.p, u);
  for (std::uint32_t q = 1; q <= alpha.full(); ++q) x.coeffs[q] = alpha[q];
  LambdaPolynomial<T> result(alpha.p, u);
  LambdaPolynomial<T> power = x;
  for (int k = 1; k <= alpha.p; ++k) {
    LambdaPolynomial<T> term = power;
    const Rational scale(k % 2 ? 1 : -1, k);
    for (auto& v : term.coeffs.values) v *= coeff_traits<T>::from_rational(scale);
    result += term;
    power = power * x;
  }
  return result;
}

template <ScalarType T>
struct EffectiveActionReport {
  GrassmannElement<T> w;                 // W(V), zero constant term
  T z{};                                 // mu_C * e^V at phi = 0
  std::vector<GrassmannElement<T>> wp;   // W_1..W_P
};

template <ScalarType T>
void require_interaction(const GrassmannElement<T>& v) {
  if (!is_even(v)) throw std::invalid_argument("interaction must be even");
  if (!coeff_traits<T>::is_zero(v.constant_term())) throw std::invalid_argument("interaction must have V(0) = 0");
}

/// W(V) = log (mu_C * e^V) / Z computed directly.
template <ScalarType T>
std::pair<GrassmannElement<T>, T> effective_action_direct(const Covariance<T>& cov, const GrassmannElement<T>& v) {
  require_interaction(v);
  GrassmannElement<T> u = convolve_wick(cov, exp(v));
  const T z = u.constant_term();
  if (coeff_traits<T>::is_zero(z)) throw OutOfDomain("normalization Z vanishes");
  u *= coeff_traits<T>::one() / z;
  return {log(u), z};
}

/// W_p = <V;...;V>^T (p copies) with its field-independent part removed.
template <ScalarType T>
GrassmannElement<T> effective_action_order(const Covariance<T>& cov, const GrassmannElement<T>& v, int p) {
  if (p < 1 || p > subset_p_max) throw std::out_of_range("order p must lie in [1, 12]");
  return truncated_correlation(cov, std::vector<GrassmannElement<T>>(static_cast<std::size_t>(p), v)).without_constant();
}

template <ScalarType T>
EffectiveActionReport<T> effective_action(const Covariance<T>& cov, const GrassmannElement<T>& v, int max_order) {
  EffectiveActionReport<T> report;
  std::tie(report.w, report.z) = effective_action_direct(cov, v);
  for (int p = 1; p <= max_order; ++p) report.wp.push_back(effective_action_order(cov, v, p));
  return report;
}

/// Taylor coefficients c_1..c_P of W(lambda V) = sum_p lambda^p c_p, from the
/// formal power series log(mu_C * e^{lambda V}) with log Z(lambda) removed;
/// c_p = W_p / p!.
template <ScalarType T>
std::vector<GrassmannElement<T>> effective_action_taylor(const Covariance<T>& cov, const GrassmannElement<T>& v, int max_order) {
  require_interaction(v);
  const Universe u = v.universe();
  // a_k = mu_C * V^k / k!, so mu_C * e^{lambda V} = 1 + sum_k lambda^k a_k
  std::vector<GrassmannElement<T>> a(static_cast<std::size_t>(max_order) + 1, GrassmannElement<T>(u));
  GrassmannElement<T> power = GrassmannElement<T>::one(u);
  for (int k = 1; k <= max_order; ++k) {
    power = power * v * coeff_traits<T>::from_rational(Rational(1, k));
    a[static_cast<std::size_t>(k)] = convolve_wick(cov, power);
  }
  using Series = std::vector<GrassmannElement<T>>;  // index = lambda power
  auto mul = [&](const Series& x, const Series& y) {
    Series out(x.size(), GrassmannElement<T>(u));
    for (std::size_t i = 0; i < x.size(); ++i)
      for (std::size_t j = 0; i + j < x.size(); ++j)
        if (!x[i].is_zero() && !y[j].is_zero()) out[i + j] += x[i] * y[j];
    return out;
  };
  Series result(a.size(), GrassmannElement<T>(u));
  Series pw = a;
  for (int k = 1; k <= max_order; ++k) {
    for (std::size_t i = 0; i < a.size(); ++i)
      result[i] += pw[i] * coeff_traits<T>::from_rational(Rational(k % 2 ? 1 : -1, k));
    pw = mul(pw, a);
  }
  std::vector<GrassmannElement<T>> out;
  for (int p = 1; p <= max_order; ++p) out.push_back(result[static_cast<std::size_t>(p)].without_constant());
  return out;
}

}  // namespace fermicalc
