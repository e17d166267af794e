#pragma once

// Seeded random instances: rationals, even elements, covariances.

#include "gaussian.hpp"
#include "grassmann.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace fermicalc {

using Rng = std::mt19937_64;

/// Uniform over {num/den : |num| <= max_num, 1 <= den <= max_den}.
inline Rational random_rational(Rng& rng, int max_num = 3, int max_den = 3) {
  std::uniform_int_distribution<int> num(-max_num, max_num);
  std::uniform_int_distribution<int> den(1, max_den);
  Rational q(num(rng), den(rng));
  q.canonicalize();
  return q;
}

inline Rational random_nonzero_rational(Rng& rng, int max_num = 3, int max_den = 3) {
  for (;;) {
    Rational q = random_rational(rng, max_num, max_den);
    if (sgn(q) != 0) return q;
  }
}

/// Random even element: every even-degree canonical monomial up to max_degree is
/// included with probability `density`; optionally without constant term.
inline GrassmannElement<Rational> random_even_element(Rng& rng, const Universe& u, int max_degree, double density,
                                                      bool constant_term = false) {
  std::bernoulli_distribution keep(density);
  TermAccumulator<Rational> acc;
  const int bits = u.generator_count();
  const std::uint64_t limit = std::uint64_t{1} << bits;
  for (std::uint64_t mask = constant_term ? 0 : 1; mask < limit; ++mask) {
    const int deg = std::popcount(mask);
    if (deg % 2 || deg > max_degree) continue;
    if (keep(rng)) acc.add(Monomial{mask}, random_nonzero_rational(rng));
  }
  return std::move(acc).finish(u);
}

/// Random even element with at least one bar and one unbar factor per term
/// (charge-neutral monomials only) .
inline GrassmannElement<Rational> random_neutral_element(Rng& rng, const Universe& u, int max_pairs, double density) {
  std::bernoulli_distribution keep(density);
  TermAccumulator<Rational> acc;
  const std::uint64_t bar_mask = u.kind_mask(Kind::bar);
  const std::uint64_t limit = std::uint64_t{1} << u.generator_count();
  for (std::uint64_t mask = 1; mask < limit; ++mask) {
    const int b = std::popcount(mask & bar_mask);
    if (b != std::popcount(mask & ~bar_mask) || b > max_pairs) continue;
    if (keep(rng)) acc.add(Monomial{mask}, random_nonzero_rational(rng));
  }
  return std::move(acc).finish(u);
}

inline Matrix<Rational> random_rational_matrix(Rng& rng, std::size_t rows, std::size_t cols, int max_num = 3,
                                               int max_den = 3) {
  Matrix<Rational> m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = random_rational(rng, max_num, max_den);
  return m;
}

/// C(X,Y) = <f_X, g_Y> with random rational vectors of dimension `dim`.
inline Covariance<Rational> random_factorized_covariance(Rng& rng, int sites, int dim) {
  GramFactorization<Rational> fac;
  Matrix<Rational> c(static_cast<std::size_t>(sites), static_cast<std::size_t>(sites));
  for (int x = 0; x < sites; ++x) {
    std::vector<Rational> f, g;
    for (int k = 0; k < dim; ++k) {
      f.push_back(random_rational(rng, 2, 3));
      g.push_back(random_rational(rng, 2, 3));
    }
    fac.f.push_back(std::move(f));
    fac.g.push_back(std::move(g));
  }
  for (int x = 0; x < sites; ++x)
    for (int y = 0; y < sites; ++y) {
      Rational s(0);
      for (int k = 0; k < dim; ++k)
        s += fac.f[static_cast<std::size_t>(x)][static_cast<std::size_t>(k)] * fac.g[static_cast<std::size_t>(y)][static_cast<std::size_t>(k)];
      c(static_cast<std::size_t>(x), static_cast<std::size_t>(y)) = s;
    }
  return Covariance<Rational>(std::move(c), std::move(fac));
}

/// Random PSD rational matrix B B^T with diagonal scaled to at most 1 (if possible).
inline Matrix<Rational> random_psd_matrix(Rng& rng, std::size_t n, std::size_t rank) {
  Matrix<Rational> b = random_rational_matrix(rng, n, rank, 2, 2);
  Matrix<Rational> m = b * b.transpose();
  Rational top(0);
  for (std::size_t i = 0; i < n; ++i)
    if (m(i, i) > top) top = m(i, i);
  if (sgn(top) > 0)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m(i, j) /= top;
  return m;
}

}  // namespace fermicalc
