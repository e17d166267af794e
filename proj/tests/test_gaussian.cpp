#include <fermicalc/gaussian.hpp>
#include <fermicalc/random.hpp>

#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace fermicalc;
using E = GrassmannElement<Rational>;

namespace {

Covariance<Rational> one_site_cov(const Rational& c) { return Covariance<Rational>(Matrix<Rational>{{c}}); }

}  // namespace

TEST(Wick, OneSitePair) {
  const Universe u{1, 0};
  EXPECT_EQ(wick_expectation(u, Monomial{0b11}, one_site_cov(Rational(7, 2))), Rational(-7, 2));
  EXPECT_EQ(wick_expectation(u, Monomial{0b10}, one_site_cov(Rational(7, 2))), Rational(0));
  // <psi psibar> = +c
  E reversed = E::product_of(u, {psi(0), psibar(0)}, Rational(1));
  EXPECT_EQ(wick_expectation(reversed, one_site_cov(Rational(7, 2))), Rational(7, 2));
}

TEST(Wick, MatchesBerezinOracle) {
  Rng rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = trial % 3 + 1;
    Universe u{n, 0};
    Matrix<Rational> c = oracle::random_invertible(rng, static_cast<std::size_t>(n));
    Covariance<Rational> cov(c);
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << (2 * n)); ++m) {
      E mono = E::monomial(u, Monomial{m});
      EXPECT_EQ(wick_expectation(u, Monomial{m}, cov), oracle::berezin_expectation(mono, c)) << "mask " << m;
    }
  }
}

TEST(ConvolveWick, OneSiteShift) {
  const Universe u{1, 0};
  const Rational g(3), c(1, 5);
  E v = E::product_of(u, {psibar(0), psi(0)}, g);
  EXPECT_EQ(convolve_wick(one_site_cov(c), v), v - E::constant(u, g * c));
  EXPECT_EQ(convolve_wick(one_site_cov(c), E::constant(u, Rational(4))), E::constant(u, Rational(4)));
}

TEST(ConvolveWick, MatchesBerezinConvolution) {
  Rng rng(43);
  for (int trial = 0; trial < 15; ++trial) {
    const int n = trial % 3 + 1;
    Universe u{n, 0};
    Matrix<Rational> c = oracle::random_invertible(rng, static_cast<std::size_t>(n));
    E v = random_even_element(rng, u, 2 * n, 0.4, true);
    EXPECT_EQ(convolve_wick(Covariance<Rational>(c), v), oracle::berezin_convolution(v, c));
  }
}

TEST(ConvolveWick, GeneratingIdentity) {
  // psi on replica 1, source eta on replica 2; C acts on psi only.
  Rng rng(47);
  for (int n = 1; n <= 2; ++n) {
    Universe u{n, 2};
    Matrix<Rational> c = random_rational_matrix(rng, static_cast<std::size_t>(n), static_cast<std::size_t>(n));
    E source(u);
    for (int x = 0; x < n; ++x) {
      source += E::product_of(u, {psibar(x, 2), psi(x, 1)}, Rational(1));
      source += E::product_of(u, {psibar(x, 1), psi(x, 2)}, Rational(1));
    }
    // mu_C acts on replica 1 only: M = diag(1, 0)
    Matrix<Rational> m{{Rational(1), Rational(0)}, {Rational(0), Rational(0)}};
    E convolved = exp_laplacian(fermicalc::exp(source), replica_gamma(m, c));
    // set psi = 0: keep only monomials without replica-1 generators
    E at_zero(u);
    for (const auto& [mono, coeff] : convolved.terms())
      if (!(mono.mask & u.replica_mask(1))) at_zero += E::monomial(u, mono, coeff);
    E expected_exponent(u);
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y)
        expected_exponent += E::product_of(u, {psibar(x, 2), psi(y, 2)}, c(static_cast<std::size_t>(x), static_cast<std::size_t>(y)));
    EXPECT_EQ(at_zero, fermicalc::exp(expected_exponent));
  }
}

TEST(ConvolveLaplace, SingleReplicaMatchesWick) {
  const Universe u{1, 0};
  E v = E::product_of(u, {psibar(0), psi(0)}, Rational(2));
  auto cov = one_site_cov(Rational(-1, 3));
  EXPECT_EQ(convolve_laplace(cov, {v}), convolve_wick(cov, v));
}

TEST(ConvolveLaplace, ConstantsMultiply) {
  const Universe u{2, 0};
  Rng rng(1);
  Covariance<Rational> cov(random_rational_matrix(rng, 2, 2));
  EXPECT_EQ(convolve_laplace(cov, {E::constant(u, Rational(2)), E::constant(u, Rational(3))}), E::constant(u, Rational(6)));
}

TEST(ConvolveLaplace, ReplicaIdentityRandom) {
  Rng rng(53);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = trial % 2 + 1 + (trial % 5 == 0);
    const int p = trial % 3 + 1;
    Universe u{n, 0};
    Covariance<Rational> cov(random_rational_matrix(rng, static_cast<std::size_t>(n), static_cast<std::size_t>(n)));
    std::vector<E> vs;
    E prod = E::one(u);
    for (int q = 0; q < p; ++q) {
      vs.push_back(random_even_element(rng, u, 4, 0.3, true));
      prod = prod * vs.back();
    }
    EXPECT_EQ(convolve_laplace(cov, vs), convolve_wick(cov, prod));
  }
}

TEST(LaplacianMinorForm, Basics) {
  Universe u{1, 2};
  Matrix<Rational> gamma{{Rational(2), Rational(3)}, {Rational(5), Rational(7)}};
  EXPECT_EQ(laplacian_minor_form(gamma, u, Monomial{0}), E::one(u));
  // Psi(xi) Psibar(xi') with xi = replica 1, xi' = replica 2
  E pair = E::product_of(u, {psi(0, 1), psibar(0, 2)}, Rational(1));
  E expected = pair + E::constant(u, gamma(0, 1));  // <Psi Psibar> = +Gamma
  EXPECT_EQ(laplacian_minor_form(gamma, pair), expected);
  EXPECT_EQ(exp_laplacian(pair, gamma), expected);
}

TEST(LaplacianMinorForm, MatchesPowerSeries) {
  Rng rng(59);
  for (int trial = 0; trial < 30; ++trial) {
    Universe u{trial % 2 + 1, trial % 3 + 1};
    const auto dim = static_cast<std::size_t>(u.sites * u.copies());
    Matrix<Rational> gamma = random_rational_matrix(rng, dim, dim);
    std::uniform_int_distribution<std::uint64_t> pick(0, (std::uint64_t{1} << u.generator_count()) - 1);
    for (int k = 0; k < 5; ++k) {
      std::uint64_t mask = pick(rng);
      while (std::popcount(mask) > 6) mask &= mask - 1;
      E mono = E::monomial(u, Monomial{mask});
      EXPECT_EQ(laplacian_minor_form(gamma, u, Monomial{mask}), exp_laplacian(mono, gamma));
    }
  }
}

TEST(GramConstant, Declared) {
  Covariance<Rational> id(Matrix<Rational>::identity(2),
                          GramFactorization<Rational>{{{Rational(1), Rational(0)}, {Rational(0), Rational(1)}},
                                                      {{Rational(1), Rational(0)}, {Rational(0), Rational(1)}}});
  EXPECT_EQ(gram_constant(id).gamma_squared, Rational(1));
  EXPECT_TRUE(gram_constant(id).declared);
  Covariance<Rational> four(Matrix<Rational>{{Rational(4)}}, GramFactorization<Rational>{{{Rational(2)}}, {{Rational(2)}}});
  EXPECT_EQ(gram_constant(four).gamma_squared, Rational(4));
  EXPECT_EQ(gram_constant(four).gamma(), 2.0L);
}

TEST(GramConstant, InconsistentFactorizationRejected) {
  Covariance<Rational> bad(Matrix<Rational>{{Rational(3)}}, GramFactorization<Rational>{{{Rational(2)}}, {{Rational(2)}}});
  try {
    gram_constant(bad);
    FAIL();
  } catch (const InputError& e) {
    EXPECT_EQ(e.kind(), InputErrorKind::factorization);
  }
  Covariance<double> near(Matrix<double>{{4.0 + 1e-13}}, GramFactorization<double>{{{2.0}}, {{2.0}}});
  EXPECT_NO_THROW(gram_constant(near));
}

TEST(GramConstant, DefaultIsAbsoluteSumBound) {
  Covariance<Rational> c(Matrix<Rational>{{Rational(1), Rational(-2)}, {Rational(1, 2), Rational(0)}});
  auto info = gram_constant(c);
  EXPECT_FALSE(info.declared);
  EXPECT_EQ(info.gamma_squared, Rational(3));
}

TEST(GramBound, RandomFactorizedMonomials) {
  Rng rng(61);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = trial % 4 + 1;
    auto cov = random_factorized_covariance(rng, n, trial % 3 + 1);
    const Rational g2 = gram_constant(cov).gamma_squared;
    Universe u{n, 0};
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << (2 * n)); ++m) {
      const Rational w = wick_expectation(u, Monomial{m}, cov);
      EXPECT_TRUE(gram_bound_holds(w, g2, std::popcount(m) / 2));
    }
  }
}

TEST(GramBound, MinorsAndHadamardProducts) {
  Rng rng(67);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 3;
    auto a = random_factorized_covariance(rng, n, 2);
    auto b = random_factorized_covariance(rng, n, 2);
    const Rational ga = gram_constant(a).gamma_squared, gb = gram_constant(b).gamma_squared;
    Matrix<Rational> had(3, 3);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) had(i, j) = a.entries(i, j) * b.entries(i, j);
    for (unsigned rows = 1; rows < 8; ++rows)
      for (unsigned cols = 1; cols < 8; ++cols) {
        if (std::popcount(rows) != std::popcount(cols)) continue;
        std::vector<std::size_t> r, c;
        for (std::size_t i = 0; i < 3; ++i) {
          if (rows >> i & 1U) r.push_back(i);
          if (cols >> i & 1U) c.push_back(i);
        }
        const int k = static_cast<int>(r.size());
        EXPECT_TRUE(gram_bound_holds(determinant(a.entries.submatrix(r, c)), ga, k));
        EXPECT_TRUE(gram_bound_holds(determinant(had.submatrix(r, c)), Rational(ga * gb), k));
      }
  }
}

TEST(DecayNorm, Cases) {
  Covariance<Rational> zero(Matrix<Rational>(2, 2));
  EXPECT_EQ(decay_norm(zero, Rational(0)).abs_norm, Rational(0));
  EXPECT_EQ(decay_norm(one_site_cov(Rational(-3)), Rational(3)).abs_norm, Rational(3));
  EXPECT_EQ(decay_norm(one_site_cov(Rational(-3)), Rational(3)).omega, Rational(1));
  Covariance<Rational> asym(Matrix<Rational>{{Rational(1), Rational(5)}, {Rational(0), Rational(1)}});
  // rows: 6, 1; columns: 1, 6 -> 6; with weights (1, 2): rows 11, 1; columns 1, 7
  EXPECT_EQ(decay_norm(asym, Rational(1)).abs_norm, Rational(6));
  SiteWeights<Rational> w{{Rational(1), Rational(2)}};
  EXPECT_EQ(decay_norm(asym, Rational(1), w).abs_norm, Rational(11));
}

TEST(ConvolutionBound, RandomNormShift) {
  Rng rng(71);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = trial % 3 + 1;
    auto cov = random_factorized_covariance(rng, n, 2);
    Universe u{n, 0};
    E v = random_even_element(rng, u, 4, 0.3);
    const long double gamma = gram_constant(cov).gamma();
    const Rational h = abs(random_nonzero_rational(rng));
    const long double lhs = seminorm_h(convolve_wick(cov, v), h).get_d();
    // ||V||_{h+gamma} evaluated from per-degree norms in long double
    long double rhs = 0;
    for (const auto& [deg, norm] : norms_by_total_degree(v, SiteWeights<Rational>::unit(n)))
      rhs += norm.get_d() * std::pow(static_cast<long double>(h.get_d()) + gamma, deg);
    EXPECT_LE(lhs, rhs * (1 + 1e-12L));
  }
}
