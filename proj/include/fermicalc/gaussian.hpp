#pragma once

// Fermionic Gaussian calculus: covariances and their Gram data, Wick
// determinants, Gaussian convolution, and Laplacians on replicated algebras.
//
// Conventions: <psi(X) psibar(Y)> = C(X,Y), so the canonical product
// psibar(Y_1..Y_k) psi(X_1..X_k) (both sorted) has expectation
// (-1)^{k(k+1)/2} det C(X_i, Y_j). The Laplacian coupling replicas q, q' is
//   Delta_{qq'} = - sum_{X,Y} C(X,Y) d/dpsi_q(X) d/dpsibar_q'(Y),
// with unweighted derivatives (site weights cancel between the measure and the
// derivative normalisation).

#include "errors.hpp"
#include "grassmann.hpp"
#include "linalg.hpp"
#include "norms.hpp"

#include <bit>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

namespace fermicalc {

template <ScalarType T>
struct GramFactorization {
  std::vector<std::vector<T>> f;  // f[X]
  std::vector<std::vector<T>> g;  // g[Y]
};

template <ScalarType T>
struct Covariance {
  Matrix<T> entries;
  std::optional<GramFactorization<T>> declared;

  Covariance() = default;
  explicit Covariance(Matrix<T> c, std::optional<GramFactorization<T>> gram = std::nullopt)
      : entries(std::move(c)), declared(std::move(gram)) {
    if (!entries.square()) throw InputError(InputErrorKind::dimension, "covariance must be square");
    if (declared) {
      if (declared->f.size() != entries.rows() || declared->g.size() != entries.rows())
        throw InputError(InputErrorKind::dimension, "Gram vectors must be given for every site");
      const std::size_t dim = declared->f.empty() ? 0 : declared->f[0].size();
      for (const auto* family : {&declared->f, &declared->g})
        for (const auto& vec : *family)
          if (vec.size() != dim) throw InputError(InputErrorKind::dimension, "Gram vectors differ in dimension");
    }
  }

  int sites() const { return static_cast<int>(entries.rows()); }
  const T& operator()(int x, int y) const { return entries(static_cast<std::size_t>(x), static_cast<std::size_t>(y)); }
};

template <ScalarType T>
struct GramInfo {
  T gamma_squared{};   // gamma_C^2, exact in exact mode
  bool declared = false;
  long double gamma() const { return std::sqrt(static_cast<long double>(coeff_traits<T>::to_double(gamma_squared))); }
};

/// max(max row abs-sum, max column abs-sum): an upper bound on the spectral norm.
template <ScalarType T>
T absolute_sum_bound(const Matrix<T>& c) {
  T best(0);
  for (std::size_t i = 0; i < c.rows(); ++i) {
    T row(0), col(0);
    for (std::size_t j = 0; j < c.cols(); ++j) {
      row += coeff_traits<T>::abs(c(i, j));
      col += coeff_traits<T>::abs(c(j, i));
    }
    if (row > best) best = row;
    if (col > best) best = col;
  }
  return best;
}

/// Checks a declared factorization against C and returns gamma_C^2; without
/// one, gamma_C^2 = sigma from absolute_sum_bound (the doubled matrix
/// [[sigma I, C], [C^T, sigma I]] is then PSD with constant diagonal sigma).
template <ScalarType T>
GramInfo<T> gram_constant(const Covariance<T>& cov) {
  GramInfo<T> info;
  if (!cov.declared) {
    info.gamma_squared = absolute_sum_bound(cov.entries);
    return info;
  }
  info.declared = true;
  const auto& fac = *cov.declared;
  auto norm_sq = [](const std::vector<T>& v) {
    T s(0);
    for (const auto& x : v) s += x * x;
    return s;
  };
  const int n = cov.sites();
  for (int x = 0; x < n; ++x) {
    const T nf = norm_sq(fac.f[static_cast<std::size_t>(x)]);
    const T ng = norm_sq(fac.g[static_cast<std::size_t>(x)]);
    if (nf > info.gamma_squared) info.gamma_squared = nf;
    if (ng > info.gamma_squared) info.gamma_squared = ng;
  }
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      const auto& f = fac.f[static_cast<std::size_t>(x)];
      const auto& g = fac.g[static_cast<std::size_t>(y)];
      T inner(0);
      for (std::size_t k = 0; k < f.size(); ++k) inner += f[k] * g[k];
      bool ok;
      if constexpr (coeff_traits<T>::exact) {
        ok = inner == cov(x, y);
      } else {
        const double scale = std::max({1e-300, std::fabs(cov(x, y)), std::sqrt(norm_sq(f) * norm_sq(g))});
        ok = std::fabs(inner - cov(x, y)) <= 1e-10 * scale;
      }
      if (!ok)
        throw InputError(InputErrorKind::factorization, "declared Gram vectors do not reproduce C(" +
                                                            std::to_string(x) + "," + std::to_string(y) + ")");
    }
  return info;
}

template <ScalarType T>
struct DecayData {
  T abs_norm{};  // |C|
  T omega{};     // |C| / gamma^2
};

template <ScalarType T>
DecayData<T> decay_norm(const Covariance<T>& cov, const T& gamma_squared, const SiteWeights<T>& weights) {
  const int n = cov.sites();
  weights.validate(n);
  DecayData<T> out;
  for (int x = 0; x < n; ++x) {
    T row(0), col(0);
    for (int y = 0; y < n; ++y) {
      row += coeff_traits<T>::abs(cov(x, y)) * weights.w[static_cast<std::size_t>(y)];
      col += coeff_traits<T>::abs(cov(y, x)) * weights.w[static_cast<std::size_t>(y)];
    }
    if (row > out.abs_norm) out.abs_norm = row;
    if (col > out.abs_norm) out.abs_norm = col;
  }
  if (coeff_traits<T>::is_zero(gamma_squared)) {
    if (!coeff_traits<T>::is_zero(out.abs_norm)) throw std::domain_error("nonzero covariance with zero Gram constant");
    out.omega = T(0);
  } else {
    out.omega = out.abs_norm / gamma_squared;
  }
  return out;
}

template <ScalarType T>
DecayData<T> decay_norm(const Covariance<T>& cov, const T& gamma_squared) {
  return decay_norm(cov, gamma_squared, SiteWeights<T>::unit(cov.sites()));
}

/// |det| <= gamma^{2k} for a k x k minor, checked as det^2 <= (gamma^2)^{2k}.
template <ScalarType T>
bool gram_bound_holds(const T& det, const T& gamma_squared, int k) {
  T bound(1);
  for (int i = 0; i < 2 * k; ++i) bound *= gamma_squared;
  if constexpr (coeff_traits<T>::exact) {
    return det * det <= bound;
  } else {
    return det * det <= bound * (1 + 1e-12);
  }
}

namespace detail {

inline std::vector<int> bits_of(std::uint64_t mask) {
  std::vector<int> out;
  for (; mask; mask &= mask - 1) out.push_back(std::countr_zero(mask));
  return out;
}

inline int triangular_sign(int k) { return ((k * (k + 1) / 2) % 2) ? -1 : 1; }

}  // namespace detail

/// <psibar(Y..) psi(X..)> for a canonical unreplicated monomial.
template <ScalarType T>
T wick_expectation(const Universe& u, Monomial mono, const Covariance<T>& cov) {
  detail::require_unreplicated(u, "wick_expectation");
  const std::uint64_t bars = mono.mask & u.kind_mask(Kind::bar);
  const std::uint64_t unbars = mono.mask & ~bars;
  const int k = std::popcount(bars);
  if (k != std::popcount(unbars)) return T(0);
  if (k == 0) return T(1);
  std::vector<std::size_t> rows, cols;
  for (int b : detail::bits_of(unbars)) rows.push_back(static_cast<std::size_t>(b - u.sites));
  for (int b : detail::bits_of(bars)) cols.push_back(static_cast<std::size_t>(b));
  T det = determinant(cov.entries.submatrix(rows, cols));
  return detail::triangular_sign(k) < 0 ? T(-det) : det;
}

/// Linear extension: the Gaussian expectation of an element.
template <ScalarType T>
T wick_expectation(const GrassmannElement<T>& v, const Covariance<T>& cov) {
  T total(0);
  for (const auto& [m, c] : v.terms()) total += c * wick_expectation(v.universe(), m, cov);
  return total;
}

/// (mu_C * v)(phi): shift psi -> psi + phi and integrate psi, term by term.
template <ScalarType T>
GrassmannElement<T> convolve_wick(const Covariance<T>& cov, const GrassmannElement<T>& v) {
  const Universe& u = v.universe();
  detail::require_unreplicated(u, "convolve_wick");
  if (cov.sites() != u.sites) throw InputError(InputErrorKind::dimension, "covariance size does not match sites");
  const std::uint64_t bar_mask = u.kind_mask(Kind::bar);
  TermAccumulator<T> acc;
  for (const auto& [mono, c] : v.terms()) {
    const std::uint64_t bars = mono.mask & bar_mask;
    const std::uint64_t unbars = mono.mask & ~bar_mask;
    // Enumerate kept subsets of bars and unbars with equally many integrated.
    for (std::uint64_t kept_bars = bars;; kept_bars = (kept_bars - 1) & bars) {
      const std::uint64_t int_bars = bars & ~kept_bars;
      const int k = std::popcount(int_bars);
      for (std::uint64_t kept_unbars = unbars;; kept_unbars = (kept_unbars - 1) & unbars) {
        const std::uint64_t int_unbars = unbars & ~kept_unbars;
        if (std::popcount(int_unbars) == k) {
          // Sign of moving kept bars ahead of integrated bars, likewise for
          // unbars, then kept unbars past the integrated bars.
          int parity = 0;
          for (int b : detail::bits_of(kept_bars)) parity += std::popcount(int_bars & detail::below(b));
          for (int b : detail::bits_of(kept_unbars)) parity += std::popcount(int_unbars & detail::below(b));
          parity += std::popcount(kept_unbars) * k;
          T w = wick_expectation(u, Monomial{int_bars | int_unbars}, cov);
          if (!coeff_traits<T>::is_zero(w)) {
            T term = c * w;
            if (parity & 1) term = -term;
            acc.add(Monomial{kept_bars | kept_unbars}, term);
          }
        }
        if (kept_unbars == 0) break;
      }
      if (kept_bars == 0) break;
    }
  }
  return std::move(acc).finish(u);
}

/// Gamma((q,X),(q',X')) = M_{qq'} C(X,X'), index (q-1) n + X.
template <class T>
Matrix<T> replica_gamma(const Matrix<T>& m, const Matrix<T>& c) {
  if (!m.square() || !c.square()) throw std::invalid_argument("replica_gamma expects square matrices");
  return kronecker(m, c);
}

/// Gamma for the single pair term coeff * Delta_{qq'} (replicas 1-based).
template <class T>
Matrix<T> pair_gamma(int replicas, int q, int q2, const Matrix<T>& c, const T& coeff) {
  Matrix<T> m(static_cast<std::size_t>(replicas), static_cast<std::size_t>(replicas));
  m(static_cast<std::size_t>(q - 1), static_cast<std::size_t>(q2 - 1)) = coeff;
  return kronecker(m, c);
}

/// Delta_Gamma v with Delta_Gamma = - sum Gamma(xi,xi') d/dPsi(xi) d/dPsibar(xi').
template <class T>
GrassmannElement<T> apply_laplacian(const GrassmannElement<T>& v, const Matrix<T>& gamma) {
  const Universe& u = v.universe();
  const std::size_t dim = static_cast<std::size_t>(u.sites * u.copies());
  if (gamma.rows() != dim || gamma.cols() != dim) throw std::invalid_argument("Laplacian kernel has wrong size");
  const std::uint64_t bar_mask = u.kind_mask(Kind::bar);
  const int n = u.sites;
  auto xi_of = [n](int bit) { return static_cast<std::size_t>((bit / (2 * n)) * n + bit % n); };
  TermAccumulator<T> acc;
  for (const auto& [mono, c] : v.terms()) {
    const std::uint64_t bars = mono.mask & bar_mask;
    const std::uint64_t unbars = mono.mask & ~bar_mask;
    for (int bb : detail::bits_of(bars)) {
      const std::uint64_t after_bar = mono.mask & ~(std::uint64_t{1} << bb);
      const int sign_bar = std::popcount(mono.mask & detail::below(bb));
      for (int ub : detail::bits_of(unbars)) {
        const T& g = gamma(xi_of(ub), xi_of(bb));
        if (coeff_traits<T>::is_zero(g)) continue;
        const int sign_unbar = std::popcount(after_bar & detail::below(ub));
        T term = c * g;
        // overall factor -1 from the definition of Delta
        if (((sign_bar + sign_unbar) & 1) == 0) term = -term;
        acc.add(Monomial{after_bar & ~(std::uint64_t{1} << ub)}, term);
      }
    }
  }
  return std::move(acc).finish(u);
}

/// e^{Delta_Gamma} v as a terminating power series.
template <class T>
GrassmannElement<T> exp_laplacian(const GrassmannElement<T>& v, const Matrix<T>& gamma) {
  GrassmannElement<T> result = v;
  GrassmannElement<T> term = v;
  for (long k = 1; !term.is_zero(); ++k) {
    term = apply_laplacian(term, gamma);
    if (term.is_zero()) break;
    term *= coeff_traits<T>::from_rational(Rational(1, k));
    result += term;
  }
  return result;
}

/// e^{coeff (Delta_{qq'} + Delta_{q'q})} v, or e^{coeff Delta_{qq}} when q == q'.
template <class T>
GrassmannElement<T> exp_pair_laplacian(const GrassmannElement<T>& v, int q, int q2, const Matrix<T>& c, const T& coeff) {
  const int p = v.universe().copies();
  Matrix<T> m(static_cast<std::size_t>(p), static_cast<std::size_t>(p));
  m(static_cast<std::size_t>(q - 1), static_cast<std::size_t>(q2 - 1)) = coeff;
  m(static_cast<std::size_t>(q2 - 1), static_cast<std::size_t>(q - 1)) = coeff;
  return exp_laplacian(v, kronecker(m, c));
}

/// (coeff (Delta_{qq'} + Delta_{q'q})) v for q != q'.
template <class T>
GrassmannElement<T> apply_pair_laplacian(const GrassmannElement<T>& v, int q, int q2, const Matrix<T>& c, const T& coeff) {
  const int p = v.universe().copies();
  Matrix<T> m(static_cast<std::size_t>(p), static_cast<std::size_t>(p));
  m(static_cast<std::size_t>(q - 1), static_cast<std::size_t>(q2 - 1)) = coeff;
  m(static_cast<std::size_t>(q2 - 1), static_cast<std::size_t>(q - 1)) = coeff;
  return apply_laplacian(v, kronecker(m, c));
}

/// prod_q V_q with V_q moved onto replica q.
template <class T>
GrassmannElement<T> replica_product(const std::vector<GrassmannElement<T>>& vs) {
  if (vs.empty()) throw std::invalid_argument("need at least one factor");
  const int p = static_cast<int>(vs.size());
  GrassmannElement<T> prod = lift_to_replica(vs[0], 1, p);
  for (int q = 2; q <= p; ++q) prod = prod * lift_to_replica(vs[static_cast<std::size_t>(q - 1)], q, p);
  return prod;
}

/// e^{sum_{q,q'} Delta_{qq'}} prod V_q, then psi_q := psi.
template <ScalarType T>
GrassmannElement<T> convolve_laplace(const Covariance<T>& cov, const std::vector<GrassmannElement<T>>& vs) {
  for (const auto& v : vs) {
    detail::require_unreplicated(v.universe(), "convolve_laplace");
    if (v.universe().sites != cov.sites()) throw InputError(InputErrorKind::dimension, "covariance size does not match sites");
  }
  const auto p = vs.size();
  Matrix<T> all_ones(p, p, T(1));
  return identify_replicas(exp_laplacian(replica_product(vs), replica_gamma(all_ones, cov.entries)));
}

/// e^{Delta_Gamma} of one replicated monomial, expanded as the sum over
/// contracted subsets A (psi slots) and Abar (psibar slots) of
/// sign * (-1)^{k(k+1)/2} det Gamma(A, Abar) * (remaining monomial).
template <class T>
GrassmannElement<T> laplacian_minor_form(const Matrix<T>& gamma, const Universe& u, Monomial mono) {
  const int n = u.sites;
  auto xi_of = [n](int bit) { return static_cast<std::size_t>((bit / (2 * n)) * n + bit % n); };
  const std::uint64_t bar_mask = u.kind_mask(Kind::bar);
  const std::uint64_t bars = mono.mask & bar_mask;
  const std::uint64_t unbars = mono.mask & ~bar_mask;
  TermAccumulator<T> acc;
  for (std::uint64_t abar = bars;; abar = (abar - 1) & bars) {
    const int k = std::popcount(abar);
    for (std::uint64_t a = unbars;; a = (a - 1) & unbars) {
      if (std::popcount(a) == k) {
        const std::uint64_t contracted = a | abar;
        const std::uint64_t rest = mono.mask & ~contracted;
        // m -> m_S m_R: each remaining generator preceding a contracted one
        int parity = 0;
        for (int b : detail::bits_of(contracted)) parity += std::popcount(rest & detail::below(b));
        // m_S (canonical) -> prod Psibar(Abar) prod Psi(A)
        std::vector<int> order;
        for (int b : detail::bits_of(abar)) order.push_back(b);
        for (int b : detail::bits_of(a)) order.push_back(b);
        const int to_normal = detail::sort_sign(order);
        T value = coeff_traits<T>::one();
        if (k > 0) {
          Matrix<T> sub(static_cast<std::size_t>(k), static_cast<std::size_t>(k));
          const auto rows = detail::bits_of(a);
          const auto cols = detail::bits_of(abar);
          for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j)
              sub(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) =
                  gamma(xi_of(rows[static_cast<std::size_t>(i)]), xi_of(cols[static_cast<std::size_t>(j)]));
          value = generic_determinant(sub);
        }
        int sign = (parity & 1 ? -1 : 1) * to_normal * detail::triangular_sign(k);
        if (!coeff_traits<T>::is_zero(value)) acc.add(Monomial{rest}, sign < 0 ? T(-value) : value);
      }
      if (a == 0) break;
    }
    if (abar == 0) break;
  }
  return std::move(acc).finish(u);
}

template <class T>
GrassmannElement<T> laplacian_minor_form(const Matrix<T>& gamma, const GrassmannElement<T>& v) {
  GrassmannElement<T> out(v.universe());
  for (const auto& [m, c] : v.terms()) out += laplacian_minor_form(gamma, v.universe(), m) * c;
  return out;
}

}  // namespace fermicalc
