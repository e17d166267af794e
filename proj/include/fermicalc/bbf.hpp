#pragma once

// Battle-Brydges-Federbush decoupling. The interpolation recursion is run
// symbolically: every term keeps its weight and its interpolated coupling
// matrix as polynomials in s_1..s_{p-1}, and the s-integrals are done exactly.

#include "connected.hpp"
#include "eigen_support.hpp"
#include "gaussian.hpp"
#include "parallel.hpp"
#include "spoly.hpp"
#include "trees.hpp"

#include <map>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

namespace fermicalc {

/// Symmetric replica coupling matrix M; Delta[M] = sum M_{qq'} Delta_{qq'}.
template <class T>
struct CoeffMatrix {
  Matrix<T> entries;

  CoeffMatrix() = default;
  explicit CoeffMatrix(Matrix<T> m) : entries(std::move(m)) {
    if (!entries.square()) throw std::invalid_argument("coupling matrix must be square");
    if (!entries.symmetric()) throw std::invalid_argument("coupling matrix must be symmetric");
  }

  int size() const { return static_cast<int>(entries.rows()); }
  const T& operator()(int q, int q2) const {
    return entries(static_cast<std::size_t>(q - 1), static_cast<std::size_t>(q2 - 1));
  }

  static CoeffMatrix all_ones(int p) {
    return CoeffMatrix(Matrix<T>(static_cast<std::size_t>(p), static_cast<std::size_t>(p), coeff_traits<T>::one()));
  }
};

inline PsdCertificate certify_psd(const CoeffMatrix<Rational>& m) { return ldlt_certificate(m.entries); }

/// M^{(A,s)}: entries coupling A (1-based replica set) to its complement
/// scaled by s, everything else unchanged.
template <ScalarType T>
CoeffMatrix<T> decouple(const CoeffMatrix<T>& m, const std::set<int>& a, const T& s) {
  if (s < T(0) || s > T(1)) throw std::domain_error("decoupling parameter must lie in [0,1]");
  for (int q : a)
    if (q < 1 || q > m.size()) throw std::out_of_range("decoupling set outside 1..p");
  Matrix<T> out = m.entries;
  for (int i = 1; i <= m.size(); ++i)
    for (int j = 1; j <= m.size(); ++j)
      if (a.count(i) != a.count(j)) out(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1)) *= s;
  return CoeffMatrix<T>(std::move(out));
}

/// One summand: tree, admissible permutation (order[i-1] = pi(i)), merged
/// weight phi, and the scale matrix with M(T,pi,s) = M o scale entrywise.
struct BbfTerm {
  Tree tree;
  std::vector<int> order;
  SPolynomial weight;
  Matrix<SPolynomial> scale;
  Matrix<SPolynomial> matrix;
  /// predecessor maps v (v[i-2] = v(i)) merged into this term
  std::vector<std::vector<int>> predecessors;
};

namespace detail {

struct BbfState {
  int p;
  std::vector<int> order;
  std::vector<int> pred;
  std::vector<bool> used;
  Matrix<SPolynomial> scale;
  SPolynomial weight;
};

/// Depth-first version of the interpolation recursion: step w picks the next
/// replica q_{w+1} outside A_w and one q' in A_w to pair it with, picking up
/// the current (q', q_{w+1}) scale factor, and then decouples A_w with s_w.
template <class Emit>
void bbf_recurse(BbfState& st, Emit&& emit) {
  const int w = static_cast<int>(st.order.size());
  if (w == st.p) {
    emit(st);
    return;
  }
  for (int next = 1; next <= st.p; ++next) {
    if (st.used[static_cast<std::size_t>(next)]) continue;
    for (int i = 1; i <= w; ++i) {
      const int prev = st.order[static_cast<std::size_t>(i - 1)];
      BbfState child = st;
      child.weight *= st.scale(static_cast<std::size_t>(prev - 1), static_cast<std::size_t>(next - 1));
      child.order.push_back(next);
      child.pred.push_back(i);
      child.used[static_cast<std::size_t>(next)] = true;
      const SPolynomial sw = SPolynomial::variable(w);
      for (std::size_t a = 0; a < static_cast<std::size_t>(st.p); ++a)
        for (std::size_t b = 0; b < static_cast<std::size_t>(st.p); ++b)
          if (st.used[a + 1] && !st.used[b + 1]) {
            child.scale(a, b) *= sw;
            child.scale(b, a) *= sw;
          }
      bbf_recurse(child, emit);
    }
  }
}

inline void require_bbf_input(const CoeffMatrix<Rational>& m) {
  if (!certify_psd(m).psd) throw std::domain_error("BBF expansion needs a positive semidefinite coupling matrix");
  for (int q = 1; q <= m.size(); ++q)
    if (m(q, q) > 1) throw std::domain_error("BBF expansion needs diagonal entries <= 1");
}

}  // namespace detail

/// All (v, pi) summands with v(i) < i and pi(1) = 1, merged by (T, pi).
inline std::vector<BbfTerm> bbf_expand(int p, const CoeffMatrix<Rational>& m) {
  if (m.size() != p) throw std::invalid_argument("coupling matrix size differs from p");
  if (p < 1 || p > tree_p_max) throw std::out_of_range("bbf_expand supports 1 <= p <= 9");
  detail::require_bbf_input(m);
  const auto n = static_cast<std::size_t>(p);
  detail::BbfState root{p, {1}, {}, std::vector<bool>(n + 1, false), Matrix<SPolynomial>(n, n, SPolynomial(1)), SPolynomial(1)};
  root.used[1] = true;
  std::map<std::pair<std::vector<Edge>, std::vector<int>>, BbfTerm> merged;
  detail::bbf_recurse(root, [&](const detail::BbfState& st) {
    std::vector<Edge> edges;
    for (int i = 2; i <= p; ++i)
      edges.push_back(make_edge(st.order[static_cast<std::size_t>(st.pred[static_cast<std::size_t>(i - 2)] - 1)],
                                st.order[static_cast<std::size_t>(i - 1)]));
    Tree t = tree_from_edges(p, edges);
    auto key = std::make_pair(t.edges, st.order);
    auto it = merged.find(key);
    if (it == merged.end()) {
      merged.emplace(key, BbfTerm{t, st.order, st.weight, st.scale, {}, {st.pred}});
    } else {
      // the final scale matrix depends on pi only
      if (!(it->second.scale == st.scale)) throw std::logic_error("scale matrices differ within one (T, pi) group");
      it->second.weight += st.weight;
      it->second.predecessors.push_back(st.pred);
    }
  });
  std::vector<BbfTerm> terms;
  terms.reserve(merged.size());
  for (auto& [key, term] : merged) {
    term.matrix = Matrix<SPolynomial>(n, n);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) term.matrix(a, b) = term.scale(a, b) * SPolynomial(m.entries(a, b));
    terms.push_back(std::move(term));
  }
  return terms;
}

/// Exact integral over [0,1]^{p-1} of the weights of all terms on tree t.
inline Rational normalization_check(const std::vector<BbfTerm>& terms, const Tree& t) {
  SPolynomial total;
  for (const auto& term : terms)
    if (term.tree == t) total += term.weight;
  return total.integrate_unit_cube();
}

/// M(T,pi,s) has the diagonal of M identically in s.
inline bool diagonal_invariant(const BbfTerm& term, const CoeffMatrix<Rational>& m) {
  for (std::size_t q = 0; q < term.matrix.rows(); ++q)
    if (!(term.matrix(q, q) == SPolynomial(m.entries(q, q)))) return false;
  return true;
}

inline Matrix<Rational> evaluate_at(const Matrix<SPolynomial>& m, const std::vector<Rational>& s) {
  Matrix<Rational> out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j).evaluate(s);
  return out;
}

struct PositivityReport {
  std::size_t points = 0;
  std::size_t failures = 0;
  std::vector<Rational> first_failure;
  bool ok() const { return failures == 0; }
};

/// Exact LDL^T at every point of the grid {0, 1/(g-1), ..., 1}^{p-1}.
inline PositivityReport positivity_certificate(const BbfTerm& term, int grid = 5) {
  if (grid < 2) throw std::invalid_argument("grid needs at least the two endpoints");
  const int vars = static_cast<int>(term.matrix.rows()) - 1;
  PositivityReport report;
  std::vector<int> idx(static_cast<std::size_t>(std::max(vars, 0)), 0);
  for (;;) {
    std::vector<Rational> s;
    for (int i : idx) s.push_back(Rational(i, grid - 1));
    ++report.points;
    if (!ldlt_certificate(evaluate_at(term.matrix, s)).psd) {
      if (report.failures++ == 0) report.first_failure = s;
    }
    std::size_t k = 0;
    while (k < idx.size() && ++idx[k] == grid) idx[k++] = 0;
    if (k == idx.size()) break;
  }
  return report;
}

namespace detail {

/// e^{sum_q M_qq Delta_qq} prod V_q followed by the tree-line Laplacians
/// prod M_ab (Delta_ab + Delta_ba) of one term.
inline GrassmannElement<Rational> bbf_prepared(const GrassmannElement<Rational>& diag_contracted, const BbfTerm& term,
                                               const CoeffMatrix<Rational>& m, const Matrix<Rational>& c) {
  GrassmannElement<Rational> x = diag_contracted;
  for (const auto& e : term.tree.edges) x = apply_pair_laplacian(x, e.a, e.b, c, m(e.a, e.b));
  return x;
}

inline GrassmannElement<Rational> diagonal_contraction(const std::vector<GrassmannElement<Rational>>& vs,
                                                       const CoeffMatrix<Rational>& m, const Matrix<Rational>& c) {
  Matrix<Rational> diag(vs.size(), vs.size());
  for (std::size_t q = 0; q < vs.size(); ++q) diag(q, q) = m.entries(q, q);
  return exp_laplacian(replica_product(vs), replica_gamma(diag, c));
}

}  // namespace detail

/// Truncated correlation as sum over BBF terms: tree-line Laplacians, then
/// e^{Delta[M(T,pi,s)]} with symbolic s, weighted by phi and integrated.
inline GrassmannElement<Rational> bbf_correlation(const Covariance<Rational>& cov,
                                                  const std::vector<GrassmannElement<Rational>>& vs,
                                                  const CoeffMatrix<Rational>& m) {
  require_even_inputs(vs);
  const int p = static_cast<int>(vs.size());
  if (p == 1) return convolve_wick(cov, vs.front());
  const auto terms = bbf_expand(p, m);
  const auto base = detail::diagonal_contraction(vs, m, cov.entries);
  const Matrix<SPolynomial> c_poly = cov.entries.map([](const Rational& x) { return SPolynomial(x); });
  auto parts = parallel_map<GrassmannElement<Rational>>(terms.size(), [&](std::size_t i) {
    const auto& term = terms[i];
    GrassmannElement<SPolynomial> x =
        detail::bbf_prepared(base, term, m, cov.entries).map_coefficients([](const Rational& r) { return SPolynomial(r); });
    for (int a = 1; a <= p; ++a)
      for (int b = a + 1; b <= p; ++b) {
        const SPolynomial& coupling = term.matrix(static_cast<std::size_t>(a - 1), static_cast<std::size_t>(b - 1));
        if (!coupling.is_zero()) x = exp_pair_laplacian(x, a, b, c_poly, coupling);
      }
    return identify_replicas(x).map_coefficients(
        [&](const SPolynomial& poly) { return (poly * term.weight).integrate_unit_cube(); });
  });
  GrassmannElement<Rational> total(vs.front().universe());
  for (const auto& part : parts) total += part;
  return total;
}

inline GrassmannElement<Rational> bbf_correlation(const Covariance<Rational>& cov,
                                                  const std::vector<GrassmannElement<Rational>>& vs) {
  return bbf_correlation(cov, vs, CoeffMatrix<Rational>::all_ones(static_cast<int>(vs.size())));
}

struct GramAuditReport {
  std::size_t minors = 0;
  std::size_t violations = 0;
  Rational gamma_squared;
  bool ok() const { return violations == 0; }
};

/// Evaluates every BBF term at the grid points via the minor expansion of
/// e^{Delta_Gamma}, Gamma = M(T,pi,s) (x) C, and checks each determinant
/// against gamma^{2k} with gamma the Gram constant of C.
inline GramAuditReport bbf_gram_audit(const Covariance<Rational>& cov, const std::vector<GrassmannElement<Rational>>& vs,
                                      int grid = 3) {
  require_even_inputs(vs);
  const int p = static_cast<int>(vs.size());
  const auto m = CoeffMatrix<Rational>::all_ones(p);
  const auto terms = bbf_expand(p, m);
  const auto base = replica_product(vs);
  GramAuditReport report;
  report.gamma_squared = gram_constant(cov).gamma_squared;
  const Universe u = base.universe();
  const int n = u.sites;
  const std::uint64_t bar_mask = u.kind_mask(Kind::bar);
  auto xi_of = [n](int bit) { return static_cast<std::size_t>((bit / (2 * n)) * n + bit % n); };
  for (const auto& term : terms) {
    // diagonal couplings are already inside M(T,pi,s), so start from the bare product
    GrassmannElement<Rational> x = base;
    for (const auto& e : term.tree.edges) x = apply_pair_laplacian(x, e.a, e.b, cov.entries, m(e.a, e.b));
    std::vector<int> idx(static_cast<std::size_t>(p - 1), 0);
    for (;;) {
      std::vector<Rational> s;
      for (int i : idx) s.push_back(Rational(i, grid - 1));
      const Matrix<Rational> gamma = kronecker(evaluate_at(term.matrix, s), cov.entries);
      for (const auto& [mono, coeff] : x.terms()) {
        const auto rows_all = detail::bits_of(mono.mask & ~bar_mask);
        const auto cols_all = detail::bits_of(mono.mask & bar_mask);
        const std::uint64_t nr = rows_all.size(), nc = cols_all.size();
        for (std::uint64_t rs = 1; rs < (std::uint64_t{1} << nr); ++rs)
          for (std::uint64_t cs = 1; cs < (std::uint64_t{1} << nc); ++cs) {
            const int k = std::popcount(rs);
            if (std::popcount(cs) != k) continue;
            Matrix<Rational> sub(static_cast<std::size_t>(k), static_cast<std::size_t>(k));
            std::size_t i = 0;
            for (std::size_t r = 0; r < nr; ++r) {
              if (!(rs >> r & 1)) continue;
              std::size_t j = 0;
              for (std::size_t cc = 0; cc < nc; ++cc)
                if (cs >> cc & 1) sub(i, j++) = gamma(xi_of(rows_all[r]), xi_of(cols_all[cc]));
              ++i;
            }
            ++report.minors;
            if (!gram_bound_holds(determinant(sub), report.gamma_squared, k)) ++report.violations;
          }
      }
      std::size_t k = 0;
      while (k < idx.size() && ++idx[k] == grid) idx[k++] = 0;
      if (k == idx.size()) break;
    }
  }
  return report;
}

struct TensorFactorization {
  /// rows indexed by (q-1) n + X
  Matrix<double> left;
  Matrix<double> right;
  double max_norm = 0.0;
};

/// Gamma = M (x) C as inner products <b_q (x) f_X, b_q' (x) g_X'>, with b_q the
/// columns of the PSD square root of M.
inline TensorFactorization gram_tensor_factorization(const CoeffMatrix<double>& m, const GramFactorization<double>& fg) {
  for (int q = 1; q <= m.size(); ++q)
    if (m(q, q) > 1.0 + 1e-12) throw std::domain_error("coupling matrix diagonal exceeds 1");
  if (fg.f.empty() || fg.f.size() != fg.g.size()) throw std::invalid_argument("factorization needs one f and one g per site");
  const Matrix<double> root = psd_square_root(m.entries);
  auto as_matrix = [](const std::vector<std::vector<double>>& rows) {
    Matrix<double> out(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < rows[i].size(); ++j) out(i, j) = rows[i].at(j);
    return out;
  };
  const Matrix<double> b = root.transpose();  // row q = b_q
  TensorFactorization out{kronecker(b, as_matrix(fg.f)), kronecker(b, as_matrix(fg.g)), 0.0};
  for (const auto* side : {&out.left, &out.right})
    for (std::size_t r = 0; r < side->rows(); ++r) {
      double sq = 0.0;
      for (std::size_t c = 0; c < side->cols(); ++c) sq += (*side)(r, c) * (*side)(r, c);
      out.max_norm = std::max(out.max_norm, std::sqrt(sq));
    }
  return out;
}

}  // namespace fermicalc
