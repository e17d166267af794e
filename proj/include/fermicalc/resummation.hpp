#pragma once

// Direct tree resummation of truncated correlations: the Penrose partition
// turns the sum over connected graphs into a sum over trees, each evaluated
// exactly with all exponentials expanded by nilpotency.

#include "connected.hpp"
#include "gaussian.hpp"
#include "parallel.hpp"
#include "trees.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <vector>

namespace fermicalc {

/// e^{sum_q Delta_qq} prod V_q on the replicated algebra.
template <class T>
GrassmannElement<T> self_contracted_product(const Matrix<T>& c, const std::vector<GrassmannElement<T>>& vs) {
  const auto p = vs.size();
  return exp_laplacian(replica_product(vs), replica_gamma(Matrix<T>::identity(p), c));
}

/// One tree's summand: e^{Delta^{(T)}} prod_{lines}(e^{D_l} - 1) applied to the
/// self-contracted product, fields identified.
template <ScalarType T>
GrassmannElement<T> tree_summand(const Tree& t, const Matrix<T>& c, const GrassmannElement<T>& self_contracted) {
  GrassmannElement<T> x = self_contracted;
  const T one = coeff_traits<T>::one();
  for (const auto& e : t.edges) x = exp_pair_laplacian(x, e.a, e.b, c, one) - x;
  for (const auto& e : compatible_lines(t).edges()) x = exp_pair_laplacian(x, e.a, e.b, c, one);
  return identify_replicas(x);
}

template <ScalarType T>
GrassmannElement<T> direct_resummation(const Covariance<T>& cov, const std::vector<GrassmannElement<T>>& vs) {
  require_even_inputs(vs);
  const int p = static_cast<int>(vs.size());
  if (p == 1) return convolve_wick(cov, vs.front());
  if (p > tree_p_max) throw std::out_of_range("direct_resummation supports p <= 9");
  const auto base = self_contracted_product(cov.entries, vs);
  const auto trees = enumerate_trees(p);
  auto parts = parallel_map<GrassmannElement<T>>(trees.size(), [&](std::size_t i) {
    return tree_summand(trees[i], cov.entries, base);
  });
  GrassmannElement<T> total(vs.front().universe());
  for (const auto& part : parts) total += part;
  return total;
}

/// The s-integral form: prod_{lines} D_l  int ds e^{Delta^{(T)} + sum s_l D_l},
/// integrated by tensor Gauss-Legendre quadrature with 8 nodes per line.
/// Polynomial degree in each s_l is bounded by the number of fields, so the
/// rule is exact up to rounding for small inputs.
inline GrassmannElement<double> tree_integral_quadrature(const Covariance<double>& cov, const std::vector<GrassmannElement<double>>& vs) {
  const int p = static_cast<int>(vs.size());
  if (p < 2 || p > 4) throw std::out_of_range("quadrature cross-check supports 2 <= p <= 4");
  using Rule = boost::math::quadrature::gauss<double, 8>;
  std::vector<double> nodes, weights;
  for (std::size_t i = 0; i < Rule::abscissa().size(); ++i) {
    const double x = Rule::abscissa()[i], w = Rule::weights()[i];
    nodes.push_back(0.5 * (1 + x));
    weights.push_back(0.5 * w);
    if (x != 0.0) {
      nodes.push_back(0.5 * (1 - x));
      weights.push_back(0.5 * w);
    }
  }
  const auto base = self_contracted_product(cov.entries, vs);
  GrassmannElement<double> total(vs.front().universe());
  for (const auto& t : enumerate_trees(p)) {
    GrassmannElement<double> x = base;
    for (const auto& e : t.edges) x = apply_pair_laplacian(x, e.a, e.b, cov.entries, 1.0);
    for (const auto& e : compatible_lines(t).edges()) x = exp_pair_laplacian(x, e.a, e.b, cov.entries, 1.0);
    const std::size_t lines = t.edges.size();
    std::vector<std::size_t> idx(lines, 0);
    for (;;) {
      GrassmannElement<double> y = x;
      double w = 1.0;
      for (std::size_t l = 0; l < lines; ++l) {
        y = exp_pair_laplacian(y, t.edges[l].a, t.edges[l].b, cov.entries, nodes[idx[l]]);
        w *= weights[idx[l]];
      }
      total += identify_replicas(y) * w;
      std::size_t k = 0;
      while (k < lines && ++idx[k] == nodes.size()) idx[k++] = 0;
      if (k == lines) break;
    }
  }
  return total;
}

}  // namespace fermicalc
