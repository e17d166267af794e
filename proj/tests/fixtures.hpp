#pragma once

// Instance generators and the spanning-tree oracle shared by the bound tests
// and the acceptance run.

#include <fermicalc/bounds.hpp>
#include <fermicalc/random.hpp>

#include <algorithm>
#include <limits>
#include <vector>

namespace fixtures {

using namespace fermicalc;

/// C = gamma^2 on one site with the declared factorization f = g = gamma.
inline Covariance<Rational> one_site(const Rational& gamma) {
  GramFactorization<Rational> fg{{{gamma}}, {{gamma}}};
  return Covariance<Rational>(Matrix<Rational>{{gamma * gamma}}, fg);
}

inline PseudoMetricModel line_metric(int n) {
  std::vector<std::vector<double>> coords;
  for (int x = 0; x < n; ++x) coords.push_back({static_cast<double>(x)});
  return PseudoMetricModel::from_coordinates(coords);
}

/// C(x,y) = a_xy r^{|x-y|} with random signs and sizes.
inline Covariance<Rational> decaying_covariance(Rng& rng, int n) {
  Matrix<Rational> c(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      Rational v = random_rational(rng, 3, 3);
      for (int k = 0; k < std::abs(x - y); ++k) v /= 3;
      c(static_cast<std::size_t>(x), static_cast<std::size_t>(y)) = v;
    }
  return Covariance<Rational>(c);
}

inline FieldMonomial random_monomial(Rng& rng, int sites) {
  for (;;) {
    FieldMonomial m;
    const int bars = static_cast<int>(rng() % 3), unbars = static_cast<int>(rng() % 3);
    if (bars + unbars == 0 || (bars + unbars) % 2) continue;
    for (int i = 0; i < bars; ++i) m.bar_sites.push_back(static_cast<int>(rng() % static_cast<unsigned>(sites)));
    for (int i = 0; i < unbars; ++i) m.unbar_sites.push_back(static_cast<int>(rng() % static_cast<unsigned>(sites)));
    return m;
  }
}

/// Equal numbers of psi and psibar at distinct sites, so cumulants can be nonzero.
inline FieldMonomial balanced_monomial(Rng& rng, int sites) {
  const int k = rng() % 4 == 0 ? 2 : 1;
  FieldMonomial m;
  auto draw = [&](std::vector<int>& out) {
    while (static_cast<int>(out.size()) < k) {
      const int x = static_cast<int>(rng() % static_cast<unsigned>(sites));
      if (std::find(out.begin(), out.end(), x) == out.end()) out.push_back(x);
    }
  };
  draw(m.bar_sites);
  draw(m.unbar_sites);
  return m;
}

/// Independent minimum spanning tree (Prim) on the line costs.
inline double mst_oracle(const std::vector<FieldMonomial>& ms, const PseudoMetricModel& d) {
  const std::size_t p = ms.size();
  std::vector<bool> in(p, false);
  std::vector<double> best(p, std::numeric_limits<double>::infinity());
  best[0] = 0;
  double total = 0;
  for (std::size_t round = 0; round < p; ++round) {
    std::size_t pick = p;
    for (std::size_t i = 0; i < p; ++i)
      if (!in[i] && (pick == p || best[i] < best[pick])) pick = i;
    in[pick] = true;
    total += best[pick];
    for (std::size_t i = 0; i < p; ++i)
      if (!in[i]) best[i] = std::min(best[i], line_cost(ms[pick], ms[i], d));
  }
  return total;
}

}  // namespace fixtures
