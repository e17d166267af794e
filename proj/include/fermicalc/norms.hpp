#pragma once

// Kernel norms |v_{mbar,m}| and the h-seminorm of unreplicated elements.
//
// A canonical coefficient c(Sbar,S) of psibar(Sbar)psi(S) corresponds to the
// antisymmetric kernel value c / (mbar! m! prod_{args} w). Pinning one argument
// slot and integrating the rest over all orderings collapses to
//   bar slot:   sup_x sum_{Sbar contains x, S} |c| / (mbar w(x))
//   unbar slot: sup_x sum_{Sbar, S contains x} |c| / (m w(x))
// and the norm is the larger of the two (every slot of one kind gives the same
// value by antisymmetry).

#include "grassmann.hpp"

#include <bit>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

namespace fermicalc {

struct DegreePair {
  int bars = 0;
  int unbars = 0;
  friend auto operator<=>(const DegreePair&, const DegreePair&) = default;
};

inline DegreePair degrees_of(const Universe& u, Monomial m) {
  const std::uint64_t bars = u.kind_mask(Kind::bar);
  return {std::popcount(m.mask & bars), std::popcount(m.mask & ~bars)};
}

namespace detail {

inline void require_unreplicated(const Universe& u, const char* what) {
  if (u.replicas != 0) throw std::invalid_argument(std::string(what) + " expects an unreplicated element");
}

}  // namespace detail

/// |v_{mbar,m}| for the homogeneous part of degree (mbar, m).
template <ScalarType T>
T coeff_norm(const GrassmannElement<T>& v, int mbar, int m, const SiteWeights<T>& weights) {
  const Universe& u = v.universe();
  detail::require_unreplicated(u, "coeff_norm");
  weights.validate(u.sites);
  if (mbar + m == 0) return coeff_traits<T>::abs(v.constant_term());
  const auto n = static_cast<std::size_t>(u.sites);
  std::vector<T> bar_pinned(n, T(0));
  std::vector<T> unbar_pinned(n, T(0));
  for (const auto& [mono, c] : v.terms()) {
    const DegreePair d = degrees_of(u, mono);
    if (d.bars != mbar || d.unbars != m) continue;
    const T a = coeff_traits<T>::abs(c);
    for (int x = 0; x < u.sites; ++x) {
      if (mono.contains(x)) bar_pinned[static_cast<std::size_t>(x)] += a;
      if (mono.contains(u.sites + x)) unbar_pinned[static_cast<std::size_t>(x)] += a;
    }
  }
  T best(0);
  for (std::size_t x = 0; x < n; ++x) {
    if (mbar > 0) {
      T val = bar_pinned[x] / (T(mbar) * weights.w[x]);
      if (val > best) best = val;
    }
    if (m > 0) {
      T val = unbar_pinned[x] / (T(m) * weights.w[x]);
      if (val > best) best = val;
    }
  }
  return best;
}

template <ScalarType T>
T coeff_norm(const GrassmannElement<T>& v, int mbar, int m) {
  return coeff_norm(v, mbar, m, SiteWeights<T>::unit(v.universe().sites));
}

/// Degrees (mbar, m) that occur in v with a nonzero coefficient.
template <class T>
std::vector<DegreePair> occurring_degrees(const GrassmannElement<T>& v) {
  std::vector<DegreePair> out;
  for (const auto& [mono, c] : v.terms()) out.push_back(degrees_of(v.universe(), mono));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Per-degree norms, keyed by total degree mbar+m (constant term excluded).
template <ScalarType T>
std::map<int, T> norms_by_total_degree(const GrassmannElement<T>& v, const SiteWeights<T>& weights) {
  std::map<int, T> out;
  for (const auto& d : occurring_degrees(v)) {
    if (d.bars + d.unbars == 0) continue;
    out[d.bars + d.unbars] += coeff_norm(v, d.bars, d.unbars, weights);
  }
  return out;
}

/// ||v||_h = sum_{mbar+m >= 1} |v_{mbar,m}| h^{mbar+m}.
template <ScalarType T>
T seminorm_h(const GrassmannElement<T>& v, const T& h, const SiteWeights<T>& weights) {
  if (!(h > 0)) throw std::domain_error("seminorm_h: h must be positive");
  T total(0);
  for (const auto& [degree, norm] : norms_by_total_degree(v, weights)) {
    T power(1);
    for (int k = 0; k < degree; ++k) power *= h;
    total += norm * power;
  }
  return total;
}

template <ScalarType T>
T seminorm_h(const GrassmannElement<T>& v, const T& h) {
  return seminorm_h(v, h, SiteWeights<T>::unit(v.universe().sites));
}

}  // namespace fermicalc
