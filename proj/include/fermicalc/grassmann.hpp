#pragma once

// Finite Grassmann algebra generated by psibar(X), psi(X), X in a finite site
// set, optionally replicated into copies q = 1..p.
//
// Generators are totally ordered by (replica, kind with bar < unbar, site) and
// a monomial is stored as a bitmask whose bit order is exactly that order, so
// canonical form is implicit and sign bookkeeping reduces to popcounts.

#include "scalar.hpp"

#include <algorithm>
#include <bit>
#include <compare>
#include <cstdint>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

namespace fermicalc {

enum class Kind : std::uint8_t { bar = 0, unbar = 1 };

struct Generator {
  Kind kind = Kind::unbar;
  int site = 0;
  int replica = 0;  // 0 when unreplicated, 1..p otherwise

  friend auto operator<=>(const Generator& a, const Generator& b) {
    return std::tie(a.replica, a.kind, a.site) <=> std::tie(b.replica, b.kind, b.site);
  }
  friend bool operator==(const Generator&, const Generator&) = default;
};

inline Generator psibar(int site, int replica = 0) { return {Kind::bar, site, replica}; }
inline Generator psi(int site, int replica = 0) { return {Kind::unbar, site, replica}; }

struct Universe {
  int sites = 0;
  int replicas = 0;  // 0 = unreplicated

  int copies() const { return replicas == 0 ? 1 : replicas; }
  int generator_count() const { return 2 * sites * copies(); }

  void validate() const {
    if (sites < 0 || replicas < 0) throw std::invalid_argument("negative universe size");
    if (generator_count() > 64)
      throw std::invalid_argument("universe has " + std::to_string(generator_count()) +
                                  " generators; at most 64 are supported");
  }

  int bit(const Generator& g) const {
    const int slot = replicas == 0 ? 0 : g.replica - 1;
    if (g.site < 0 || g.site >= sites) throw std::out_of_range("generator site out of range");
    if (replicas == 0 ? g.replica != 0 : (g.replica < 1 || g.replica > replicas))
      throw std::out_of_range("generator replica out of range");
    return slot * 2 * sites + static_cast<int>(g.kind) * sites + g.site;
  }

  Generator generator(int bit) const {
    const int slot = bit / (2 * sites);
    const int rest = bit % (2 * sites);
    return {rest < sites ? Kind::bar : Kind::unbar, rest % sites, replicas == 0 ? 0 : slot + 1};
  }

  /// Mask of all generators of one kind (all replicas).
  std::uint64_t kind_mask(Kind k) const {
    std::uint64_t m = 0;
    for (int c = 0; c < copies(); ++c)
      for (int x = 0; x < sites; ++x) m |= std::uint64_t{1} << (c * 2 * sites + static_cast<int>(k) * sites + x);
    return m;
  }

  /// Mask of the generators belonging to replica q.
  std::uint64_t replica_mask(int q) const {
    const int slot = replicas == 0 ? 0 : q - 1;
    std::uint64_t m = 0;
    for (int b = 0; b < 2 * sites; ++b) m |= std::uint64_t{1} << (slot * 2 * sites + b);
    return m;
  }

  friend bool operator==(const Universe&, const Universe&) = default;
};

struct Monomial {
  std::uint64_t mask = 0;

  int degree() const { return std::popcount(mask); }
  bool contains(int bit) const { return (mask >> bit) & 1U; }
  friend auto operator<=>(const Monomial&, const Monomial&) = default;
};

namespace detail {

inline std::uint64_t below(int bit) { return bit >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bit) - 1; }

/// (-1)^{#pairs (i in a, j in b) with i > j}: sign of moving the generators of b
/// into canonical position after writing a*b.
inline int product_sign(std::uint64_t a, std::uint64_t b) {
  int inversions = 0;
  for (std::uint64_t rest = b; rest; rest &= rest - 1) {
    const int j = std::countr_zero(rest);
    inversions += std::popcount(a & ~below(j + 1));
  }
  return (inversions & 1) ? -1 : 1;
}

/// Sign of the permutation sorting `targets` (distinct bit positions, given in
/// the order the factors appear).
inline int sort_sign(std::span<const int> targets) {
  int inversions = 0;
  std::uint64_t seen = 0;
  for (int t : targets) {
    inversions += std::popcount(seen & ~below(t + 1));
    seen |= std::uint64_t{1} << t;
  }
  return (inversions & 1) ? -1 : 1;
}

}  // namespace detail

template <class T>
class GrassmannElement;

/// Hash-based staging area for building elements term by term.
template <class T>
class TermAccumulator {
 public:
  void add(Monomial m, const T& c) {
    if (coeff_traits<T>::is_zero(c)) return;
    auto [it, inserted] = terms_.try_emplace(m.mask, c);
    if (!inserted) it->second += c;
  }
  bool empty() const { return terms_.empty(); }

  GrassmannElement<T> finish(const Universe& u) &&;

 private:
  std::unordered_map<std::uint64_t, T> terms_;
};

template <class T>
class GrassmannElement {
 public:
  using Term = std::pair<Monomial, T>;

  GrassmannElement() = default;
  explicit GrassmannElement(Universe u) : universe_(u) { universe_.validate(); }

  static GrassmannElement constant(Universe u, const T& c) {
    GrassmannElement e(u);
    if (!coeff_traits<T>::is_zero(c)) e.terms_.emplace_back(Monomial{0}, c);
    return e;
  }

  static GrassmannElement one(Universe u) { return constant(u, coeff_traits<T>::one()); }

  /// c * g_1 g_2 ... g_k with the factors in the given order (sign and
  /// nilpotency applied).
  static GrassmannElement product_of(Universe u, std::span<const Generator> factors, const T& c) {
    GrassmannElement e(u);
    std::vector<int> bits;
    std::uint64_t mask = 0;
    for (const auto& g : factors) {
      const int b = u.bit(g);
      if ((mask >> b) & 1U) return e;
      mask |= std::uint64_t{1} << b;
      bits.push_back(b);
    }
    if (coeff_traits<T>::is_zero(c)) return e;
    T coeff = c;
    if (detail::sort_sign(bits) < 0) coeff = -coeff;
    e.terms_.emplace_back(Monomial{mask}, std::move(coeff));
    return e;
  }

  static GrassmannElement product_of(Universe u, std::initializer_list<Generator> factors, const T& c) {
    return product_of(u, std::span<const Generator>(factors.begin(), factors.size()), c);
  }

  static GrassmannElement generator(Universe u, Generator g, const T& c = coeff_traits<T>::one()) {
    return product_of(u, {g}, c);
  }

  /// Element with a single canonical monomial.
  static GrassmannElement monomial(Universe u, Monomial m, const T& c = coeff_traits<T>::one()) {
    GrassmannElement e(u);
    if (!coeff_traits<T>::is_zero(c)) e.terms_.emplace_back(m, c);
    return e;
  }

  const Universe& universe() const { return universe_; }
  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  T coefficient(Monomial m) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                               [](const Term& t, const Monomial& key) { return t.first < key; });
    if (it != terms_.end() && it->first == m) return it->second;
    return coeff_traits<T>::zero();
  }

  T constant_term() const { return coefficient(Monomial{0}); }

  GrassmannElement without_constant() const {
    GrassmannElement e(universe_);
    for (const auto& t : terms_)
      if (t.first.mask != 0) e.terms_.push_back(t);
    return e;
  }

  int max_degree() const {
    int d = 0;
    for (const auto& t : terms_) d = std::max(d, t.first.degree());
    return d;
  }

  friend bool operator==(const GrassmannElement& a, const GrassmannElement& b) {
    return a.universe_ == b.universe_ && a.terms_ == b.terms_;
  }

  GrassmannElement& operator+=(const GrassmannElement& o) {
    require_same(o);
    std::vector<Term> merged;
    merged.reserve(terms_.size() + o.terms_.size());
    auto a = terms_.begin();
    auto b = o.terms_.begin();
    while (a != terms_.end() || b != o.terms_.end()) {
      if (b == o.terms_.end() || (a != terms_.end() && a->first < b->first)) {
        merged.push_back(std::move(*a++));
      } else if (a == terms_.end() || b->first < a->first) {
        merged.push_back(*b++);
      } else {
        T sum = a->second + b->second;
        if (!coeff_traits<T>::is_zero(sum)) merged.emplace_back(a->first, std::move(sum));
        ++a;
        ++b;
      }
    }
    terms_ = std::move(merged);
    return *this;
  }

  GrassmannElement& operator-=(const GrassmannElement& o) { return *this += -o; }

  GrassmannElement& operator*=(const T& c) {
    if (coeff_traits<T>::is_zero(c)) {
      terms_.clear();
      return *this;
    }
    for (auto& t : terms_) t.second *= c;
    std::erase_if(terms_, [](const Term& t) { return coeff_traits<T>::is_zero(t.second); });
    return *this;
  }

  friend GrassmannElement operator-(GrassmannElement a) {
    for (auto& t : a.terms_) t.second = -t.second;
    return a;
  }
  friend GrassmannElement operator+(GrassmannElement a, const GrassmannElement& b) { return a += b; }
  friend GrassmannElement operator-(GrassmannElement a, const GrassmannElement& b) { return a -= b; }
  friend GrassmannElement operator*(GrassmannElement a, const T& c) { return a *= c; }
  friend GrassmannElement operator*(const T& c, GrassmannElement a) { return a *= c; }

  /// Applies `f` to every coefficient, producing an element over another ring.
  template <class F>
  auto map_coefficients(F&& f) const -> GrassmannElement<decltype(f(std::declval<const T&>()))> {
    using U = decltype(f(std::declval<const T&>()));
    TermAccumulator<U> acc;
    for (const auto& [m, c] : terms_) acc.add(m, f(c));
    return std::move(acc).finish(universe_);
  }

  void require_same(const GrassmannElement& o) const {
    if (!(universe_ == o.universe_)) throw std::invalid_argument("Grassmann elements over different universes");
  }

 private:
  friend class TermAccumulator<T>;
  Universe universe_{};
  std::vector<Term> terms_;  // sorted by monomial, no zero coefficients
};

template <class T>
GrassmannElement<T> TermAccumulator<T>::finish(const Universe& u) && {
  GrassmannElement<T> e(u);
  e.terms_.reserve(terms_.size());
  for (auto& [mask, c] : terms_)
    if (!coeff_traits<T>::is_zero(c)) e.terms_.emplace_back(Monomial{mask}, std::move(c));
  std::sort(e.terms_.begin(), e.terms_.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  terms_.clear();
  return e;
}

template <class T>
GrassmannElement<T> operator*(const GrassmannElement<T>& a, const GrassmannElement<T>& b) {
  a.require_same(b);
  TermAccumulator<T> acc;
  for (const auto& [ma, ca] : a.terms())
    for (const auto& [mb, cb] : b.terms()) {
      if (ma.mask & mb.mask) continue;
      T c = ca * cb;
      if (detail::product_sign(ma.mask, mb.mask) < 0) c = -c;
      acc.add(Monomial{ma.mask | mb.mask}, c);
    }
  return std::move(acc).finish(a.universe());
}

template <class T>
GrassmannElement<T> multiply(const GrassmannElement<T>& a, const GrassmannElement<T>& b) {
  return a * b;
}

/// Positive discrete measure on the sites: integral dX f(X) = sum_X w(X) f(X).
template <class T>
struct SiteWeights {
  std::vector<T> w;

  static SiteWeights unit(int sites) { return {std::vector<T>(static_cast<std::size_t>(sites), coeff_traits<T>::one())}; }

  void validate(int sites) const {
    if (static_cast<int>(w.size()) != sites) throw std::invalid_argument("site weight count does not match sites");
    for (const auto& x : w)
      if (!(x > 0)) throw std::invalid_argument("site weights must be positive");
  }
};

/// Left derivative d/d g, normalised so that d/dpsi(X) psi(Y) = [X=Y] / w(Y).
template <class T>
GrassmannElement<T> derive(const GrassmannElement<T>& v, const Generator& g, const SiteWeights<T>& weights) {
  const Universe& u = v.universe();
  weights.validate(u.sites);
  const int b = u.bit(g);
  const std::uint64_t bit = std::uint64_t{1} << b;
  TermAccumulator<T> acc;
  const T scale = coeff_traits<T>::one() / weights.w[static_cast<std::size_t>(g.site)];
  for (const auto& [m, c] : v.terms()) {
    if (!(m.mask & bit)) continue;
    T coeff = c * scale;
    if (std::popcount(m.mask & detail::below(b)) & 1) coeff = -coeff;
    acc.add(Monomial{m.mask & ~bit}, coeff);
  }
  return std::move(acc).finish(u);
}

template <class T>
GrassmannElement<T> derive(const GrassmannElement<T>& v, const Generator& g) {
  return derive(v, g, SiteWeights<T>::unit(v.universe().sites));
}

template <class T>
bool is_even(const GrassmannElement<T>& v) {
  return std::all_of(v.terms().begin(), v.terms().end(), [](const auto& t) { return t.first.degree() % 2 == 0; });
}

/// exp(v) = sum_k v^k / k!, terminating by nilpotency.
template <class T>
GrassmannElement<T> exp(const GrassmannElement<T>& v) {
  const Universe& u = v.universe();
  T prefactor = coeff_traits<T>::one();
  GrassmannElement<T> nilpotent = v;
  if (!coeff_traits<T>::is_zero(v.constant_term())) {
    if constexpr (coeff_traits<T>::exact) {
      throw std::domain_error("exp of an element with nonzero constant term is not exact");
    } else {
      prefactor = std::exp(v.constant_term());
      nilpotent = v.without_constant();
    }
  }
  GrassmannElement<T> result = GrassmannElement<T>::one(u);
  GrassmannElement<T> term = GrassmannElement<T>::one(u);
  for (long k = 1; k <= u.generator_count() + 1; ++k) {
    term = term * nilpotent;
    if (term.is_zero()) break;
    term *= coeff_traits<T>::from_rational(Rational(1, k));
    result += term;
  }
  if constexpr (!coeff_traits<T>::exact) result *= prefactor;
  return result;
}

/// log(1 + v) = sum_k (-1)^{k+1} v^k / k for v with zero constant term.
template <class T>
GrassmannElement<T> log1p(const GrassmannElement<T>& v) {
  if (!coeff_traits<T>::is_zero(v.constant_term()))
    throw std::domain_error("log1p: argument must have zero constant term (1+v must have constant term 1)");
  const Universe& u = v.universe();
  GrassmannElement<T> result(u);
  GrassmannElement<T> power = v;
  for (long k = 1; !power.is_zero(); ++k) {
    GrassmannElement<T> term = power * coeff_traits<T>::from_rational(Rational(k % 2 ? 1 : -1, k));
    result += term;
    power = power * v;
  }
  return result;
}

/// log(u) for u with constant term exactly 1.
template <class T>
GrassmannElement<T> log(const GrassmannElement<T>& u) {
  if (!(u.constant_term() == coeff_traits<T>::one()))
    throw std::domain_error("log: constant term must equal 1");
  return log1p(u - GrassmannElement<T>::one(u.universe()));
}

/// Copies an unreplicated element onto replica q of a p-fold replicated universe.
template <class T>
GrassmannElement<T> lift_to_replica(const GrassmannElement<T>& v, int q, int p) {
  const Universe& from = v.universe();
  if (from.replicas != 0) throw std::invalid_argument("lift_to_replica expects an unreplicated element");
  Universe to{from.sites, p};
  to.validate();
  if (q < 1 || q > p) throw std::out_of_range("replica index out of range");
  const int shift = (q - 1) * 2 * from.sites;
  TermAccumulator<T> acc;
  for (const auto& [m, c] : v.terms()) acc.add(Monomial{m.mask << shift}, c);
  return std::move(acc).finish(to);
}

/// Sets psi_q := psi and psibar_q := psibar for every replica q, with the sign
/// of reordering into the unreplicated canonical order.
template <class T>
GrassmannElement<T> identify_replicas(const GrassmannElement<T>& v) {
  const Universe& from = v.universe();
  Universe to{from.sites, 0};
  if (from.replicas == 0) return v;
  const int width = 2 * from.sites;
  TermAccumulator<T> acc;
  std::vector<int> targets;
  for (const auto& [m, c] : v.terms()) {
    std::uint64_t image = 0;
    bool vanishes = false;
    targets.clear();
    for (std::uint64_t rest = m.mask; rest; rest &= rest - 1) {
      const int t = std::countr_zero(rest) % width;
      if ((image >> t) & 1U) {
        vanishes = true;
        break;
      }
      image |= std::uint64_t{1} << t;
      targets.push_back(t);
    }
    if (vanishes) continue;
    acc.add(Monomial{image}, detail::sort_sign(targets) < 0 ? T(-c) : c);
  }
  return std::move(acc).finish(to);
}

/// Generators of a monomial as a list (canonical order).
inline std::vector<Generator> generators_of(const Universe& u, Monomial m) {
  std::vector<Generator> out;
  for (std::uint64_t rest = m.mask; rest; rest &= rest - 1) out.push_back(u.generator(std::countr_zero(rest)));
  return out;
}

inline std::string to_string(const Universe& u, Monomial m) {
  if (m.mask == 0) return "1";
  std::string s;
  for (const auto& g : generators_of(u, m)) {
    s += g.kind == Kind::bar ? "pb(" : "p(";
    s += std::to_string(g.site);
    if (g.replica != 0) s += ";" + std::to_string(g.replica);
    s += ")";
  }
  return s;
}

template <class T>
std::string to_string(const GrassmannElement<T>& v) {
  if (v.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : v.terms()) {
    if (!first) os << " + ";
    first = false;
    os << "(" << to_string(c) << ")";
    if (m.mask) os << "*" << to_string(v.universe(), m);
  }
  return os.str();
}

template <class T>
std::ostream& operator<<(std::ostream& os, const GrassmannElement<T>& v) {
  return os << to_string(v);
}

}  // namespace fermicalc
