#pragma once

// Checks of the analyticity bounds for the effective action and the decay
// bounds for cumulants. Left sides are computed in the scalar type itself
// (exact for rationals). Right sides involve logs and square roots; they are
// evaluated in long double and pushed down by a relative 1e-12 before the
// comparison, so an exact-mode pass is not an artifact of rounding.

#include "connected.hpp"
#include "gaussian.hpp"
#include "norms.hpp"
#include "random.hpp"
#include "trees.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace fermicalc {

enum class BoundStatus { pass, fail, out_of_domain };

inline const char* to_string(BoundStatus s) {
  switch (s) {
    case BoundStatus::pass: return "pass";
    case BoundStatus::fail: return "fail";
    case BoundStatus::out_of_domain: return "out-of-domain";
  }
  return "?";
}

struct BoundReport {
  std::string claim;
  std::string instance;
  std::string lhs_text;  // exact rational or %.17g
  long double lhs = 0;
  long double rhs = 0;
  BoundStatus status = BoundStatus::pass;
  std::string note;

  bool passed() const { return status == BoundStatus::pass; }
  bool failed() const { return status == BoundStatus::fail; }
  long double margin() const { return rhs - lhs; }
};

inline constexpr long double rhs_shrink = 1e-12L;
inline constexpr double float_tolerance = 1e-9;

namespace detail {

template <ScalarType T>
long double as_long_double(const T& x) {
  return static_cast<long double>(coeff_traits<T>::to_double(x));
}

/// lhs <= rhs, with rhs pushed down first. In exact mode the reduced rhs is
/// rounded down to a double and compared as a rational.
template <ScalarType T>
bool compare_bound(const T& lhs, long double rhs) {
  if (std::isinf(rhs) && rhs > 0) return true;
  const long double lowered = rhs - std::fabs(rhs) * rhs_shrink;
  if constexpr (coeff_traits<T>::exact) {
    double d = static_cast<double>(lowered);
    if (static_cast<long double>(d) > lowered) d = std::nextafter(d, -std::numeric_limits<double>::infinity());
    return lhs <= exact_from_double(d);
  } else {
    return static_cast<long double>(lhs) <= static_cast<long double>(rhs) * (1 + float_tolerance) + 1e-300L;
  }
}

template <ScalarType T>
BoundReport make_report(std::string claim, const T& lhs, long double rhs) {
  BoundReport r;
  r.claim = std::move(claim);
  r.lhs_text = to_string(lhs);
  r.lhs = as_long_double(lhs);
  r.rhs = rhs;
  r.status = compare_bound(lhs, rhs) ? BoundStatus::pass : BoundStatus::fail;
  return r;
}

template <ScalarType T>
BoundReport make_exact_report(std::string claim, const T& lhs, const T& rhs) {
  BoundReport r;
  r.claim = std::move(claim);
  r.lhs_text = to_string(lhs);
  r.lhs = as_long_double(lhs);
  r.rhs = as_long_double(rhs);
  r.status = lhs <= rhs ? BoundStatus::pass : BoundStatus::fail;
  return r;
}

}  // namespace detail

/// sqrt(q) when q is the square of a rational.
inline std::optional<Rational> exact_sqrt(const Rational& q) {
  if (sgn(q) < 0) return std::nullopt;
  mpz_class num, den;
  if (!mpz_perfect_square_p(q.get_num_mpz_t()) || !mpz_perfect_square_p(q.get_den_mpz_t())) return std::nullopt;
  mpz_sqrt(num.get_mpz_t(), q.get_num_mpz_t());
  mpz_sqrt(den.get_mpz_t(), q.get_den_mpz_t());
  return Rational(num, den);
}

/// ||v||_h at a real h from exact per-degree norms.
template <ScalarType T>
long double seminorm_at(const std::map<int, T>& norms, long double h) {
  long double total = 0;
  for (const auto& [degree, norm] : norms) total += detail::as_long_double(norm) * std::pow(h, static_cast<long double>(degree));
  return total;
}

/// Constants shared by the checks: h, the shifted parameters, gamma, omega.
template <ScalarType T>
struct NormParams {
  T h{};
  T gamma_squared{};
  long double gamma = 0;
  T omega{};
  SiteWeights<T> weights;

  long double h_plus_three_gamma() const { return detail::as_long_double(h) + 3 * gamma; }
  long double h_plus_two_gamma() const { return detail::as_long_double(h) + 2 * gamma; }
  long double omega_ld() const { return detail::as_long_double(omega); }
};

template <ScalarType T>
NormParams<T> make_norm_params(const Covariance<T>& cov, const T& h, std::optional<SiteWeights<T>> weights = std::nullopt) {
  if (!(h > T(0))) throw std::domain_error("norm parameter h must be positive");
  NormParams<T> np;
  np.h = h;
  np.weights = weights ? *weights : SiteWeights<T>::unit(cov.sites());
  const auto info = gram_constant(cov);
  np.gamma_squared = info.gamma_squared;
  np.gamma = info.gamma();
  np.omega = decay_norm(cov, info.gamma_squared, np.weights).omega;
  return np;
}

enum class ShiftVariant { three_gamma, two_gamma };

inline const char* to_string(ShiftVariant v) { return v == ShiftVariant::three_gamma ? "h+3gamma" : "h+2gamma"; }

template <ScalarType T>
struct EffectiveActionBounds {
  BoundReport log_bound;
  BoundReport remainder_bound;
  long double smallness = 0;  // omega_eff ||V||_{h_eff}
  /// data only: does the log bound also hold with h + gamma and omega?
  std::optional<bool> gamma_shift_holds;
};

/// Precomputed W and its Taylor coefficients for repeated checks.
template <ScalarType T>
struct EffectiveActionData {
  GrassmannElement<T> w;
  std::vector<GrassmannElement<T>> taylor;  // W_p / p!, p = 1..P
};

template <ScalarType T>
EffectiveActionData<T> effective_action_data(const Covariance<T>& cov, const GrassmannElement<T>& v, int max_order) {
  EffectiveActionData<T> d{effective_action_direct(cov, v).first, effective_action_taylor(cov, v, max_order)};
  return d;
}

template <ScalarType T>
EffectiveActionBounds<T> check_effective_action_bounds(const Covariance<T>& cov, const GrassmannElement<T>& v, const NormParams<T>& np, int max_order,
                                 ShiftVariant variant, const EffectiveActionData<T>* precomputed = nullptr) {
  require_interaction(v);
  if (max_order < 1) throw std::invalid_argument("remainder order P must be at least 1");
  const auto v_norms = norms_by_total_degree(v, np.weights);
  const long double omega = (variant == ShiftVariant::three_gamma ? 1 : 2) * np.omega_ld();
  const long double h_eff = variant == ShiftVariant::three_gamma ? np.h_plus_three_gamma() : np.h_plus_two_gamma();
  const long double x = omega * seminorm_at(v_norms, h_eff);
  EffectiveActionBounds<T> out;
  out.smallness = x;
  const std::string tag = to_string(variant);
  if (!(x < 1)) {
    for (auto* r : {&out.log_bound, &out.remainder_bound}) {
      r->status = BoundStatus::out_of_domain;
      r->note = "omega ||V|| = " + to_string(x) + " >= 1";
    }
    out.log_bound.claim = "log-bound " + tag;
    out.remainder_bound.claim = "remainder-bound " + tag;
    return out;
  }
  EffectiveActionData<T> local;
  if (!precomputed) {
    try {
      local = effective_action_data(cov, v, max_order);
    } catch (const OutOfDomain& e) {
      for (auto* r : {&out.log_bound, &out.remainder_bound}) {
        r->status = BoundStatus::out_of_domain;
        r->note = e.what();
      }
      return out;
    }
    precomputed = &local;
  }
  if (static_cast<int>(precomputed->taylor.size()) < max_order) throw std::invalid_argument("precomputed orders too short");
  const T w_norm = seminorm_h(precomputed->w, np.h, np.weights);
  // omega = 0 means C = 0: then W = V and the bound reads ||V||_h <= ||V||_{h'}
  const long double log_rhs = omega == 0 ? seminorm_at(v_norms, h_eff) : -std::log1p(-x) / omega;
  out.log_bound = detail::make_report("log-bound " + tag, w_norm, log_rhs);
  GrassmannElement<T> rest = precomputed->w;
  for (int p = 0; p < max_order; ++p) rest -= precomputed->taylor[static_cast<std::size_t>(p)];
  const long double v_eff = seminorm_at(v_norms, h_eff);
  const long double rem_rhs = std::pow(omega, static_cast<long double>(max_order)) *
                              std::pow(v_eff, static_cast<long double>(max_order + 1)) / (1 - x);
  out.remainder_bound = detail::make_report("remainder-bound " + tag + " P=" + std::to_string(max_order),
                                            seminorm_h(rest, np.h, np.weights), rem_rhs);
  if (variant == ShiftVariant::three_gamma) {
    const long double y = np.omega_ld() * seminorm_at(v_norms, detail::as_long_double(np.h) + np.gamma);
    if (y < 1) {
      const long double shifted = np.omega_ld() == 0 ? seminorm_at(v_norms, detail::as_long_double(np.h) + np.gamma)
                                                     : -std::log1p(-y) / np.omega_ld();
      out.gamma_shift_holds = detail::compare_bound(w_norm, shifted);
    }
  }
  return out;
}

/// ||mu_C * V||_h <= ||V||_{h+gamma}.
template <ScalarType T>
BoundReport check_convolution_bound(const Covariance<T>& cov, const GrassmannElement<T>& v, const NormParams<T>& np) {
  const T lhs = seminorm_h(convolve_wick(cov, v), np.h, np.weights);
  if constexpr (coeff_traits<T>::exact) {
    if (auto gamma = exact_sqrt(np.gamma_squared))
      return detail::make_exact_report("convolution-bound", lhs, seminorm_h(v, T(np.h + *gamma), np.weights));
  }
  const long double rhs = seminorm_at(norms_by_total_degree(v, np.weights), detail::as_long_double(np.h) + np.gamma);
  return detail::make_report("convolution-bound", lhs, rhs);
}

/// Rescales v so that max(omega ||v||_{h'}, 2 omega ||v||_{h''}) equals a
/// uniform draw from (0.1, 0.9), up to a 2^-20 rounding of the factor
/// (the seminorm is homogeneous of degree one).
template <ScalarType T>
GrassmannElement<T> scale_into_window(Rng& rng, const GrassmannElement<T>& v, const NormParams<T>& np) {
  const auto norms = norms_by_total_degree(v, np.weights);
  if (np.omega_ld() == 0 || norms.empty()) return v;
  std::uniform_real_distribution<double> target(0.1, 0.9);
  const double t = target(rng);
  const long double size = std::max(np.omega_ld() * seminorm_at(norms, np.h_plus_three_gamma()),
                                     2 * np.omega_ld() * seminorm_at(norms, np.h_plus_two_gamma()));
  const long double lo = t / size;
  const long double scaled = std::round(lo * (1 << 20));
  if constexpr (coeff_traits<T>::exact) {
    return v * Rational(static_cast<long>(std::max<long double>(scaled, 1)), 1 << 20);
  } else {
    return v * static_cast<double>(lo);
  }
}

// ---------------------------------------------------------------------------
// Cumulant decay

/// A pseudometric on the sites with fitted decay constants.
struct PseudoMetricModel {
  Matrix<double> distance;
  double decay_length = std::numeric_limits<double>::infinity();  // ell_C
  double decay_constant = 0;                                      // omega tilde

  static PseudoMetricModel from_table(Matrix<double> d) {
    PseudoMetricModel m;
    m.distance = std::move(d);
    m.validate();
    return m;
  }

  /// Euclidean distances between coordinate vectors.
  static PseudoMetricModel from_coordinates(const std::vector<std::vector<double>>& coords) {
    Matrix<double> d(coords.size(), coords.size());
    for (std::size_t i = 0; i < coords.size(); ++i)
      for (std::size_t j = 0; j < coords.size(); ++j) {
        if (coords[i].size() != coords[j].size()) throw InputError(InputErrorKind::dimension, "coordinates differ in dimension");
        double s = 0;
        for (std::size_t k = 0; k < coords[i].size(); ++k) s += (coords[i][k] - coords[j][k]) * (coords[i][k] - coords[j][k]);
        d(i, j) = std::sqrt(s);
      }
    return from_table(std::move(d));
  }

  void validate() const {
    const std::size_t n = distance.rows();
    if (distance.cols() != n) throw InputError(InputErrorKind::dimension, "distance table must be square");
    for (std::size_t i = 0; i < n; ++i) {
      if (distance(i, i) != 0) throw InputError(InputErrorKind::schema, "pseudometric needs d(X,X) = 0");
      for (std::size_t j = 0; j < n; ++j) {
        if (!(distance(i, j) >= 0) || !std::isfinite(distance(i, j)))
          throw InputError(InputErrorKind::schema, "distances must be finite and nonnegative");
        if (distance(i, j) != distance(j, i)) throw InputError(InputErrorKind::schema, "distance table must be symmetric");
        for (std::size_t k = 0; k < n; ++k)
          if (distance(i, k) > distance(i, j) + distance(j, k) + 1e-12 * (1 + distance(i, k)))
            throw InputError(InputErrorKind::schema, "distance table violates the triangle inequality");
      }
    }
  }

  double operator()(int x, int y) const { return distance(static_cast<std::size_t>(x), static_cast<std::size_t>(y)); }
};

/// Bold C(X,X') = max(|C(X,X')|, |C(X',X)|).
template <ScalarType T>
Matrix<double> symmetrized_abs(const Covariance<T>& cov) {
  const auto n = static_cast<std::size_t>(cov.sites());
  Matrix<double> out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      out(i, j) = std::max(std::fabs(coeff_traits<T>::to_double(cov.entries(i, j))),
                           std::fabs(coeff_traits<T>::to_double(cov.entries(j, i))));
  return out;
}

/// Fits ell from the log-slope of the largest |C| per distinct distance, then
/// the smallest omega tilde with bold C <= gamma^2 omega e^{-d/ell} everywhere.
template <ScalarType T>
void fit_decay(PseudoMetricModel& model, const Covariance<T>& cov, long double gamma_squared) {
  const Matrix<double> bold = symmetrized_abs(cov);
  const std::size_t n = bold.rows();
  if (model.distance.rows() != n) throw InputError(InputErrorKind::dimension, "metric size does not match sites");
  std::map<double, double> largest;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) largest[model.distance(i, j)] = std::max(largest[model.distance(i, j)], bold(i, j));
  std::vector<std::pair<double, double>> pts;
  for (const auto& [d, c] : largest)
    if (c > 0) pts.emplace_back(d, std::log(c));
  model.decay_length = std::numeric_limits<double>::infinity();
  if (pts.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [x, y] : pts) {
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double k = static_cast<double>(pts.size());
    const double denom = k * sxx - sx * sx;
    if (denom > 0) {
      const double slope = (k * sxy - sx * sy) / denom;
      if (slope < 0) model.decay_length = -1 / slope;
    }
  }
  long double worst = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (bold(i, j) == 0) continue;
      const long double factor = std::isinf(model.decay_length) ? 1.0L : std::exp(static_cast<long double>(model.distance(i, j)) / model.decay_length);
      worst = std::max(worst, static_cast<long double>(bold(i, j)) * factor);
    }
  if (worst > 0 && gamma_squared <= 0) throw std::domain_error("nonzero covariance with zero Gram constant");
  // a hair above the exact maximum so the decay assumption holds after rounding
  model.decay_constant = worst == 0 ? 0.0 : static_cast<double>(worst / gamma_squared * (1 + 1e-12L));
}

/// psibar(Y_1..Y_mbar) psi(X_1..X_m) attached to one replica.
struct FieldMonomial {
  std::vector<int> unbar_sites;  // X
  std::vector<int> bar_sites;    // Y
  int degree() const { return static_cast<int>(unbar_sites.size() + bar_sites.size()); }
};

/// Cost of joining q and q' by a line: the closest psi site of one to a psibar site of the other.
inline double line_cost(const FieldMonomial& a, const FieldMonomial& b, const PseudoMetricModel& d) {
  double best = std::numeric_limits<double>::infinity();
  for (int x : a.unbar_sites)
    for (int y : b.bar_sites) best = std::min(best, d(x, y));
  for (int y : a.bar_sites)
    for (int x : b.unbar_sites) best = std::min(best, d(y, x));
  return best;
}

/// Tree distance: minimum over spanning trees of the summed line costs, by
/// exhaustive enumeration of labeled trees.
inline double tree_distance(const std::vector<FieldMonomial>& ms, const PseudoMetricModel& d) {
  const int p = static_cast<int>(ms.size());
  if (p < 2) throw std::invalid_argument("tree distance needs p >= 2");
  if (p > 8) throw std::out_of_range("tree distance enumerates trees for p <= 8 only");
  Matrix<double> cost(static_cast<std::size_t>(p), static_cast<std::size_t>(p));
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < p; ++b)
      cost(static_cast<std::size_t>(a), static_cast<std::size_t>(b)) =
          line_cost(ms[static_cast<std::size_t>(a)], ms[static_cast<std::size_t>(b)], d);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& t : enumerate_trees(p)) {
    double s = 0;
    for (const auto& e : t.edges) s += cost(static_cast<std::size_t>(e.a - 1), static_cast<std::size_t>(e.b - 1));
    best = std::min(best, s);
  }
  return best;
}

/// Truncated expectation of the monomials, field-independent part.
template <ScalarType T>
T cumulant(const Covariance<T>& cov, const std::vector<FieldMonomial>& ms) {
  const Universe u{cov.sites(), 0};
  std::vector<GrassmannElement<T>> vs;
  for (const auto& m : ms) {
    if (m.degree() == 0 || m.degree() % 2) throw std::invalid_argument("each monomial needs positive even degree");
    std::vector<Generator> gens;
    for (int y : m.bar_sites) gens.push_back(psibar(y));
    for (int x : m.unbar_sites) gens.push_back(psi(x));
    for (const auto& g : gens)
      if (g.site < 0 || g.site >= cov.sites()) throw InputError(InputErrorKind::dimension, "monomial site out of range");
    vs.push_back(GrassmannElement<T>::product_of(u, gens, coeff_traits<T>::one()));
  }
  return truncated_correlation(cov, vs).constant_term();
}

struct CumulantResult {
  BoundReport two_gamma_variant;    // (2 omega~)^{p-1} (2 gamma)^{m+mbar}
  BoundReport three_gamma_variant;  // omega~^{p-1} (3 gamma)^{m+mbar}
  double tree_length = 0;
};

template <ScalarType T>
CumulantResult check_cumulant_bound(const Covariance<T>& cov, const PseudoMetricModel& model, long double gamma,
                                    const std::vector<FieldMonomial>& ms) {
  const int p = static_cast<int>(ms.size());
  if (p < 2) throw std::invalid_argument("cumulant bound needs p >= 2");
  const T g = coeff_traits<T>::abs(cumulant(cov, ms));
  int total_degree = 0;
  for (const auto& m : ms) total_degree += m.degree();
  CumulantResult out;
  out.tree_length = tree_distance(ms, model);
  long double decay = std::isinf(out.tree_length) ? 0.0L
                      : std::isinf(model.decay_length) ? 1.0L
                                                       : std::exp(-static_cast<long double>(out.tree_length) / model.decay_length);
  long double fact = 1;
  for (int k = 2; k <= p - 2; ++k) fact *= k;
  const long double w = model.decay_constant;
  const long double three = fact * std::pow(w, p - 1) * std::pow(3 * gamma, total_degree) * decay;
  const long double two = fact * std::pow(2 * w, p - 1) * std::pow(2 * gamma, total_degree) * decay;
  out.three_gamma_variant = detail::make_report("cumulant-bound 3gamma", g, three);
  out.two_gamma_variant = detail::make_report("cumulant-bound 2gamma", g, two);
  return out;
}

}  // namespace fermicalc
