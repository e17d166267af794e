#pragma once

// Model files: sites, covariance, optional Gram vectors, interaction, metric
// and cumulant monomials as JSON (schema in docs/model.schema.json), plus the
// JSON spelling of elements used by the command-line tool.

#include "bounds.hpp"
#include "errors.hpp"
#include "gaussian.hpp"
#include "grassmann.hpp"
#include "scalar.hpp"

#include <json.hpp>

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fermicalc {

using Json = nlohmann::json;

enum class ArithmeticMode { exact, floating };

template <ScalarType T>
struct ModelSpec {
  int sites = 0;
  std::vector<std::vector<double>> coordinates;  // empty when not given
  SiteWeights<T> weights;
  Covariance<T> covariance;
  GrassmannElement<T> interaction{Universe{1, 0}};
  std::optional<PseudoMetricModel> metric;
  std::vector<std::vector<FieldMonomial>> cumulant_instances;
};

namespace detail {

[[noreturn]] inline void schema_error(const std::string& what) { throw InputError(InputErrorKind::schema, what); }

/// A scalar from a rational string or a JSON number. Exact mode only accepts
/// numbers whose decimal spelling is exactly the double.
template <ScalarType T>
T scalar_from_json(const Json& j, const std::string& where) {
  if (j.is_string()) {
    Rational q;
    try {
      q = parse_rational(j.get<std::string>());
    } catch (const std::invalid_argument& e) {
      schema_error(where + ": " + e.what());
    }
    if constexpr (coeff_traits<T>::exact) {
      return q;
    } else {
      return q.get_d();
    }
  }
  if (j.is_number_integer()) {
    const long long v = j.get<long long>();
    if constexpr (coeff_traits<T>::exact) {
      return Rational(static_cast<long>(v));
    } else {
      return static_cast<double>(v);
    }
  }
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if constexpr (coeff_traits<T>::exact) {
      if (!std::isfinite(v) || !double_is_exact_decimal(v))
        schema_error(where + ": " + to_string(v) + " is not exactly representable; give it as a rational string");
      return exact_from_double(v);
    } else {
      return v;
    }
  }
  schema_error(where + ": expected a number or rational string");
}

inline const Json& require(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) schema_error(where + ": missing '" + key + "'");
  return j.at(key);
}

inline std::vector<int> site_list(const Json& j, int sites, const std::string& where) {
  if (!j.is_array()) schema_error(where + ": expected a list of site indices");
  std::vector<int> out;
  for (const auto& x : j) {
    if (!x.is_number_integer()) schema_error(where + ": site indices must be integers");
    const long long s = x.get<long long>();
    if (s < 0 || s >= sites) throw InputError(InputErrorKind::dimension, where + ": site " + std::to_string(s) + " out of range");
    out.push_back(static_cast<int>(s));
  }
  return out;
}

template <ScalarType T>
Matrix<T> square_from_json(const Json& j, int n, const std::string& where) {
  if (!j.is_array()) schema_error(where + ": expected a list of rows");
  if (static_cast<int>(j.size()) != n) throw InputError(InputErrorKind::dimension, where + " has " + std::to_string(j.size()) + " rows, expected " + std::to_string(n));
  Matrix<T> m(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array()) schema_error(where + ": rows must be lists");
    if (static_cast<int>(row.size()) != n) throw InputError(InputErrorKind::dimension, where + " row " + std::to_string(i) + " has wrong length");
    for (int k = 0; k < n; ++k)
      m(static_cast<std::size_t>(i), static_cast<std::size_t>(k)) =
          scalar_from_json<T>(row[static_cast<std::size_t>(k)], where + "[" + std::to_string(i) + "][" + std::to_string(k) + "]");
  }
  return m;
}

template <ScalarType T>
std::vector<std::vector<T>> vectors_from_json(const Json& j, const std::string& where) {
  if (!j.is_array()) schema_error(where + ": expected a list of vectors");
  std::vector<std::vector<T>> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array()) schema_error(where + ": vectors must be lists");
    std::vector<T> v;
    for (std::size_t k = 0; k < j[i].size(); ++k) v.push_back(scalar_from_json<T>(j[i][k], where + "[" + std::to_string(i) + "]"));
    out.push_back(std::move(v));
  }
  return out;
}

inline FieldMonomial monomial_from_json(const Json& j, int sites, const std::string& where) {
  FieldMonomial m;
  if (j.contains("bar")) m.bar_sites = site_list(j.at("bar"), sites, where + ".bar");
  if (j.contains("unbar")) m.unbar_sites = site_list(j.at("unbar"), sites, where + ".unbar");
  return m;
}

}  // namespace detail

template <ScalarType T>
ModelSpec<T> parse_model(const Json& j) {
  using namespace detail;
  if (!j.is_object()) schema_error("model must be a JSON object");
  ModelSpec<T> model;
  const Json& sites = require(j, "sites", "model");
  if (sites.is_number_integer()) {
    model.sites = sites.get<int>();
  } else if (sites.is_array()) {
    model.sites = static_cast<int>(sites.size());
    for (std::size_t i = 0; i < sites.size(); ++i) {
      const auto& s = sites[i];
      if (!s.is_object()) schema_error("sites[" + std::to_string(i) + "] must be an object");
      if (s.contains("coords")) {
        if (!s.at("coords").is_array()) schema_error("sites[" + std::to_string(i) + "].coords must be a list");
        std::vector<double> c;
        for (const auto& x : s.at("coords")) {
          if (!x.is_number()) schema_error("coordinates must be numbers");
          c.push_back(x.get<double>());
        }
        model.coordinates.push_back(std::move(c));
      }
    }
    if (!model.coordinates.empty() && static_cast<int>(model.coordinates.size()) != model.sites)
      schema_error("either all sites or none carry coordinates");
  } else {
    schema_error("'sites' must be a count or a list");
  }
  if (model.sites < 1) schema_error("need at least one site");
  const Universe u{model.sites, 0};
  try {
    u.validate();
  } catch (const std::exception& e) {
    throw InputError(InputErrorKind::dimension, e.what());
  }

  model.weights = SiteWeights<T>::unit(model.sites);
  if (j.contains("site_weights")) {
    const auto& w = j.at("site_weights");
    if (!w.is_array()) schema_error("site_weights must be a list");
    if (static_cast<int>(w.size()) != model.sites) throw InputError(InputErrorKind::dimension, "site_weights length differs from sites");
    for (std::size_t i = 0; i < w.size(); ++i) model.weights.w[i] = scalar_from_json<T>(w[i], "site_weights");
    for (const auto& x : model.weights.w)
      if (!(x > T(0))) schema_error("site weights must be positive");
  }

  Matrix<T> c = square_from_json<T>(require(j, "covariance", "model"), model.sites, "covariance");
  std::optional<GramFactorization<T>> gram;
  if (j.contains("gram")) {
    const auto& g = j.at("gram");
    gram = GramFactorization<T>{vectors_from_json<T>(require(g, "f", "gram"), "gram.f"),
                                vectors_from_json<T>(require(g, "g", "gram"), "gram.g")};
  }
  model.covariance = Covariance<T>(std::move(c), std::move(gram));
  gram_constant(model.covariance);  // verifies a declared factorization

  model.interaction = GrassmannElement<T>(u);
  if (j.contains("interaction")) {
    const auto& terms = j.at("interaction");
    if (!terms.is_array()) schema_error("interaction must be a list of terms");
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const std::string where = "interaction[" + std::to_string(i) + "]";
      const FieldMonomial m = monomial_from_json(terms[i], model.sites, where);
      if (m.degree() == 0) schema_error(where + ": terms need at least one field");
      if (m.degree() % 2) schema_error(where + ": interaction must be even");
      std::vector<Generator> gens;
      for (int y : m.bar_sites) gens.push_back(psibar(y));
      for (int x : m.unbar_sites) gens.push_back(psi(x));
      model.interaction += GrassmannElement<T>::product_of(u, gens, scalar_from_json<T>(require(terms[i], "coeff", where), where + ".coeff"));
    }
  }

  if (j.contains("metric")) {
    const auto& m = j.at("metric");
    if (m.contains("table")) {
      model.metric = PseudoMetricModel::from_table(square_from_json<double>(m.at("table"), model.sites, "metric.table"));
    } else if (m.value("coordinates", false)) {
      if (model.coordinates.empty()) schema_error("metric uses coordinates but sites carry none");
      model.metric = PseudoMetricModel::from_coordinates(model.coordinates);
    } else {
      schema_error("metric needs 'table' or \"coordinates\": true");
    }
  }

  if (j.contains("cumulant_monomials")) {
    const auto& list = j.at("cumulant_monomials");
    if (!list.is_array()) schema_error("cumulant_monomials must be a list of instances");
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (!list[i].is_array() || list[i].size() < 2) schema_error("each cumulant instance needs at least two monomials");
      std::vector<FieldMonomial> inst;
      for (std::size_t q = 0; q < list[i].size(); ++q) {
        const std::string where = "cumulant_monomials[" + std::to_string(i) + "][" + std::to_string(q) + "]";
        FieldMonomial fm = monomial_from_json(list[i][q], model.sites, where);
        if (fm.degree() == 0 || fm.degree() % 2) schema_error(where + ": degree must be positive and even");
        inst.push_back(std::move(fm));
      }
      model.cumulant_instances.push_back(std::move(inst));
    }
  }
  return model;
}

template <ScalarType T>
ModelSpec<T> load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(InputErrorKind::schema, "cannot open model file " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::parse_error& e) {
    throw InputError(InputErrorKind::schema, std::string("invalid JSON: ") + e.what());
  }
  return parse_model<T>(j);
}

/// Exact values become rational strings, floats "%.17g" strings.
template <ScalarType T>
Json scalar_to_json(const T& x) {
  return to_string(x);
}

/// Terms as {bar, unbar, coeff} in canonical order: psibar(bar) psi(unbar).
template <ScalarType T>
Json element_to_json(const GrassmannElement<T>& v) {
  Json out = Json::array();
  for (const auto& [mono, c] : v.terms()) {
    Json bar = Json::array(), unbar = Json::array();
    for (const auto& g : generators_of(v.universe(), mono)) (g.kind == Kind::bar ? bar : unbar).push_back(g.site);
    out.push_back({{"bar", bar}, {"unbar", unbar}, {"coeff", scalar_to_json(c)}});
  }
  return out;
}

inline Json report_to_json(const BoundReport& r) {
  Json j{{"claim", r.claim}, {"lhs", r.lhs_text}, {"rhs", to_string(r.rhs)}, {"status", to_string(r.status)}};
  if (!r.instance.empty()) j["instance"] = r.instance;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

inline std::string csv_header() { return "instance,claim,lhs,rhs,status"; }

inline std::string report_to_csv(const BoundReport& r) {
  std::ostringstream s;
  s << r.instance << ',' << r.claim << ',' << r.lhs_text << ',' << to_string(r.rhs) << ',' << to_string(r.status);
  return s.str();
}

}  // namespace fermicalc
