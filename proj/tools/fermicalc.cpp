// Command-line front end: loads a model file, runs one computation, and writes
// a JSON report (plus CSV tables for sweeps).
//
// Exit codes: 0 success, 2 invariant violation or method disagreement,
// 3 input error, 4 outside the domain of the checked statement.

#include <fermicalc/fermicalc.hpp>
#include <fermicalc/random.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fc = fermicalc;
using fc::Json;
using fc::Rational;

namespace {

enum Exit : int { ok = 0, violation = 2, input_error = 3, out_of_domain = 4 };

struct RunConfig {
  std::string model;
  std::string mode = "exact";
  std::string h = "1";
  int order = 2;  // P
  int p = 0;
  int grid = 5;
  int sweep = 0;
  std::uint64_t seed = 1;
  std::string out;
  std::string csv;
  bool naive = false;
  std::string s_values;
  std::string tree;
};

/// Thrown for bad flag values so they share the input-error exit code.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

bool exact_mode(const RunConfig& cfg) {
  if (cfg.mode == "exact") return true;
  if (cfg.mode == "float") return false;
  throw UsageError("--mode must be exact or float");
}

void require_model(const RunConfig& cfg) {
  if (cfg.model.empty()) throw UsageError("this subcommand needs --model");
}

void require_p(int p, int lo, int hi) {
  if (p < lo || p > hi) throw UsageError("--p must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw UsageError("cannot write " + path);
  f << text;
}

void emit(const RunConfig& cfg, const Json& j) { write_text(cfg.out, j.dump(2) + "\n"); }

void emit_csv(const RunConfig& cfg, const std::vector<fc::BoundReport>& reports) {
  if (cfg.csv.empty()) return;
  std::string text = fc::csv_header() + "\n";
  for (const auto& r : reports) text += fc::report_to_csv(r) + "\n";
  write_text(cfg.csv, text);
}

template <fc::ScalarType T>
T parse_h(const std::string& text) {
  Rational q;
  try {
    q = fc::parse_rational(text);
  } catch (const std::invalid_argument&) {
    throw UsageError("--h must be a rational such as 1 or 3/2");
  }
  if (sgn(q) <= 0) throw UsageError("--h must be positive");
  if constexpr (fc::coeff_traits<T>::exact) {
    return q;
  } else {
    return q.get_d();
  }
}

std::vector<Rational> parse_list(const std::string& text) {
  std::vector<Rational> out;
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, ',');) {
    try {
      out.push_back(fc::parse_rational(item));
    } catch (const std::invalid_argument&) {
      throw UsageError("cannot parse '" + item + "' in --s");
    }
  }
  return out;
}

/// "1-2,1-3" -> tree on p vertices.
fc::Tree parse_tree(int p, const std::string& text) {
  std::vector<fc::Edge> edges;
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, ',');) {
    int a = 0, b = 0;
    char dash = 0;
    std::stringstream e(item);
    if (!(e >> a >> dash >> b) || dash != '-' || a < 1 || b < 1 || a > p || b > p || a == b)
      throw UsageError("bad tree line '" + item + "'");
    edges.push_back(fc::make_edge(a, b));
  }
  try {
    return fc::tree_from_edges(p, edges);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

Json tree_json(const fc::Tree& t) {
  Json edges = Json::array();
  for (const auto& e : t.edges) edges.push_back({e.a, e.b});
  return edges;
}

Json matrix_json(const fc::Matrix<Rational>& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(fc::to_string(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

Json spoly_json(const fc::SPolynomial& poly, int vars) {
  Json out = Json::array();
  for (const auto& [e, c] : poly.terms()) {
    Json exps = Json::array();
    for (int i = 1; i <= vars; ++i) exps.push_back(fc::SPolynomial::exponent(e, i));
    out.push_back({{"exponents", exps}, {"coeff", fc::to_string(c)}});
  }
  return out;
}

Json rationals_json(const std::vector<Rational>& v) {
  Json out = Json::array();
  for (const auto& q : v) out.push_back(fc::to_string(q));
  return out;
}

template <fc::ScalarType T>
fc::GrassmannElement<T> from_exact(const fc::GrassmannElement<Rational>& v) {
  if constexpr (fc::coeff_traits<T>::exact) {
    return v;
  } else {
    return v.map_coefficients([](const Rational& c) { return c.get_d(); });
  }
}

double max_abs_difference(const fc::GrassmannElement<double>& a, const fc::GrassmannElement<double>& b) {
  double worst = 0;
  const auto diff = a + (-b);
  for (const auto& [m, c] : diff.terms()) worst = std::max(worst, std::fabs(c));
  return worst;
}

// ---------------------------------------------------------------------------

template <fc::ScalarType T>
int run_effective_action(const RunConfig& cfg) {
  require_model(cfg);
  if (cfg.order < 1 || cfg.order > fc::subset_p_max) throw UsageError("--P must lie in [1, 12]");
  const auto model = fc::load_model<T>(cfg.model);
  const auto report = fc::effective_action(model.covariance, model.interaction, cfg.order);
  Json orders = Json::array();
  for (std::size_t p = 0; p < report.wp.size(); ++p)
    orders.push_back({{"p", p + 1}, {"w_p", fc::element_to_json(report.wp[p])}});
  emit(cfg, {{"mode", cfg.mode}, {"sites", model.sites}, {"z", fc::scalar_to_json(report.z)},
             {"w", fc::element_to_json(report.w)}, {"orders", orders}});
  return ok;
}

int run_compare_methods(const RunConfig& cfg) {
  require_model(cfg);
  const int p = cfg.p == 0 ? 3 : cfg.p;
  require_p(p, 1, 6);
  Json j{{"mode", cfg.mode}, {"p", p}};
  bool agree = true;
  if (exact_mode(cfg)) {
    const auto model = fc::load_model<Rational>(cfg.model);
    const std::vector<fc::GrassmannElement<Rational>> vs(static_cast<std::size_t>(p), model.interaction);
    const auto truncated = fc::truncated_correlation(model.covariance, vs);
    const bool direct = fc::direct_resummation(model.covariance, vs) == truncated;
    const bool bbf = fc::bbf_correlation(model.covariance, vs) == truncated;
    auto product = fc::GrassmannElement<Rational>::one(model.interaction.universe());
    for (const auto& v : vs) product = product * v;
    const bool laplace = fc::convolve_laplace(model.covariance, vs) == fc::convolve_wick(model.covariance, product);
    agree = direct && bbf && laplace;
    j["truncated"] = fc::element_to_json(truncated);
    j["direct_matches"] = direct;
    j["bbf_matches"] = bbf;
    j["laplace_matches_wick"] = laplace;
  } else {
    // bbf_correlation is exact-only; float mode cross-checks the quadrature form instead
    const auto model = fc::load_model<double>(cfg.model);
    const std::vector<fc::GrassmannElement<double>> vs(static_cast<std::size_t>(p), model.interaction);
    const auto truncated = fc::truncated_correlation(model.covariance, vs);
    double scale = 1;
    for (const auto& [m, c] : truncated.terms()) scale = std::max(scale, std::fabs(c));
    const double tol = fc::float_tolerance * scale;
    const double direct = max_abs_difference(fc::direct_resummation(model.covariance, vs), truncated);
    agree = direct <= tol;
    j["truncated"] = fc::element_to_json(truncated);
    j["direct_max_difference"] = fc::to_string(direct);
    if (p >= 2 && p <= 4) {
      const double quad = max_abs_difference(fc::tree_integral_quadrature(model.covariance, vs), truncated);
      j["quadrature_max_difference"] = fc::to_string(quad);
      agree = agree && quad <= tol;
    }
    j["tolerance"] = fc::to_string(tol);
  }
  j["agree"] = agree;
  emit(cfg, j);
  return agree ? ok : violation;
}

template <fc::ScalarType T>
void add_bound_reports(const fc::Covariance<T>& cov, const fc::GrassmannElement<T>& v, const fc::NormParams<T>& np, int order,
                         const std::string& instance, std::vector<fc::BoundReport>& reports, int& shift_holds, int& shift_checked) {
  for (auto variant : {fc::ShiftVariant::three_gamma, fc::ShiftVariant::two_gamma}) {
    auto r = fc::check_effective_action_bounds(cov, v, np, order, variant);
    for (auto* b : {&r.log_bound, &r.remainder_bound}) {
      b->instance = instance;
      reports.push_back(*b);
    }
    if (r.gamma_shift_holds) {
      ++shift_checked;
      shift_holds += *r.gamma_shift_holds ? 1 : 0;
    }
  }
  auto conv = fc::check_convolution_bound(cov, v, np);
  conv.instance = instance;
  reports.push_back(conv);
}

template <fc::ScalarType T>
int run_verify_bounds(const RunConfig& cfg) {
  require_model(cfg);
  if (cfg.order < 1 || cfg.order > fc::subset_p_max) throw UsageError("--P must lie in [1, 12]");
  if (cfg.sweep < 0) throw UsageError("--sweep must be nonnegative");
  const auto model = fc::load_model<T>(cfg.model);
  const auto np = fc::make_norm_params(model.covariance, parse_h<T>(cfg.h), std::optional<fc::SiteWeights<T>>(model.weights));
  std::vector<fc::BoundReport> reports;
  int shift_holds = 0, shift_checked = 0;
  if (!model.interaction.is_zero())
    add_bound_reports(model.covariance, model.interaction, np, cfg.order, "model", reports, shift_holds, shift_checked);
  fc::Rng rng(cfg.seed);
  const fc::Universe u{model.sites, 0};
  for (int k = 0; k < cfg.sweep; ++k) {
    auto v = from_exact<T>(fc::random_even_element(rng, u, 4, 0.5));
    if (v.is_zero()) v = from_exact<T>(fc::GrassmannElement<Rational>::product_of(u, {fc::psibar(0), fc::psi(0)}, Rational(1)));
    v = fc::scale_into_window(rng, v, np);
    add_bound_reports(model.covariance, v, np, cfg.order, "sweep-" + std::to_string(k), reports, shift_holds, shift_checked);
  }
  int fails = 0, outside = 0;
  Json list = Json::array();
  for (const auto& r : reports) {
    fails += r.failed() ? 1 : 0;
    outside += r.status == fc::BoundStatus::out_of_domain ? 1 : 0;
    list.push_back(fc::report_to_json(r));
  }
  emit(cfg, {{"mode", cfg.mode},
             {"h", cfg.h},
             {"P", cfg.order},
             {"gamma_squared", fc::scalar_to_json(np.gamma_squared)},
             {"omega", fc::scalar_to_json(np.omega)},
             {"reports", list},
             {"failures", fails},
             {"out_of_domain", outside},
             {"gamma_shift", Json{{"holds", shift_holds}, {"checked", shift_checked}}}});
  emit_csv(cfg, reports);
  if (fails) return violation;
  return outside ? out_of_domain : ok;
}

int run_enumerate_trees(const RunConfig& cfg) {
  require_p(cfg.p, 1, fc::tree_p_max);
  const auto trees = fc::enumerate_trees(cfg.p);
  Json list = Json::array();
  for (const auto& t : trees) list.push_back(tree_json(t));
  emit(cfg, {{"p", cfg.p}, {"count", trees.size()}, {"trees", list}});
  return ok;
}

int run_verify_penrose(const RunConfig& cfg) {
  require_p(cfg.p, 2, 6);
  const auto r = fc::verify_partition(cfg.p);
  Json families = Json::array();
  for (const auto& t : fc::enumerate_trees(cfg.p)) {
    Json extra = Json::array();
    for (const auto& e : fc::compatible_lines(t).edges()) extra.push_back({e.a, e.b});
    families.push_back({{"tree", tree_json(t)}, {"compatible_lines", extra}});
  }
  emit(cfg, {{"p", cfg.p},
             {"connected_graphs", r.connected_graphs},
             {"tree_family_total", r.tree_family_total},
             {"covered_twice", r.covered_twice},
             {"uncovered", r.uncovered},
             {"penrose_mismatches", r.penrose_mismatches},
             {"tree_overlaps", r.tree_overlaps},
             {"disconnected_hits", r.disconnected_hits},
             {"partition", r.ok()},
             {"families", families}});
  return r.ok() ? ok : violation;
}

int run_bbf_audit(const RunConfig& cfg) {
  require_p(cfg.p, 2, 6);
  if (cfg.grid < 2) throw UsageError("--grid must be at least 2");
  const auto m = fc::CoeffMatrix<Rational>::all_ones(cfg.p);
  const auto terms = fc::bbf_expand(cfg.p, m);
  const auto reports = fc::parallel_map<fc::PositivityReport>(terms.size(), [&](std::size_t i) {
    return fc::positivity_certificate(terms[i], cfg.grid);
  });
  bool good = true;
  Json list = Json::array();
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const auto& t = terms[i];
    const bool diag = fc::diagonal_invariant(t, m);
    good = good && diag && reports[i].ok();
    Json entry{{"tree", tree_json(t.tree)},
               {"order", t.order},
               {"weight", spoly_json(t.weight, cfg.p - 1)},
               {"diagonal_constant", diag},
               {"grid_points", reports[i].points},
               {"psd_failures", reports[i].failures}};
    if (!reports[i].ok()) entry["first_failure"] = rationals_json(reports[i].first_failure);
    list.push_back(entry);
  }
  Json norms = Json::array();
  for (const auto& tree : fc::enumerate_trees(cfg.p)) {
    const Rational total = fc::normalization_check(terms, tree);
    good = good && total == 1;
    norms.push_back({{"tree", tree_json(tree)}, {"integral", fc::to_string(total)}});
  }
  emit(cfg, {{"p", cfg.p}, {"grid", cfg.grid}, {"terms", list}, {"normalization", norms}, {"ok", good}});
  return good ? ok : violation;
}

int run_check_positivity(const RunConfig& cfg) {
  require_p(cfg.p, 2, 6);
  const auto s = parse_list(cfg.s_values);
  if (static_cast<int>(s.size()) != cfg.p - 1) throw UsageError("--s needs p-1 comma-separated values");
  for (const auto& x : s)
    if (sgn(x) < 0 || x > 1) throw UsageError("--s values must lie in [0, 1]");
  if (cfg.naive) {
    fc::Tree t;
    if (cfg.tree.empty()) {
      std::vector<fc::Edge> star;
      for (int q = 2; q <= cfg.p; ++q) star.push_back(fc::make_edge(1, q));
      t = fc::tree_from_edges(cfg.p, star);
    } else {
      t = parse_tree(cfg.p, cfg.tree);
    }
    std::map<fc::Edge, Rational> params;
    for (std::size_t i = 0; i < t.edges.size(); ++i) params[t.edges[i]] = s[i];
    const auto r = fc::band_matrix_analysis(t, params);
    Json lines = Json::array();
    for (std::size_t i = 0; i < t.edges.size(); ++i) lines.push_back({{"line", {t.edges[i].a, t.edges[i].b}}, {"s", fc::to_string(s[i])}});
    // a negative determinant is the expected finding for this matrix, not a failure
    emit(cfg, {{"p", cfg.p},
               {"tree", tree_json(t)},
               {"parameters", lines},
               {"order", r.order},
               {"matrix", matrix_json(r.matrix)},
               {"determinant", fc::to_string(r.determinant)},
               {"leading_minors", rationals_json(r.leading_minors)},
               {"band_structure", r.band_structure},
               {"psd", r.certificate.psd},
               {"psd_by_charpoly", r.psd_by_charpoly},
               {"min_eigenvalue", fc::to_string(r.min_eigenvalue)}});
    return ok;
  }
  const auto m = fc::CoeffMatrix<Rational>::all_ones(cfg.p);
  const auto terms = fc::bbf_expand(cfg.p, m);
  Json failures = Json::array();
  for (const auto& t : terms) {
    const auto cert = fc::ldlt_certificate(fc::evaluate_at(t.matrix, s));
    if (!cert.psd) failures.push_back({{"tree", tree_json(t.tree)}, {"order", t.order}});
  }
  emit(cfg, {{"p", cfg.p}, {"s", rationals_json(s)}, {"terms", terms.size()}, {"failures", failures}, {"psd", failures.empty()}});
  return failures.empty() ? ok : violation;
}

Json monomials_json(const std::vector<fc::FieldMonomial>& ms) {
  Json out = Json::array();
  for (const auto& m : ms) out.push_back({{"bar", m.bar_sites}, {"unbar", m.unbar_sites}});
  return out;
}

/// Charge-balanced random monomials, one or two fields of each kind per replica.
std::vector<fc::FieldMonomial> random_instance(fc::Rng& rng, int sites) {
  std::uniform_int_distribution<int> count(2, 4), fields(1, 2), site(0, sites - 1);
  std::vector<fc::FieldMonomial> ms(static_cast<std::size_t>(count(rng)));
  for (auto& m : ms) {
    const int k = fields(rng);
    for (int i = 0; i < k; ++i) {
      m.bar_sites.push_back(site(rng));
      m.unbar_sites.push_back(site(rng));
    }
  }
  return ms;
}

template <fc::ScalarType T>
int run_cumulant_check(const RunConfig& cfg) {
  require_model(cfg);
  if (cfg.sweep < 0) throw UsageError("--sweep must be nonnegative");
  auto model = fc::load_model<T>(cfg.model);
  if (!model.metric) throw fc::InputError(fc::InputErrorKind::schema, "cumulant-check needs a metric in the model");
  const auto info = fc::gram_constant(model.covariance);
  fc::fit_decay(*model.metric, model.covariance, static_cast<long double>(fc::coeff_traits<T>::to_double(info.gamma_squared)));
  auto instances = model.cumulant_instances;
  fc::Rng rng(cfg.seed);
  for (int k = 0; k < cfg.sweep; ++k) instances.push_back(random_instance(rng, model.sites));
  std::vector<fc::BoundReport> reports;
  Json list = Json::array();
  int fails = 0;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const std::string id = "instance-" + std::to_string(i);
    auto r = fc::check_cumulant_bound(model.covariance, *model.metric, info.gamma(), instances[i]);
    r.two_gamma_variant.instance = id;
    r.three_gamma_variant.instance = id;
    fails += (r.two_gamma_variant.failed() ? 1 : 0) + (r.three_gamma_variant.failed() ? 1 : 0);
    reports.push_back(r.two_gamma_variant);
    reports.push_back(r.three_gamma_variant);
    list.push_back({{"instance", id},
                    {"monomials", monomials_json(instances[i])},
                    {"tree_length", fc::to_string(r.tree_length)},
                    {"reports", {fc::report_to_json(r.two_gamma_variant), fc::report_to_json(r.three_gamma_variant)}}});
  }
  emit(cfg, {{"mode", cfg.mode},
             {"gamma_squared", fc::scalar_to_json(info.gamma_squared)},
             {"decay_length", fc::to_string(model.metric->decay_length)},
             {"decay_constant", fc::to_string(model.metric->decay_constant)},
             {"instances", list},
             {"failures", fails}});
  emit_csv(cfg, reports);
  return fails ? violation : ok;
}

template <template <class> class Run>
int dispatch(const RunConfig& cfg) {
  return exact_mode(cfg) ? Run<Rational>::go(cfg) : Run<double>::go(cfg);
}

template <class T>
struct EffectiveAction {
  static int go(const RunConfig& c) { return run_effective_action<T>(c); }
};
template <class T>
struct VerifyBounds {
  static int go(const RunConfig& c) { return run_verify_bounds<T>(c); }
};
template <class T>
struct CumulantCheck {
  static int go(const RunConfig& c) { return run_cumulant_check<T>(c); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact Grassmann-algebra computations for fermionic cluster expansions"};
  app.set_help_flag("--help", "print this help");  // -h would clash with --h
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_model = [&](CLI::App* sub) {
    sub->add_option("--model", cfg.model, "model JSON file");
    sub->add_option("--mode", cfg.mode, "exact or float")->capture_default_str();
  };
  auto* ea = app.add_subcommand("effective-action", "W(V) and its orders W_1..W_P");
  add_model(ea);
  ea->add_option("--P", cfg.order, "highest order")->capture_default_str();
  ea->add_option("--out", cfg.out, "output file (default stdout)");

  auto* cm = app.add_subcommand("compare-methods", "cross-check the truncated-correlation algorithms");
  add_model(cm);
  cm->add_option("--p", cfg.p, "number of copies of V (default 3)");
  cm->add_option("--out", cfg.out, "output file");

  auto* vb = app.add_subcommand("verify-bounds", "check the effective-action and convolution bounds");
  add_model(vb);
  vb->add_option("--h", cfg.h, "norm parameter, a positive rational")->capture_default_str();
  vb->add_option("--P", cfg.order, "remainder order")->capture_default_str();
  vb->add_option("--seed", cfg.seed, "sweep seed")->capture_default_str();
  vb->add_option("--sweep", cfg.sweep, "additional random interactions")->capture_default_str();
  vb->add_option("--out", cfg.out, "JSON output file");
  vb->add_option("--csv", cfg.csv, "CSV table of the reports");

  auto* et = app.add_subcommand("enumerate-trees", "all labeled trees on p vertices");
  et->add_option("--p", cfg.p, "vertex count")->required();
  et->add_option("--out", cfg.out, "output file");

  auto* vp = app.add_subcommand("verify-penrose", "check the tree partition of connected graphs");
  vp->add_option("--p", cfg.p, "vertex count")->required();
  vp->add_option("--out", cfg.out, "output file");

  auto* ba = app.add_subcommand("bbf-audit", "interpolation terms with exact certificates");
  ba->add_option("--p", cfg.p, "replica count")->required();
  ba->add_option("--grid", cfg.grid, "grid points per variable")->capture_default_str();
  ba->add_option("--out", cfg.out, "output file");

  auto* cp = app.add_subcommand("check-positivity", "PSD check of interpolated coupling matrices at one point");
  cp->add_option("--p", cfg.p, "replica count")->required();
  cp->add_option("--s", cfg.s_values, "p-1 comma-separated values in [0,1]")->required();
  cp->add_flag("--naive", cfg.naive, "use the naive per-line interpolation matrix");
  cp->add_option("--tree", cfg.tree, "tree lines for --naive, e.g. 1-2,2-3 (default: star at 1)");
  cp->add_option("--out", cfg.out, "output file");

  auto* cc = app.add_subcommand("cumulant-check", "decay bounds for truncated expectations of monomials");
  add_model(cc);
  cc->add_option("--seed", cfg.seed, "sweep seed")->capture_default_str();
  cc->add_option("--sweep", cfg.sweep, "additional random instances")->capture_default_str();
  cc->add_option("--out", cfg.out, "JSON output file");
  cc->add_option("--csv", cfg.csv, "CSV table of the reports");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return input_error;
  }

  try {
    if (*ea) return dispatch<EffectiveAction>(cfg);
    if (*cm) return run_compare_methods(cfg);
    if (*vb) return dispatch<VerifyBounds>(cfg);
    if (*et) return run_enumerate_trees(cfg);
    if (*vp) return run_verify_penrose(cfg);
    if (*ba) return run_bbf_audit(cfg);
    if (*cp) return run_check_positivity(cfg);
    if (*cc) return dispatch<CumulantCheck>(cfg);
  } catch (const fc::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return input_error;
  } catch (const UsageError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return input_error;
  } catch (const fc::OutOfDomain& e) {
    std::cerr << "out of domain: " << e.what() << "\n";
    return out_of_domain;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return input_error;
  } catch (const std::out_of_range& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return input_error;
  } catch (const std::domain_error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return input_error;
  } catch (const std::exception& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return violation;
  }
  return input_error;
}
