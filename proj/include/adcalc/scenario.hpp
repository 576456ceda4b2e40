#pragma once

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "adcalc/corpus.hpp"
#include "adcalc/hilbert.hpp"
#include "adcalc/io.hpp"
#include "adcalc/quantization.hpp"
#include "adcalc/reference.hpp"
#include "adcalc/report.hpp"
#include "adcalc/schwartz.hpp"

namespace adcalc {

enum class ScenarioKind { classify, quantize_compare, symbol_roundtrip, inner_product, gauge_check, crossed_decay, corner, sweep };

inline const std::vector<std::pair<std::string, ScenarioKind>>& scenario_names() {
  static const std::vector<std::pair<std::string, ScenarioKind>> v = {
      {"classify", ScenarioKind::classify},           {"quantize-compare", ScenarioKind::quantize_compare},
      {"symbol-roundtrip", ScenarioKind::symbol_roundtrip}, {"inner-product", ScenarioKind::inner_product},
      {"gauge-check", ScenarioKind::gauge_check},     {"crossed-decay", ScenarioKind::crossed_decay},
      {"corner", ScenarioKind::corner},               {"sweep", ScenarioKind::sweep}};
  return v;
}

inline std::string to_string(ScenarioKind k) {
  for (const auto& [n, v] : scenario_names())
    if (v == k) return n;
  return "unknown";
}

inline std::optional<ScenarioKind> parse_scenario_kind(const std::string& s) {
  for (const auto& [n, v] : scenario_names())
    if (n == s) return v;
  return std::nullopt;
}

// Named generator with parameters, a corpus entry, or an ADKF file.
struct FamilySpec {
  std::string generator = "psi-window";
  corpus::Params params;
  std::string corpus_entry;
  std::filesystem::path file;
  std::optional<ClassTag> claimed;
};

// Order-0 cosphere symbol: "one", "hardy", "step", or a corpus entry's sigma0.
struct SymbolSpec {
  std::string name = "hardy";
};

struct SweepSpec {
  ScenarioKind scenario = ScenarioKind::quantize_compare;
  std::vector<std::size_t> grid_n;
  std::vector<std::size_t> t_nodes;  // one entry, or paired with grid_n
  std::optional<double> min_order;
  bool monotone = true;
};

struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::classify;
  GroupoidSpec groupoid;
  std::size_t grid_n = 128;
  FamilySpec family;
  std::optional<FamilySpec> partner;
  QuadratureSpec quadrature;
  int m = 0;
  SymbolSpec symbol;
  std::size_t probes = 10;
  std::optional<ClassTag> expect_class;
  std::map<std::string, double> tolerances;
  double tolerance_scale = 1.0;
  std::filesystem::path out_dir = "out";
  std::optional<SweepSpec> sweep;

  GridSpec grid() const { return GridSpec(groupoid.half_width, grid_n); }

  // Upper bounds scale with tolerance_scale; lower bounds (slopes) do not.
  double upper(const std::string& name, double fallback) const {
    const auto it = tolerances.find(name);
    return (it == tolerances.end() ? fallback : it->second) * tolerance_scale;
  }
  double lower(const std::string& name, double fallback) const {
    const auto it = tolerances.find(name);
    return it == tolerances.end() ? fallback : it->second;
  }
};

namespace detail {

using nlohmann::json;

[[noreturn]] inline void config_error(const std::string& path, const std::string& what) {
  fail(ErrorKind::config, path + ": " + what);
}

inline const json* member(const json& j, const std::string& key) {
  const auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

inline double number(const json& j, const std::string& path) {
  if (!j.is_number()) config_error(path, "expected a number");
  return j.get<double>();
}

inline std::size_t count(const json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<long long>() < 0) config_error(path, "expected a non-negative integer");
  return j.get<std::size_t>();
}

inline std::string text(const json& j, const std::string& path) {
  if (!j.is_string()) config_error(path, "expected a string");
  return j.get<std::string>();
}

inline std::optional<ClassTag> parse_class(const std::string& s, const std::string& path) {
  if (s == "J") return ClassTag::J;
  if (s == "J0") return ClassTag::J0;
  if (s == "S_c") return ClassTag::S_c;
  if (s == "none") return ClassTag::none;
  config_error(path, "unknown class '" + s + "' (J, J0, S_c, none)");
}

inline void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) config_error(path.empty() ? "<root>" : path, "expected an object");
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) config_error(path.empty() ? k : path + "." + k, "unknown field");
  }
}

inline FamilySpec parse_family(const json& j, const std::string& path, const std::filesystem::path& base) {
  check_keys(j, path, {"generator", "params", "corpus", "file", "class"});
  FamilySpec f;
  const int sources = (member(j, "generator") ? 1 : 0) + (member(j, "corpus") ? 1 : 0) + (member(j, "file") ? 1 : 0);
  if (sources != 1) config_error(path, "give exactly one of generator, corpus or file");
  if (const auto* g = member(j, "generator")) {
    f.generator = text(*g, path + ".generator");
    const auto names = corpus::generator_names();
    if (std::find(names.begin(), names.end(), f.generator) == names.end())
      config_error(path + ".generator", "unknown generator '" + f.generator + "'");
  }
  if (const auto* p = member(j, "params")) {
    if (!p->is_object()) config_error(path + ".params", "expected an object of numbers");
    for (const auto& [k, v] : p->items()) f.params[k] = number(v, path + ".params." + k);
  }
  if (const auto* c = member(j, "corpus")) {
    f.corpus_entry = text(*c, path + ".corpus");
    bool found = false;
    for (const auto& e : corpus::j_corpus()) found = found || e.name == f.corpus_entry;
    if (!found) config_error(path + ".corpus", "unknown corpus entry '" + f.corpus_entry + "'");
    f.generator.clear();
  }
  if (const auto* fl = member(j, "file")) {
    f.file = text(*fl, path + ".file");
    if (f.file.is_relative()) f.file = base / f.file;
    if (!std::filesystem::exists(f.file)) config_error(path + ".file", "file not found: " + f.file.string());
    f.generator.clear();
  }
  if (const auto* c = member(j, "class")) f.claimed = parse_class(text(*c, path + ".class"), path + ".class");
  return f;
}

inline QuadratureSpec parse_quadrature(const json& j, const std::string& path) {
  check_keys(j, path, {"t_min", "t_max", "n_nodes", "rule"});
  QuadratureSpec q;
  if (const auto* v = member(j, "t_min")) q.t_min = number(*v, path + ".t_min");
  if (const auto* v = member(j, "t_max")) q.t_max = number(*v, path + ".t_max");
  if (const auto* v = member(j, "n_nodes")) q.n_nodes = count(*v, path + ".n_nodes");
  if (const auto* v = member(j, "rule")) {
    const auto r = text(*v, path + ".rule");
    if (r == "log-trapezoidal")
      q.rule = QuadratureRule::log_trapezoidal;
    else if (r == "log-Gauss-Legendre")
      q.rule = QuadratureRule::log_gauss_legendre;
    else
      config_error(path + ".rule", "unknown rule '" + r + "'");
  }
  if (!(q.t_min > 0.0) || !std::isfinite(q.t_min)) config_error(path + ".t_min", "must be positive");
  if (!(q.t_max > q.t_min) || !std::isfinite(q.t_max)) config_error(path + ".t_max", "must exceed t_min");
  if (q.n_nodes < 2) config_error(path + ".n_nodes", "at least two nodes");
  return q;
}

inline std::vector<std::size_t> count_list(const json& j, const std::string& path) {
  if (!j.is_array()) config_error(path, "expected an array");
  std::vector<std::size_t> v;
  for (std::size_t i = 0; i < j.size(); ++i) v.push_back(count(j[i], path + "[" + std::to_string(i) + "]"));
  return v;
}

}  // namespace detail

inline bool is_pow2_size(std::size_t n) { return n >= 2 && (n & (n - 1)) == 0; }

// base resolves relative family file paths.
inline ScenarioConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base = ".") {
  using namespace detail;
  check_keys(j, "", {"scenario", "groupoid", "grid", "family", "partner", "quadrature", "m", "symbol", "probes",
                     "expect_class", "tolerances", "tolerance_scale", "output", "sweep"});
  ScenarioConfig c;
  const auto* sc = member(j, "scenario");
  if (!sc) config_error("scenario", "missing");
  const auto kind = parse_scenario_kind(text(*sc, "scenario"));
  if (!kind) config_error("scenario", "unknown scenario kind '" + sc->get<std::string>() + "'");
  c.kind = *kind;
  if (const auto* g = member(j, "groupoid")) {
    check_keys(*g, "groupoid", {"fiber_dim", "half_width"});
    if (const auto* v = member(*g, "fiber_dim")) c.groupoid.fiber_dim = static_cast<int>(count(*v, "groupoid.fiber_dim"));
    if (const auto* v = member(*g, "half_width")) c.groupoid.half_width = number(*v, "groupoid.half_width");
    if (c.groupoid.fiber_dim != 1) config_error("groupoid.fiber_dim", "only fiber_dim = 1 is implemented");
    if (!(c.groupoid.half_width > 0.0)) config_error("groupoid.half_width", "must be positive");
  }
  if (const auto* g = member(j, "grid")) {
    check_keys(*g, "grid", {"n"});
    if (const auto* v = member(*g, "n")) c.grid_n = count(*v, "grid.n");
  }
  if (!is_pow2_size(c.grid_n)) config_error("grid.n", "must be a power of two");
  if (const auto* f = member(j, "family")) c.family = parse_family(*f, "family", base);
  if (const auto* f = member(j, "partner")) c.partner = parse_family(*f, "partner", base);
  if (const auto* q = member(j, "quadrature")) c.quadrature = parse_quadrature(*q, "quadrature");
  if (const auto* v = member(j, "m")) {
    if (!v->is_number_integer()) config_error("m", "expected an integer");
    c.m = v->get<int>();
  }
  if (const auto* s = member(j, "symbol")) {
    check_keys(*s, "symbol", {"name"});
    if (const auto* v = member(*s, "name")) c.symbol.name = text(*v, "symbol.name");
  }
  if (const auto* v = member(j, "probes")) c.probes = count(*v, "probes");
  if (c.probes == 0) config_error("probes", "at least one probe");
  if (const auto* v = member(j, "expect_class")) c.expect_class = parse_class(text(*v, "expect_class"), "expect_class");
  if (const auto* t = member(j, "tolerances")) {
    if (!t->is_object()) config_error("tolerances", "expected an object of numbers");
    for (const auto& [k, v] : t->items()) {
      const double x = number(v, "tolerances." + k);
      if (!(x > 0.0)) config_error("tolerances." + k, "must be positive");
      c.tolerances[k] = x;
    }
  }
  if (const auto* v = member(j, "tolerance_scale")) {
    c.tolerance_scale = number(*v, "tolerance_scale");
    if (!(c.tolerance_scale > 0.0)) config_error("tolerance_scale", "must be positive");
  }
  if (const auto* o = member(j, "output")) {
    check_keys(*o, "output", {"dir"});
    if (const auto* v = member(*o, "dir")) c.out_dir = text(*v, "output.dir");
  }
  if (const auto* s = member(j, "sweep")) {
    check_keys(*s, "sweep", {"scenario", "grid_n", "t_nodes", "min_order", "monotone"});
    SweepSpec w;
    if (const auto* v = member(*s, "scenario")) {
      const auto k = parse_scenario_kind(text(*v, "sweep.scenario"));
      if (!k || *k == ScenarioKind::sweep) config_error("sweep.scenario", "must name a non-sweep scenario kind");
      w.scenario = *k;
    }
    if (const auto* v = member(*s, "grid_n")) w.grid_n = count_list(*v, "sweep.grid_n");
    if (const auto* v = member(*s, "t_nodes")) w.t_nodes = count_list(*v, "sweep.t_nodes");
    if (w.grid_n.empty()) config_error("sweep.grid_n", "empty range");
    for (std::size_t i = 0; i < w.grid_n.size(); ++i)
      if (!is_pow2_size(w.grid_n[i])) config_error("sweep.grid_n[" + std::to_string(i) + "]", "must be a power of two");
    if (member(*s, "t_nodes") && w.t_nodes.empty()) config_error("sweep.t_nodes", "empty range");
    if (w.t_nodes.size() > 1 && w.t_nodes.size() != w.grid_n.size())
      config_error("sweep.t_nodes", "give one entry or one per grid_n entry");
    for (std::size_t i = 0; i < w.t_nodes.size(); ++i)
      if (w.t_nodes[i] < 2) config_error("sweep.t_nodes[" + std::to_string(i) + "]", "at least two nodes");
    if (const auto* v = member(*s, "min_order")) w.min_order = number(*v, "sweep.min_order");
    if (const auto* v = member(*s, "monotone")) {
      if (!v->is_boolean()) config_error("sweep.monotone", "expected true or false");
      w.monotone = v->get<bool>();
    }
    c.sweep = w;
  }
  if (c.kind == ScenarioKind::sweep && !c.sweep) config_error("sweep", "missing for a sweep scenario");
  return c;
}

inline ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  require(static_cast<bool>(is), ErrorKind::io, "cannot open config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(is);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::config, path.string() + ": " + e.what());
  }
  return parse_config(j, path.parent_path());
}

inline KernelFamily build_family(const FamilySpec& s, const GroupoidSpec& g, const QuadratureSpec& q) {
  KernelFamily f;
  if (!s.file.empty()) {
    f = load_family(s.file, s.claimed);
  } else if (!s.corpus_entry.empty()) {
    for (const auto& e : corpus::j_corpus(g, q))
      if (e.name == s.corpus_entry) f = e.family;
  } else {
    f = corpus::by_name(s.generator, s.params, g, q);
  }
  return s.claimed ? f.with_claim(s.claimed) : f;
}

inline CosphereFn build_symbol(const SymbolSpec& s) {
  if (s.name == "one") return [](double, int) { return Complex(1.0); };
  if (s.name == "step") return [](double, int k) { return Complex(k > 0 ? 1.0 : 0.0); };
  if (s.name == "hardy")
    return [](double x, int k) { return Complex(corpus::weight_x(x, 0.3) * (k > 0 ? 1.0 : 0.3)); };
  for (const auto& e : corpus::j_corpus())
    if (e.name == s.name) return e.sigma0;
  fail(ErrorKind::config, "symbol.name: unknown symbol '" + s.name + "'");
}

namespace detail {

// symbol e^{-xi^2 / 8}: the smoothing correction for the full-module witness
inline DiscreteOperator heat_kernel(const GridSpec& g) {
  return DiscreteOperator::sample(g, [&](double x, double y) {
    const double d = g.minimal_image(x - y);
    return Complex(std::sqrt(2.0 / kPi) * std::exp(-2.0 * d * d));
  });
}

inline KernelFamily partner_or(const ScenarioConfig& c, const char* fallback) {
  FamilySpec s;
  s.corpus_entry = fallback;
  s.generator.clear();
  return build_family(c.partner ? *c.partner : s, c.groupoid, c.quadrature);
}

inline Report run_classify(const ScenarioConfig& c) {
  Report r;
  const auto f = build_family(c.family, c.groupoid, c.quadrature);
  const auto rep = classify(f);
  const auto want = c.expect_class ? c.expect_class : f.claimed_class();
  r.notes["class"] = to_string(rep.cls);
  if (want) {
    r.notes["expected_class"] = to_string(*want);
    r.checks.push_back(check_at_least("class_matches", rep.cls == *want ? 1.0 : 0.0, 1.0));
  } else {
    r.checks.push_back(check_at_least("class_assigned", rep.cls != ClassTag::none ? 1.0 : 0.0, 1.0));
  }
  Table fits{"fits", {"fit", "slope", "rms_residual", "points"}, {}};
  fits.add({std::string("j0_decay"), rep.j0_fit.slope, rep.j0_fit.line.rms_residual,
            static_cast<long long>(rep.j0_fit.scale.size())});
  fits.add({std::string("annulus_vanishing"), rep.annulus_fit.slope, rep.annulus_fit.line.rms_residual,
            static_cast<long long>(rep.annulus_fit.scale.size())});
  r.tables.push_back(fits);
  Table sn{"seminorms", {"k", "l", "j", "m", "value", "finite"}, {}};
  for (const auto& row : rep.table)
    sn.add({static_cast<long long>(row.index.k), static_cast<long long>(row.index.l), static_cast<long long>(row.index.j),
            static_cast<long long>(row.index.m), row.value, std::string(row.finite ? "true" : "false")});
  r.tables.push_back(sn);
  return r;
}

inline Report run_quantize_compare(const ScenarioConfig& c) {
  Report r;
  const auto g = c.grid();
  const auto f = build_family(c.family, c.groupoid, c.quadrature);
  const auto q = quantize_family(f, c.m, g, c.quadrature);
  const auto probes = reference::band_limited_probes(g, c.probes);
  const auto cmp = reference::compare_quantization(f, c.m, q.op, probes);
  r.checks.push_back(check_at_most("quantize_error", cmp.max_error, c.upper("quantize_error", 1e-3)));
  r.checks.push_back(check_at_most("tail_ratio", q.tail_ratio, c.upper("tail_ratio", 1e-8)));
  Table t{"probes", {"probe", "relative_error"}, {}};
  for (std::size_t i = 0; i < cmp.errors.size(); ++i) t.add({static_cast<long long>(i), cmp.errors[i]});
  r.tables.push_back(t);
  return r;
}

inline Report run_symbol_roundtrip(const ScenarioConfig& c) {
  Report r;
  const auto g = c.grid();
  const auto sigma = build_symbol(c.symbol);
  const auto fam = symbol_to_family(sigma, BumpProfile::psi_window(), c.groupoid, c.quadrature);
  const auto st = principal_symbol(fam, 0, g);
  double err = 0.0;
  Table t{"symbol", {"x", "xi", "re", "im", "abs_error"}, {}};
  for (std::size_t i = 0; i < st.xs.size(); ++i)
    for (std::size_t k = 0; k < st.xis.size(); ++k) {
      const Complex v = st.values(static_cast<long>(i), static_cast<long>(k));
      const double e = std::abs(v - sigma(st.xs[i], st.xis[k] > 0 ? 1 : -1));
      err = std::max(err, e);
      if (i % 16 == 0 && k % 8 == 0) t.add({st.xs[i], st.xis[k], v.real(), v.imag(), e});
    }
  r.checks.push_back(check_at_most("principal_symbol_error", err, c.upper("principal_symbol_error", 1e-6)));
  r.tables.push_back(t);
  return r;
}

inline Report run_inner_product(const ScenarioConfig& c) {
  Report r;
  const auto g = c.grid();
  const auto f = module_element(build_family(c.family, c.groupoid, c.quadrature), g, c.quadrature);
  const auto h = module_element(partner_or(c, "gauss-flat"), g, c.quadrature);
  const auto ff = inner_product(f, f), hh = inner_product(h, h), fh = inner_product(f, h);
  const double nf = ff.norm(), nh = hh.norm();
  const double pos = nf > 0.0 ? std::max(0.0, -detail::min_eigenvalue(ff.matrix())) / nf : 0.0;
  r.checks.push_back(check_at_most("positivity", pos, c.upper("positivity", 1e-6)));
  r.checks.push_back(
      check_at_most("cauchy_schwarz", std::max(0.0, fh.norm() - std::sqrt(nf) * std::sqrt(nh)), c.upper("cauchy_schwarz", 1e-8)));
  const auto p = QuantizedOperator::from_symbol(ClassicalSymbol::principal(build_symbol(c.symbol)), g);
  ModuleActionOptions mo;
  mo.check_fiber = false;
  const auto lhs = inner_product(f, module_action(h, p, mo).h);
  const auto rhs = fh.compose(p.op);
  r.checks.push_back(
      check_at_most("right_linearity", relative_difference(lhs.kernel(), rhs.kernel()), c.upper("right_linearity", 1e-6)));
  Table t{"norms", {"quantity", "value"}, {}};
  t.add({std::string("norm <f|f>"), nf});
  t.add({std::string("norm <h|h>"), nh});
  t.add({std::string("norm <f|h>"), fh.norm()});
  t.add({std::string("min eig <f|f>"), detail::min_eigenvalue(ff.matrix())});
  r.tables.push_back(t);
  return r;
}

inline Report run_gauge_check(const ScenarioConfig& c) {
  Report r;
  const auto g = c.grid();
  const auto f = module_element(build_family(c.family, c.groupoid, c.quadrature), g, c.quadrature);
  const auto h = module_element(partner_or(c, "gauss-flat"), g, c.quadrature);
  const auto base = inner_product(f, h);
  Table t{"unitarity", {"s", "relative_change"}, {}};
  double worst = 0.0;
  for (double s : {0.5, 2.0, 4.0}) {
    const auto moved = inner_product(gauge(s, f), gauge(s, h));
    const double e = (moved - base).norm() / std::max(base.norm(), 1e-300);
    worst = std::max(worst, e);
    t.add({s, e});
  }
  r.checks.push_back(check_at_most("unitarity", worst, c.upper("unitarity", 1e-8)));
  const auto a = gauge(2.0, gauge(4.0, f)), b = gauge(8.0, f);
  double comp = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    comp = std::max(comp, relative_difference(a.node(i).kernel(), b.node(i).kernel()));
  r.checks.push_back(check_at_most("composition", comp, c.upper("composition", 1e-14)));
  r.tables.push_back(t);
  return r;
}

inline Report run_crossed_decay(const ScenarioConfig& c) {
  Report r;
  const auto g = c.grid();
  const auto f = module_element(build_family(c.family, c.groupoid, c.quadrature), g, c.quadrature);
  const auto h = module_element(partner_or(c, "gauss-flat"), g, c.quadrature);
  CrossedOptions opt;
  opt.min_slope = c.lower("decay_slope", opt.min_slope);
  const auto ce = crossed_element(f, h, opt);
  r.checks.push_back(check_at_least("decay_slope_small_s", ce.small_s.tail_slope, opt.min_slope));
  r.checks.push_back(check_at_least("decay_slope_large_s", ce.large_s.tail_slope, opt.min_slope));
  const auto cons = crossed_consistency(f, h, f);
  r.checks.push_back(check_at_most("rank_one_consistency", cons.max_relative_error, c.upper("rank_one_consistency", 1e-3)));
  Table t{"samples", {"s", "sup"}, {}};
  for (std::size_t i = 0; i < ce.s.size(); ++i) t.add({ce.s[i], ce.sup[i]});
  r.tables.push_back(t);
  return r;
}

inline Report run_corner(const ScenarioConfig& c) {
  Report r;
  const auto g = c.grid();
  WitnessOptions wo;
  wo.delta = c.lower("min_eigenvalue", wo.delta);
  wo.certificate_slope = c.lower("certificate_slope", wo.certificate_slope);
  const auto w = full_witness(BumpProfile::psi_window(PsiNormalization::square), g, heat_kernel(g), wo);
  r.checks.push_back(check_at_least("min_eigenvalue", w.min_eig, wo.delta));
  r.checks.push_back(check_at_least("certificate_slope", w.certificate.tail_slope, wo.certificate_slope));
  const auto p = kn_quantize(ClassicalSymbol::principal(build_symbol(c.symbol)), g);
  const auto cd = corner_decompose(p, w);
  r.checks.push_back(check_at_least("corner_slope", cd.certificate.tail_slope, wo.certificate_slope));
  Table t{"corner_response", {"omega", "response"}, {}};
  for (std::size_t i = 0; i < cd.omega.size(); ++i) t.add({cd.omega[i], cd.response[i]});
  r.tables.push_back(t);
  r.notes["distance_to_identity"] = format_double(w.distance_to_identity);
  return r;
}

}  // namespace detail

inline Report run_scenario(const ScenarioConfig& c);

namespace detail {

inline Report run_sweep(const ScenarioConfig& c) {
  const auto& w = *c.sweep;
  require(!w.grid_n.empty(), ErrorKind::config, "sweep.grid_n: empty range");
  auto point = [&](std::size_t i) {
    ScenarioConfig inner = c;
    inner.kind = w.scenario;
    inner.sweep.reset();
    inner.grid_n = w.grid_n[i];
    if (!w.t_nodes.empty()) inner.quadrature.n_nodes = w.t_nodes[w.t_nodes.size() == 1 ? 0 : i];
    return inner;
  };
  if (w.grid_n.size() == 1) return run_scenario(point(0));
  Report r;
  Table t{"sweep", {"grid_n", "t_nodes", "metric", "value", "pass"}, {}};
  std::vector<double> ns, es;
  for (std::size_t i = 0; i < w.grid_n.size(); ++i) {
    const auto inner = point(i);
    const auto rep = run_scenario(inner);
    require(!rep.checks.empty(), ErrorKind::config, "sweep.scenario: scenario reports no checks");
    const auto& m = rep.checks.front();
    t.add({static_cast<long long>(inner.grid_n), static_cast<long long>(inner.quadrature.n_nodes), m.name, m.measured,
           std::string(rep.pass() ? "true" : "false")});
    ns.push_back(static_cast<double>(inner.grid_n));
    es.push_back(m.measured);
  }
  if (w.monotone) {
    double rises = 0.0;
    for (std::size_t i = 1; i < es.size(); ++i) rises += es[i] < es[i - 1] ? 0.0 : 1.0;
    r.checks.push_back(check_at_most("monotone_steps_violated", rises, 0.0));
  }
  const double order = convergence_order(ns, es);
  if (w.min_order)
    r.checks.push_back(check_at_least("convergence_order", order, *w.min_order));
  r.notes["convergence_order"] = format_double(order);
  r.tables.push_back(t);
  return r;
}

}  // namespace detail

inline Report run_scenario(const ScenarioConfig& c) {
  c.quadrature.validate();
  Report r;
  switch (c.kind) {
    case ScenarioKind::classify: r = detail::run_classify(c); break;
    case ScenarioKind::quantize_compare: r = detail::run_quantize_compare(c); break;
    case ScenarioKind::symbol_roundtrip: r = detail::run_symbol_roundtrip(c); break;
    case ScenarioKind::inner_product: r = detail::run_inner_product(c); break;
    case ScenarioKind::gauge_check: r = detail::run_gauge_check(c); break;
    case ScenarioKind::crossed_decay: r = detail::run_crossed_decay(c); break;
    case ScenarioKind::corner: r = detail::run_corner(c); break;
    case ScenarioKind::sweep: r = detail::run_sweep(c); break;
  }
  if (r.scenario.empty()) r.scenario = to_string(c.kind);
  return r;
}

}  // namespace adcalc
