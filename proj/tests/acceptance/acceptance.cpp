// Acceptance run: one PASS/FAIL line per criterion, exit status 1 on any failure.
//
//   acceptance [--only 1,2,...]

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "adcalc/scenario.hpp"
#include "adcalc/sections.hpp"

using namespace adcalc;

namespace {

constexpr std::size_t kGridN = 512;
constexpr std::size_t kModuleN = 128;
constexpr std::size_t kWitnessN = 256;
constexpr std::size_t kProbes = 10;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void at_most(const std::string& what, double v, double tol) {
    pass = pass && v <= tol;
    note(what, v, "<=", tol, v <= tol);
  }
  void at_least(const std::string& what, double v, double tol) {
    pass = pass && v >= tol;
    note(what, v, ">=", tol, v >= tol);
  }
  void require_true(const std::string& what, bool ok) {
    pass = pass && ok;
    if (detail.tellp() > 0) detail << "; ";
    detail << what << (ok ? " ok" : " FAILED");
  }

 private:
  void note(const std::string& what, double v, const char* op, double tol, bool ok) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s %.3e %s %.0e%s", what.c_str(), v, op, tol, ok ? "" : " FAILED");
    if (detail.tellp() > 0) detail << "; ";
    detail << buf;
  }
};

GridSpec grid(std::size_t n) { return GridSpec(8.0, n); }

QuadratureSpec t_nodes(std::size_t n) {
  auto q = default_quadrature();
  q.n_nodes = n;
  return q;
}

// Shared between criteria 1 and 11.
std::vector<double> quantize_errors_cache;

double quantize_error(std::size_t n, std::size_t nodes) {
  const auto g = grid(n);
  const auto q = t_nodes(nodes);
  const auto probes = reference::band_limited_probes(g, kProbes);
  double worst = 0.0;
  for (const auto& e : corpus::j_corpus({}, q)) {
    const auto p = quantize_family(e.family, 0, g, q);
    worst = std::max(worst, reference::compare_quantization(e.family, 0, p.op, probes).max_error);
  }
  return worst;
}

std::vector<CosphereFn> roundtrip_symbols() {
  std::vector<CosphereFn> v;
  for (const char* name : {"one", "step", "hardy"}) v.push_back(build_symbol({name}));
  for (const auto& e : corpus::j_corpus()) v.push_back(e.sigma0);
  return v;
}

double roundtrip_error(std::size_t n, int per_octave) {
  const auto g = grid(n);
  SymbolOptions o;
  o.per_octave = per_octave;
  double err = 0.0;
  for (const auto& sigma : roundtrip_symbols()) {
    const auto fam = symbol_to_family(sigma, BumpProfile::psi_window());
    const auto st = principal_symbol(fam, 0, g, o);
    for (std::size_t i = 0; i < st.xs.size(); ++i)
      for (std::size_t k = 0; k < st.xis.size(); ++k)
        err = std::max(err, std::abs(st.values(static_cast<long>(i), static_cast<long>(k)) -
                                     sigma(st.xs[i], st.xis[k] > 0 ? 1 : -1)));
  }
  return err;
}

// 1. quantization agreement against the independent oracle
Outcome c1() {
  Outcome o;
  const auto g = grid(kGridN);
  const auto q = default_quadrature();
  const auto probes = reference::band_limited_probes(g, kProbes);
  double worst = 0.0, tail = 0.0;
  for (const auto& e : corpus::j_corpus({}, q)) {
    const auto p = quantize_family(e.family, 0, g, q);
    const auto cmp = reference::compare_quantization(e.family, 0, p.op, probes);
    worst = std::max(worst, cmp.max_error);
    tail = std::max(tail, p.tail_ratio);
  }
  quantize_errors_cache = {worst};
  o.at_most("max relative error over 5 families x 10 probes", worst, 1e-3);
  o.at_most("quadrature tail ratio", tail, 1e-8);
  return o;
}

// 2. principal symbol round trip and closed forms
Outcome c2() {
  Outcome o;
  const auto g = grid(kGridN);
  o.at_most("round trip max error over 8 symbols", roundtrip_error(kGridN, SymbolOptions{}.per_octave), 1e-6);
  const auto one = principal_symbol(corpus::psi_window(), 0, g);
  o.at_most("normalized window |sigma - 1|", (one.values.array() - 1.0).abs().maxCoeff(), 1e-6);
  AnalyticGenerator gen;
  gen.name = "xi2-gauss";
  gen.phi_hat = [](double, double z, double t) { return Complex(z * z * std::exp(-z * z - t * t)); };
  const KernelFamily f({}, gen, std::ldexp(1.0, -12), 16.0, 8.0, 16.0, ClassTag::S_c);
  SymbolOptions so;
  so.require_j = false;
  const auto half = principal_symbol(f, 0, g, so);
  o.at_most("xi^2 e^{-xi^2} |sigma - 1/2|", (half.values.array() - 0.5).abs().maxCoeff(), 1e-8);
  return o;
}

// 3. semi-norm scaling under alpha_u
Outcome c3() {
  Outcome o;
  using Field = std::function<Complex(double, double, double)>;
  const std::vector<Field> families = {
      [](double x, double xi, double t) {
        return Complex((1.0 + 0.5 * x) * std::exp(-x * x - (xi - 0.5) * (xi - 0.5) / 1.5 - (t - 0.2) * (t - 0.2)));
      },
      [](double x, double xi, double t) {
        return Complex(1.0, 0.4 * xi * t) * std::exp(-(x - 0.3) * (x - 0.3) - 0.5 * xi * xi - t * t);
      }};
  std::vector<SemiNormIndex> idx;
  for (int k : {0, 1})
    for (int l : {0, 1, 2})
      for (int j : {0, 1}) idx.push_back({k, l, j, (k + l + j) % 3});
  auto box = [](double ext_x, double ext) {
    Box3 b;
    b.lo = {-ext_x, -ext, -ext};
    b.hi = {ext_x, ext, ext};
    b.points = {25, 49, 49};
    return b;
  };
  double worst = 0.0;
  for (const auto& F : families)
    for (const auto& i : idx) {
      const double a = seminorm_refined(F, box(6.0, 6.0), i);
      for (double u : {0.5, 2.0}) {
        const Field Fu = [&](double x, double xi, double t) { return u * F(x, u * xi, u * t); };
        const double b = seminorm_refined(Fu, box(6.0, 6.0 / u), i);
        const double want = std::pow(u, i.scaling_exponent(1));
        worst = std::max(worst, std::abs(b / a - want) / want);
      }
    }
  o.at_most("max relative deviation over 2 families x 12 indices x 2 scales", worst, 1e-6);
  return o;
}

std::vector<BundlePoint> cloud(double ext, std::size_t n, bool with_lambda) {
  std::vector<BundlePoint> pts;
  for (double x : uniform_grid(-ext, ext, n))
    for (double v : uniform_grid(-ext, ext, n)) {
      if (!with_lambda) {
        pts.push_back({x, v, 0.0});
        continue;
      }
      for (double l : uniform_grid(-ext, ext, n)) pts.push_back({x, v, l});
    }
  return pts;
}

double relative_sup(const std::vector<Complex>& got, const BundleField& want, const std::vector<BundlePoint>& pts) {
  double err = 0.0, peak = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    err = std::max(err, std::abs(got[i] - want(pts[i])));
    peak = std::max(peak, std::abs(want(pts[i])));
  }
  return err / peak;
}

// 4. orbit-integration section constructions
Outcome c4() {
  Outcome o;
  const std::vector<BundleField> beta_targets = {
      [](const BundlePoint& z) { return Complex(std::exp(-z.x * z.x - 0.5 * z.v * z.v), 0.3 * z.v * std::exp(-z.v * z.v)); },
      [](const BundlePoint& z) { return Complex(std::exp(-(z.x - 0.5) * (z.x - 0.5) - z.v * z.v) * (1.0 + z.v * z.v)); }};
  double beta_err = 0.0;
  const auto pts2 = cloud(4.0, 17, false);
  for (const auto& g : beta_targets) {
    const auto f = section_beta(g, BumpProfile::h_profile());
    beta_err = std::max(beta_err, relative_sup(orbit_integrate(f, OrbitAction::beta, pts2).values, g, pts2));
  }
  o.at_most("beta section round trip", beta_err, 1e-6);

  const std::vector<BundleField> alpha_targets = {
      [](const BundlePoint& z) {
        return Complex(std::exp(-z.x * z.x - z.v * z.v - z.lambda * z.lambda) * (1.0 + 0.2 * z.v * z.lambda));
      },
      [](const BundlePoint& z) {
        return Complex(1.0, 0.5 * z.lambda) * std::exp(-z.x * z.x - 0.5 * z.v * z.v - 1.5 * z.lambda * z.lambda);
      }};
  double split_err = 0.0;
  const auto pts3 = cloud(2.5, 9, true);
  for (const auto& g : alpha_targets) {
    const auto [f1, f2] = split_alpha(g, BumpProfile::h_profile(), BumpProfile::chi_cutoff(1.0, 2.0));
    const auto a = orbit_integrate(f1, OrbitAction::alpha, pts3);
    const auto b = orbit_integrate(f2, OrbitAction::alpha, pts3);
    std::vector<Complex> sum(pts3.size());
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = a.values[i] + b.values[i];
    split_err = std::max(split_err, relative_sup(sum, g, pts3));
  }
  o.at_most("alpha split phi(f1)+phi(f2)=g", split_err, 1e-6);
  return o;
}

DiscreteOperator gauss_op(const GridSpec& g, double a) {
  return DiscreteOperator::sample(g, [&](double x, double y) {
    const double d = g.minimal_image(x - y);
    return Complex(std::exp(-a * d * d));
  });
}

// 5. ideal and limit properties of the convolution
Outcome c5() {
  Outcome o;
  const auto g = grid(kModuleN);
  const auto q = default_quadrature();
  const auto k = gauss_op(g, 1.0);
  double slope = std::numeric_limits<double>::infinity();
  for (const auto& e : corpus::j_corpus({}, q)) {
    const auto f = realize(e.family, g, q);
    slope = std::min({slope, j0_decay(convolve(f, k), 1.0).tail_slope, j0_decay(convolve(k, f), 1.0).tail_slope});
  }
  o.at_least("min small-t J0 decay slope of f*k and k*f over the corpus", slope, 6.0);
  const double amp = 0.5;
  const auto f = realize(corpus::gauss_kernel({{"amp", amp}}), g, q);
  const auto kk = DiscreteOperator::sample(g, [](double x, double y) { return Complex(std::exp(-x * x - y * y)); });
  std::vector<double> ts;
  for (int e = -1; e >= -6; --e) ts.push_back(std::ldexp(1.0, e));
  const auto lim =
      smooth_limit(f, kk, [&](double x) { return Complex(std::sqrt(kPi) * corpus::weight_x(x, amp)); }, ts);
  o.at_least("limit deviation order in t", lim.order, 1.0);
  return o;
}

std::vector<ModuleElement> corpus_elements(const GridSpec& g, const QuadratureSpec& q) {
  std::vector<ModuleElement> v;
  for (const auto& e : corpus::j_corpus({}, q)) v.push_back(module_element(e.family, g, q));
  return v;
}

// 6. rapid decay of s -> f * alpha_s(g*)
Outcome c6() {
  Outcome o;
  const auto g = grid(kModuleN);
  const auto q = default_quadrature();
  const auto el = corpus_elements(g, q);
  double lo = std::numeric_limits<double>::infinity(), hi = lo;
  for (std::size_t a = 0; a < el.size(); ++a) {
    const auto c = crossed_element(el[a], el[(a + 1) % el.size()]);
    lo = std::min(lo, c.small_s.tail_slope);
    hi = std::min(hi, c.large_s.tail_slope);
  }
  o.at_least("min small-s slope", lo, 6.0);
  o.at_least("min large-s slope", hi, 6.0);
  return o;
}

// 7. module axioms across the corpus
Outcome c7() {
  Outcome o;
  const auto g = grid(kModuleN);
  const auto q = default_quadrature();
  const auto el = corpus_elements(g, q);
  std::vector<DiscreteOperator> self;
  for (const auto& e : el) self.push_back(inner_product(e, e));
  double pos = 0.0, cs = 0.0, lin = 0.0, gauge_err = 0.0;
  for (std::size_t a = 0; a < el.size(); ++a) {
    const double na = self[a].norm();
    pos = std::max(pos, -detail::min_eigenvalue(self[a].matrix()) / na);
    for (std::size_t b = a + 1; b < el.size(); ++b)
      cs = std::max(cs, inner_product(el[a], el[b]).norm() - std::sqrt(na) * std::sqrt(self[b].norm()));
  }
  ModuleActionOptions mo;
  mo.check_fiber = false;
  for (const char* name : {"hardy", "step"}) {
    const auto p = QuantizedOperator::from_symbol(ClassicalSymbol::principal(build_symbol({name})), g);
    for (std::size_t a = 0; a < el.size(); ++a) {
      const auto& f = el[a];
      const auto& h = el[(a + 2) % el.size()];
      const auto lhs = inner_product(f, module_action(h, p, mo).h);
      const auto rhs = inner_product(f, h).compose(p.op);
      lin = std::max(lin, relative_difference(lhs.kernel(), rhs.kernel()));
    }
  }
  for (std::size_t a = 0; a < el.size(); ++a) {
    const auto& f = el[a];
    const auto& h = el[(a + 1) % el.size()];
    const auto ip = inner_product(f, h);
    for (double s : {0.5, 2.0, 4.0})
      gauge_err = std::max(gauge_err, (inner_product(gauge(s, f), gauge(s, h)) - ip).norm() / ip.norm());
  }
  o.at_most("positivity -min eig / norm", pos, 1e-6);
  o.at_most("Cauchy-Schwarz excess", cs, 1e-8);
  o.at_most("right linearity", lin, 1e-6);
  o.at_most("gauge invariance", gauge_err, 1e-8);
  return o;
}

// 8. rank-one operator against the crossed-product element
Outcome c8() {
  Outcome o;
  const auto g = grid(kModuleN);
  const auto q = default_quadrature();
  const auto el = corpus_elements(g, q);
  double worst = 0.0;
  std::size_t probes = 0;
  for (std::size_t a = 0; a < el.size(); ++a) {
    const auto rep = crossed_consistency(el[a], el[(a + 1) % el.size()], el[(a + 2) % el.size()]);
    worst = std::max(worst, rep.max_relative_error);
    probes += rep.probes;
  }
  o.require_true("probes evaluated", probes > 0);
  o.at_most("max relative error over 5 pairs", worst, 1e-3);
  return o;
}

// 9. full-module witness
Outcome c9() {
  Outcome o;
  const auto g = grid(kWitnessN);
  const auto w = full_witness(BumpProfile::psi_window(PsiNormalization::square), g, detail::heat_kernel(g));
  o.at_least("corrected min eigenvalue", w.min_eig, 0.1);
  o.at_least("certificate slope of 1 - <f|f>", w.certificate.tail_slope, 6.0);
  return o;
}

// 10. fiber relation for the right module action. The x-dependent symbol
// leaves O(t) composition terms, so t0 sits at 2^-6 on the fine grid.
Outcome c10() {
  Outcome o;
  const auto g = grid(1024);
  const auto q = default_quadrature();
  const auto f = realize(corpus::gauss_flat({{"amp", 0.5}, {"beta", 0.5}}), g, q);
  ModuleActionOptions opt;
  opt.t0 = 1.0 / 64.0;
  const std::vector<std::pair<std::string, ClassicalSymbol>> symbols = {
      {"identity", ClassicalSymbol::constant(1.0)},
      {"high-pass", ClassicalSymbol::high_pass(1.0)},
      {"hardy", ClassicalSymbol::principal(build_symbol({"hardy"}))}};
  for (const auto& [name, sym] : symbols) {
    const auto r = module_action(f, QuantizedOperator::from_symbol(sym, g), opt);
    if (!r.relation) {
      o.require_true(name + " relation computed", false);
      continue;
    }
    o.at_most(name, r.relation->max_deviation, 1e-3);
  }
  return o;
}

// 11. convergence ladders: quadrature refined together with N
Outcome c11() {
  Outcome o;
  const std::vector<std::size_t> ns = {128, 256, 512, 1024};
  std::vector<double> nd, e1, e2;
  for (std::size_t n : ns) {
    nd.push_back(static_cast<double>(n));
    e1.push_back(n == kGridN && !quantize_errors_cache.empty() ? quantize_errors_cache.front()
                                                               : quantize_error(n, n / 4 + 1));
    e2.push_back(roundtrip_error(n, static_cast<int>(n / 8)));
  }
  auto ladder = [](const std::vector<double>& e) {
    std::ostringstream s;
    for (std::size_t i = 0; i < e.size(); ++i) s << (i ? " " : "") << std::scientific << std::setprecision(2) << e[i];
    return s.str();
  };
  o.require_true("criterion 1 monotone [" + ladder(e1) + "]", strictly_decreasing(e1));
  o.at_least("criterion 1 order", convergence_order(nd, e1), 2.0);
  o.require_true("criterion 2 monotone [" + ladder(e2) + "]", strictly_decreasing(e2));
  o.at_least("criterion 2 order", convergence_order(nd, e2), 2.0);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria 1-11"};
  std::vector<int> only;
  int threads = 0;
  app.add_option("--only", only, "run only these criteria")->delimiter(',')->check(CLI::Range(1, 11));
  app.add_option("--threads", threads, "worker threads (0: ADCALC_THREADS or hardware)");
  CLI11_PARSE(app, argc, argv);
  if (threads > 0) set_threads(threads);

  const std::vector<std::pair<const char*, Outcome (*)()>> criteria = {
      {"quantization agreement", c1},   {"principal symbol", c2},   {"semi-norm scaling", c3},
      {"section constructions", c4},    {"ideal and limit", c5},    {"rapid decay", c6},
      {"module axioms", c7},            {"rank-one identity", c8},  {"full-module witness", c9},
      {"module-action fiber", c10},     {"convergence sweeps", c11}};
  const std::set<int> chosen(only.begin(), only.end());
  bool all = true;
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!chosen.empty() && !chosen.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome r;
    try {
      r = criteria[i].second();
    } catch (const std::exception& e) {
      r.require_true(std::string("error: ") + e.what(), false);
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    all = all && r.pass;
    std::printf("%s criterion %d (%s): %s [%.1fs]\n", r.pass ? "PASS" : "FAIL", id, criteria[i].first,
                r.detail.str().c_str(), secs);
    std::fflush(stdout);
  }
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%s: acceptance total %.1fs\n", all ? "PASS" : "FAIL", total);
  return all ? 0 : 1;
}
