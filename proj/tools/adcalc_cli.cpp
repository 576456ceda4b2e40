#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "adcalc/scenario.hpp"

namespace {

struct CommonFlags {
  std::string config;
  std::string out;
  std::optional<std::size_t> grid_n;
  std::optional<double> t_min, t_max;
  std::optional<std::size_t> t_nodes;
  std::optional<int> m;
  std::optional<double> tolerance_scale;
  std::optional<int> threads;
  std::string generator;
  std::string corpus_entry;
  std::string symbol;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config, "scenario config (JSON)")->check(CLI::ExistingFile);
  app->add_option("--out", f.out, "output directory");
  app->add_option("--grid-n", f.grid_n, "grid size (power of two)");
  app->add_option("--t-min", f.t_min, "quadrature t_min");
  app->add_option("--t-max", f.t_max, "quadrature t_max");
  app->add_option("--t-nodes", f.t_nodes, "quadrature node count");
  app->add_option("--m", f.m, "weight exponent m");
  app->add_option("--tolerance-scale", f.tolerance_scale, "multiplier on error tolerances");
  app->add_option("--threads", f.threads, "worker threads (falls back to ADCALC_THREADS)");
  app->add_option("--family", f.generator, "analytic generator name");
  app->add_option("--corpus", f.corpus_entry, "corpus entry name");
  app->add_option("--symbol", f.symbol, "order-0 symbol name");
}

adcalc::ScenarioConfig make_config(adcalc::ScenarioKind kind, const CommonFlags& f) {
  using namespace adcalc;
  ScenarioConfig c;
  if (!f.config.empty()) {
    c = load_config(f.config);
    if (c.kind != kind)
      fail(ErrorKind::config, "scenario: config names '" + to_string(c.kind) + "' but the subcommand is '" +
                                  to_string(kind) + "'");
  }
  c.kind = kind;
  if (!f.generator.empty() && !f.corpus_entry.empty()) fail(ErrorKind::config, "give --family or --corpus, not both");
  if (!f.generator.empty()) {
    c.family = {};
    c.family.generator = f.generator;
  }
  if (!f.corpus_entry.empty()) {
    c.family = {};
    c.family.generator.clear();
    c.family.corpus_entry = f.corpus_entry;
  }
  if (!f.symbol.empty()) c.symbol.name = f.symbol;
  if (!f.out.empty()) c.out_dir = f.out;
  if (f.grid_n) c.grid_n = *f.grid_n;
  if (f.t_min) c.quadrature.t_min = *f.t_min;
  if (f.t_max) c.quadrature.t_max = *f.t_max;
  if (f.t_nodes) c.quadrature.n_nodes = *f.t_nodes;
  if (f.m) c.m = *f.m;
  if (f.tolerance_scale) c.tolerance_scale = *f.tolerance_scale;
  if (!is_pow2_size(c.grid_n)) fail(ErrorKind::config, "grid.n: must be a power of two");
  if (!(c.quadrature.t_min > 0.0)) fail(ErrorKind::config, "quadrature.t_min: must be positive");
  if (!(c.quadrature.t_max > c.quadrature.t_min)) fail(ErrorKind::config, "quadrature.t_max: must exceed t_min");
  if (c.quadrature.n_nodes < 2) fail(ErrorKind::config, "quadrature.n_nodes: at least two nodes");
  if (!(c.tolerance_scale > 0.0)) fail(ErrorKind::config, "tolerance_scale: must be positive");
  if (kind == ScenarioKind::sweep && !c.sweep) fail(ErrorKind::config, "sweep: missing for a sweep scenario");
  return c;
}

int run(adcalc::ScenarioKind kind, const CommonFlags& f) {
  using namespace adcalc;
  if (f.threads) set_threads(*f.threads);
  const auto cfg = make_config(kind, f);
  const auto rep = run_scenario(cfg);
  rep.write(cfg.out_dir);
  for (const auto& c : rep.checks)
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << " measured=" << format_double(c.measured)
              << " tolerance=" << format_double(c.tolerance) << "\n";
  std::cout << rep.scenario << ": " << (rep.pass() ? "PASS" : "FAIL") << "\n";
  return rep.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adcalc: adiabatic groupoid pseudodifferential calculus on the real line"};
  app.require_subcommand(1);
  CommonFlags flags;
  std::optional<adcalc::ScenarioKind> chosen;
  for (const auto& [name, kind] : adcalc::scenario_names()) {
    auto* sub = app.add_subcommand(name, "run the " + name + " scenario");
    add_common(sub, flags);
    sub->callback([&chosen, k = kind] { chosen = k; });
  }

  std::string sample_out;
  std::string sample_gen = "psi-window";
  std::size_t sample_nx = 33, sample_nu = 129, sample_nt = 17;
  auto* sample = app.add_subcommand("sample", "write an analytic family as an ADKF file");
  sample->add_option("--family", sample_gen, "analytic generator name");
  sample->add_option("--out", sample_out, "output file")->required();
  sample->add_option("--nx", sample_nx, "x samples");
  sample->add_option("--nu", sample_nu, "U samples");
  sample->add_option("--nt", sample_nt, "t samples, geometric over [2^-6, 4]");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (sample->parsed()) {
      using namespace adcalc;
      require(sample_nx >= 2 && sample_nu >= 2 && sample_nt >= 2, ErrorKind::config, "sample: at least two points per axis");
      const auto f = corpus::by_name(sample_gen, {}, {}, default_quadrature());
      std::vector<double> xs(sample_nx), us(sample_nu), ts(sample_nt);
      for (std::size_t i = 0; i < sample_nx; ++i) xs[i] = -4.0 + 8.0 * static_cast<double>(i) / (sample_nx - 1);
      for (std::size_t i = 0; i < sample_nu; ++i)
        us[i] = -f.support_u() + 2.0 * f.support_u() * static_cast<double>(i) / (sample_nu - 1);
      for (std::size_t i = 0; i < sample_nt; ++i)
        ts[i] = std::exp2(-6.0 + 8.0 * static_cast<double>(i) / static_cast<double>(sample_nt - 1));
      save_field(sample_out, normal_coords(f, xs, us, ts), f.p());
      std::cout << "wrote " << sample_out << "\n";
      return 0;
    }
    return run(*chosen, flags);
  } catch (const adcalc::Error& e) {
    std::cerr << e.what() << "\n";
    return e.kind() == adcalc::ErrorKind::config ? 2 : 3;
  }
}
