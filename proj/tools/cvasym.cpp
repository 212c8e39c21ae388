#include <CLI11.hpp>
#include <yaml-cpp/yaml.h>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>

#include "cvasym/config.hpp"
#include "cvasym/errors.hpp"
#include "cvasym/limit_process.hpp"
#include "cvasym/mc_harness.hpp"
#include "cvasym/oracle_scaling.hpp"

using namespace cvasym;

namespace {

struct CurveRow {
  std::string series;
  double alpha, value;
};

void write_curves(const std::vector<CurveRow>& rows, const std::string& path) {
  std::FILE* out = path.empty() ? stdout : std::fopen(path.c_str(), "wb");
  if (!out) throw DataError("curves: cannot open " + path + " for writing");
  std::fprintf(out, "series,alpha,value\n");
  for (const auto& r : rows) std::fprintf(out, "%s,%.17g,%.17g\n", r.series.c_str(), r.alpha, r.value);
  if (out != stdout) std::fclose(out);
}

void add_grid(std::vector<CurveRow>& rows, const std::string& name, const GridFunction& f, Index lo, Index hi) {
  for (Index j = lo; j <= hi; ++j) rows.push_back({name, f.alpha(j), f.at(j)});
}

// f_n, g_n and the window for a family at (n, n_t).
std::vector<CurveRow> family_curves(const std::string& family, Index n, Index n_t, double x) {
  const DensityModel model = make_density_model(make_family(FamilySpec::parse(family)));
  const ScalingSummary sc = scaling(model.seq, n, n_t);
  if (sc.degenerate) throw ConstructionError("curves: degenerate scaling for this (n, n_t)");
  const GridFunction f = risk_shape(model.seq, sc, x + 1.0);
  const GridFunction g = build_gn(model, sc, f).g.values;
  const Window w = window(f, x);
  std::vector<CurveRow> rows;
  add_grid(rows, "f_n", f, f.j_min(), f.j_max());
  add_grid(rows, "g_n", g, g.j_min(), g.j_max());
  rows.push_back({"a_x", w.a, x});
  rows.push_back({"b_x", w.b, x});
  return rows;
}

// Closed-form fixtures behind the two illustrative plots: f is e^{-a} - 1
// on the left and 0.8 a + (8/30) a^3 on the right, g = 7.8 a - 3 f 1{a<0}.
std::vector<CurveRow> demo_curves(const YAML::Node& node) {
  const std::string demo = node["demo"].as<std::string>();
  const double x = node["x"].as<double>();
  const double delta = node["delta"].as<double>(100.0);
  const double s2 = node["s_norm_sq"].as<double>();
  const double s_inf = node["s_sup"].as<double>();
  if (demo != "figure1" && demo != "figure2") throw ConfigError("curves.demo: expected figure1 or figure2");
  auto f_of = [](double a) { return a <= 0.0 ? std::exp(-a) - 1.0 : 0.8 * a + 8.0 / 30.0 * a * a * a; };
  // window ends solve f = x on each side
  const double a_x = -std::log1p(x);
  double lo = 0.0, hi = 1.0;
  while (f_of(hi) < x) hi *= 2.0;
  for (int it = 0; it < 200; ++it) (f_of(0.5 * (lo + hi)) < x ? lo : hi) = 0.5 * (lo + hi);
  const double b_x = lo;
  const Index j_lo = static_cast<Index>(std::ceil(a_x * delta)), j_hi = static_cast<Index>(std::floor(b_x * delta));
  GridFunction f = GridFunction::zeros(j_lo, j_hi, delta), g = f;
  for (Index j = j_lo; j <= j_hi; ++j) {
    const double a = f.alpha(j);
    f.at(j) = f_of(a);
    g.at(j) = 7.8 * a - (a < 0.0 ? 3.0 * f.at(j) : 0.0);
  }
  std::vector<CurveRow> rows;
  add_grid(rows, "f_n", f, j_lo, j_hi);
  add_grid(rows, "g_n", g, j_lo, j_hi);
  rows.push_back({"a_x", a_x, x});
  rows.push_back({"b_x", b_x, x});
  if (demo == "figure1") {
    for (Index j = j_lo; j <= j_hi; ++j) {
      const double a = f.alpha(j);
      rows.push_back({"f_lower", a, std::max(std::abs(a) - 1.0, 0.0)});
      rows.push_back({"g_lower", a, 4.0 * s2 * a});
      rows.push_back({"g_upper", a, (a >= 0 ? 1.0 : -1.0) * 20.0 * s_inf * (1.0 + x)});
    }
  } else {
    Rng rng(node["seed"].as<std::uint64_t>(1));
    const GaussianPath w = simulate_path(g, 1, rng);
    add_grid(rows, "W_g", w.values, j_lo, j_hi);
  }
  return rows;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cvasym: hold-out and V-fold CV asymptotics for cosine-series density estimation"};
  app.require_subcommand(1);

  std::string config_path, output, format;
  auto* run = app.add_subcommand("run", "run the experiment described by a config file");
  run->add_option("--config", config_path, "YAML or JSON config")->required()->check(CLI::ExistingFile);
  run->add_option("--output", output, "output path (overrides the config)");
  run->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  std::string experiment;
  std::vector<Index> ladder;
  std::uint64_t seed = 0;
  Index replicates = 0;
  auto* sweep = app.add_subcommand("sweep", "run a named experiment with its default settings");
  sweep->add_option("--experiment", experiment, "experiment name")->required();
  sweep->add_option("--n", ladder, "sample sizes");
  sweep->add_option("--seed", seed, "base seed");
  sweep->add_option("--replicates", replicates, "replicate count");
  sweep->add_option("--output", output, "output path (default stdout)");
  sweep->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  std::string family, demo_path;
  Index n = 0, n_t = 0;
  double x = 3.0;
  auto* curves = app.add_subcommand("curves", "emit f_n, g_n and the window [a_x, b_x] as CSV");
  curves->add_option("--family", family, "family spec, e.g. polynomial:beta=1.5,kappa=0.5");
  curves->add_option("--n", n, "sample size");
  curves->add_option("--n_t", n_t, "training size");
  curves->add_option("--x", x, "window level");
  curves->add_option("--demo", demo_path, "demo config with a `curves` table")->check(CLI::ExistingFile);
  curves->add_option("--output", output, "output path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run || *sweep) {
      ExperimentConfig cfg;
      if (*run) {
        cfg = load_config(config_path);
      } else {
        cfg = default_config(experiment);
        if (!ladder.empty()) {
          cfg.n = ladder;
          if (cfg.n_t.kind == NtRule::Kind::explicit_list) {
            cfg.n_t.kind = NtRule::Kind::fraction;
            cfg.n_t.fraction = 0.9;
          }
        }
        if (sweep->count("--seed")) cfg.base_seed = seed;
        if (replicates > 0) cfg.replicates = replicates;
        cfg.output_path.clear();
      }
      if (!output.empty()) cfg.output_path = output;
      if (!format.empty()) cfg.format = format == "json" ? OutputFormat::json : OutputFormat::csv;
      const auto records = run_experiment(cfg);
      if (cfg.output_path.empty())
        std::cout << (cfg.format == OutputFormat::csv ? to_csv(records) : to_json(records));
      else
        emit(records, cfg.format, cfg.output_path);
    } else if (*curves) {
      std::vector<CurveRow> rows;
      if (!demo_path.empty()) {
        rows = demo_curves(YAML::LoadFile(demo_path)["curves"]);
      } else {
        if (family.empty() || n == 0 || n_t == 0) throw ConfigError("curves: need --family, --n and --n_t, or --demo");
        rows = family_curves(family, n, n_t, x);
      }
      write_curves(rows, output);
    }
  } catch (const std::exception& e) {
    std::cerr << "cvasym: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
