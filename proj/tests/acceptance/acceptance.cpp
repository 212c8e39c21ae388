#include <CLI11.hpp>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "cvasym/config.hpp"
#include "cvasym/cv_splits.hpp"
#include "cvasym/experiments.hpp"
#include "cvasym/mc_harness.hpp"
#include "cvasym/monotone.hpp"
#include "cvasym/oracle_scaling.hpp"
#include "cvasym/series_estimator.hpp"
#include "cvasym/spectral_density.hpp"

using namespace cvasym;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string configs_dir, cli_path;

std::vector<ExperimentRecord> run_config(const std::string& name) {
  return run_experiment(load_config((fs::path(configs_dir) / name).string()));
}

// Summary row (replicate -1) of a statistic in one (n, V) cell.
double summary(const std::vector<ExperimentRecord>& recs, const std::string& stat, Index n = -1, Index V = -1) {
  for (const auto& r : recs)
    if (r.replicate < 0 && r.statistic == stat && (n < 0 || r.n == n) && (V < 0 || r.V == V)) return r.value;
  throw DataError("acceptance: no summary row " + stat);
}

std::vector<ExperimentRecord> with_stat(const std::vector<ExperimentRecord>& recs, const std::string& stat) {
  std::vector<ExperimentRecord> out;
  for (const auto& r : recs)
    if (r.replicate >= 0 && r.statistic == stat) out.push_back(r);
  return out;
}

CoefficientSequence geometric(double r) {
  FamilyParams p;
  p.ratio = r;
  return make_family(FamilyKind::geometric, p);
}

CoefficientSequence polynomial(double beta, double kappa) {
  FamilyParams p;
  p.exponent = beta;
  p.scale = kappa;
  return make_family(FamilyKind::polynomial, p);
}

CoefficientSequence plateau(double h, Index u) {
  FamilyParams p;
  p.height = h;
  p.width = u;
  return make_family(FamilyKind::plateau, p);
}

// 1. Identities, each recomputed from raw psi sums.
Outcome exact_identities() {
  double worst_parseval = 0.0, worst_split = 0.0, worst_cv = 0.0, worst_ho0 = 0.0, worst_t0 = 0.0;
  const Index N = 1 << 14;
  for (const double r : {0.3, 0.5, 0.7}) {
    const DensityModel m = make_density_model(geometric(r));
    std::vector<double> dens(N);
    for (Index q = 0; q < N; ++q) dens[q] = density_eval(m.seq, double(q) / N);
    for (Index rep = 0; rep < 3; ++rep) {
      const Sample s = draw_sample(m, 200, derive_seed(1, rep));
      const Eigen::VectorXd th = empirical_coeffs(s, 12).theta_hat;
      worst_t0 = std::max(worst_t0, std::abs(th[0] - 1.0));
      for (Index k : {0, 1, 4, 12}) {
        // trapezoid on a periodic analytic integrand: exact to rounding
        double integral = 0.0;
        for (Index q = 0; q < N; ++q) {
          const double x = double(q) / N;
          double est = 0.0;
          for (Index j = 0; j <= k; ++j) est += th[j] * psi(j, x);
          integral += (est - dens[q]) * (est - dens[q]) / N;
        }
        worst_parseval = std::max(worst_parseval, std::abs(exact_excess_risk(th, m.seq, k) - integral));
      }
    }
  }

  for (const auto& seq : {polynomial(1.5, 0.5), geometric(0.6), plateau(1.0 / 900.0, 30)}) {
    const DensityModel m = make_density_model(seq);
    const Index n = 1000, n_t = 900;
    const ScalingSummary sc = scaling(m.seq, n, n_t, false);
    const Index ks = sc.k_star, j_lo = -ks, j_hi = 3 * std::max<Index>(sc.delta, 1);
    for (Index V : {1, 3, 10}) {
      const Sample s = draw_sample(m, n, derive_seed(2, V));
      Rng rng(derive_seed(3, V));
      const SplitScheme sch = make_scheme(n, n_t, V, rng);
      const RescaledProcesses rp = rescaled_processes(s, sch, m.seq, sc, j_lo, j_hi);
      Eigen::VectorXd mean = Eigen::VectorXd::Zero(j_hi - j_lo + 1);
      for (Index i = 0; i < V; ++i) {
        const Fold& f = sch.folds[i];
        worst_ho0 = std::max(worst_ho0, std::abs(holdout_curve(s, f, 0)[0] + 1.0));
        std::vector<double> tr(ks + j_hi + 1, 0.0), te(ks + j_hi + 1, 0.0);
        for (Index l = 0; l <= ks + j_hi; ++l) {
          for (Index a : f.train) tr[l] += psi(l, s.values[a]);
          for (Index a : f.test) te[l] += psi(l, s.values[a]);
          tr[l] /= double(f.train.size());
          te[l] /= double(f.test.size());
        }
        for (Index j = j_lo; j <= j_hi; ++j) {
          // signed sums over (k*, k*+j] or (k*+j, k*]
          double ho = 0.0, L = 0.0, Z = 0.0;
          const double sgn = j >= 0 ? 1.0 : -1.0;
          for (Index l = std::min(ks, ks + j) + 1; l <= std::max(ks, ks + j); ++l) {
            const double t = m.seq.theta(l);
            ho += sgn * (tr[l] * tr[l] - 2.0 * tr[l] * te[l]);
            L += sgn * ((tr[l] - t) * (tr[l] - t) - t * t);
            Z += sgn * 2.0 * tr[l] * (te[l] - t);
          }
          ho /= sc.e_frak;
          L /= sc.e_frak;
          Z /= sc.e_frak;
          worst_split = std::max({worst_split, std::abs(rp.ho[i].at(j) - ho), std::abs(rp.L[i].at(j) - L),
                                  std::abs(rp.Z[i].at(j) - Z), std::abs(ho - (L - Z)),
                                  std::abs(rp.ho[i].at(j) - (rp.L[i].at(j) - rp.Z[i].at(j)))});
          mean[j - j_lo] += rp.ho[i].at(j) / double(V);
        }
      }
      worst_cv = std::max(worst_cv, (rp.cv.values() - mean).cwiseAbs().maxCoeff());
      for (Index k = 0; k <= 5; ++k) {
        double avg = 0.0;
        for (const Fold& f : sch.folds) avg += holdout_crit(s, f.train, k) / double(V);
        worst_cv = std::max(worst_cv, std::abs(cv_crit(s, sch, k) - avg));
      }
    }
  }
  const double worst = std::max({worst_parseval, worst_split, worst_cv, worst_ho0, worst_t0});
  return {worst <= 1e-10, fmt("max errors: parseval %.2e, ho=L-Z %.2e, cv mean %.2e, HO(0)+1 %.2e, theta0-1 %.2e",
                              worst_parseval, worst_split, worst_cv, worst_ho0, worst_t0)};
}

// 2. Exact inequalities over the shipped sweep config (200 random configurations).
Outcome lemma_sweep() {
  const auto recs = run_config("lemma_sweep.yaml");
  double checks = 0, viol = 0, chain = 0, fn = 0, win = 0, gn = 0, cchecks = 0, cviol = 0, configs = 0;
  for (const auto& r : recs) {
    if (r.replicate < 0) continue;
    if (r.statistic == "checks") ++configs, checks += r.value;
    if (r.statistic == "violations") viol += r.value;
    if (r.statistic == "v_scaling_chain") chain += r.value;
    if (r.statistic == "v_f_n") fn += r.value;
    if (r.statistic == "v_window") win += r.value;
    if (r.statistic == "v_g_n") gn += r.value;
    if (r.statistic == "corrected_checks") cchecks += r.value;
    if (r.statistic == "corrected_violations") cviol += r.value;
  }
  return {configs >= 200 && viol == 0,
          fmt("%.0f configs, %.0f violations of %.0f checks (scaling chain %.0f, f_n %.0f, window %.0f, g_n %.0f); "
              "integer-rounding corrected statements: %.0f violations of %.0f",
              configs, viol, checks, chain, fn, win, gn, cviol, cchecks)};
}

// 3. Spectrum of the Toeplitz coefficient matrix sits in [0, ||s||_inf].
Outcome psd_property() {
  const std::vector<CoefficientSequence> fams = {make_family(FamilyKind::uniform, {}), geometric(0.5),
                                                 polynomial(1.5, 0.5), plateau(1.0 / 900.0, 30),
                                                 polynomial(2.5, 0.4)};
  Rng rng(3);
  std::uniform_int_distribution<Index> U(1, 200);
  double min_eig = 1e300, worst_excess = -1e300;
  for (const auto& seq : fams) {
    // non-negative coefficients put the supremum at x = 0
    const double sup = density_eval(seq, 0.0);
    for (int rep = 0; rep < 50; ++rep) {
      Index a = U(rng), b = U(rng);
      if (a > b) std::swap(a, b);
      const Eigen::VectorXd ev =
          Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(toeplitz_cov_matrix(seq, a, b), Eigen::EigenvaluesOnly)
              .eigenvalues();
      min_eig = std::min(min_eig, ev.minCoeff());
      worst_excess = std::max(worst_excess, ev.maxCoeff() - sup);
    }
  }
  return {min_eig >= -1e-10 && worst_excess <= 1e-8,
          fmt("250 matrices: min eigenvalue %.3e, max(eigenvalue - ||s||_inf) %.3e", min_eig, worst_excess)};
}

// 4. Worked scaling examples.
Outcome worked_examples() {
  const ScalingSummary p = scaling(plateau(1.0 / 900.0, 30), 1000, 900);
  const bool tuple = p.k_star == 30 && p.delta_d == 9 && p.delta_g == 30 && p.delta == 30;
  const bool E = std::abs(p.E_script - 1.0 / 30.0) <= 1e-15;
  const bool e = std::abs(p.e_frak - 1.0 / std::sqrt(3000.0)) <= 1e-15;
  const ScalingSummary g = scaling(geometric(1.0 / 3.0), 10000, 9900);
  const bool geo = std::abs(g.delta - 99) <= 1;
  return {tuple && E && e && geo,
          fmt("plateau (k*, D_d, D_g, D) = (%lld, %lld, %lld, %lld), E = %.17g, e = %.17g; geometric(1/3) D = %lld",
              (long long)p.k_star, (long long)p.delta_d, (long long)p.delta_g, (long long)p.delta, p.E_script,
              p.e_frak, (long long)g.delta)};
}

// 5. E HO(k) + ||s||^2 = E ||s_k - s||^2.  k = 0 is deterministic (both sides
// are ||s||^2 - 1) so its stderr is 0 and a rounding floor is allowed.
Outcome unbiasedness() {
  const auto recs = run_config("unbiasedness.yaml");
  double worst_z = 0.0;
  bool ok = true;
  Index ks = 0;
  for (Index k = 0;; ++k) {
    double mean, se;
    try {
      mean = summary(recs, "gap_mean_k" + std::to_string(k));
      se = summary(recs, "gap_se_k" + std::to_string(k));
    } catch (const DataError&) {
      break;
    }
    ks = k + 1;
    if (!(std::abs(mean) <= 4.0 * se + 1e-12)) ok = false;
    if (se > 0.0) worst_z = std::max(worst_z, std::abs(mean) / se);
  }
  const Index reps = Index(with_stat(recs, "gap_k0").size());
  return {ok && ks == 11 && reps == 10000,
          fmt("k = 0..%lld, %lld replicates, max |mean gap| / stderr = %.3f", (long long)(ks - 1), (long long)reps,
              worst_z)};
}

// 6. Var(cv) / Var(ho) near 1/V.
Outcome variance_ratio() {
  const auto recs = run_config("variance_ratio.yaml");
  bool ok = true;
  std::string detail;
  for (Index V : {2, 5}) {
    for (double a : {-0.5, 0.5, 1.0}) {
      const double r = summary(recs, stat_name("var_ratio", a), -1, V);
      const double lo = 0.75 / double(V), hi = 1.33 / double(V);
      if (!(r >= lo && r <= hi)) ok = false;
      detail += fmt("V=%lld a=%g: %.4f in [%.4f, %.4f]; ", (long long)V, a, r, lo, hi);
    }
  }
  detail.resize(detail.size() - 2);
  return {ok, detail};
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

// 7. sup |cond_cov_Z - K(g_n)| along n = 500, 2000, 8000.
Outcome cov_match() {
  const auto recs = run_config("cov_match.yaml");
  std::vector<double> v;
  for (Index n : {500, 2000, 8000}) v.push_back(summary(recs, "sup_diff_mean", n));
  return {strictly_decreasing(v), fmt("mean sup diff over 20 training sets: %.4f, %.4f, %.4f", v[0], v[1], v[2])};
}

// 8. Median sup |L - f_n| on the window along the same ladder.
Outcome excess_risk_shape() {
  const auto recs = run_config("excess_risk_shape.yaml");
  std::vector<double> v;
  for (Index n : {500, 2000, 8000}) v.push_back(summary(recs, "sup_L_minus_f_median", n));
  return {strictly_decreasing(v), fmt("median over 200 replicates: %.4f, %.4f, %.4f", v[0], v[1], v[2])};
}

// 9. Trace formula against Monte Carlo, and both marginals.
Outcome coupling() {
  const auto recs = run_config("coupling_check.yaml");
  double wz = 0.0, mz = 0.0, exact = 0.0;
  Index pairs = 0, max_dim = 0;
  for (const auto& r : recs) {
    if (r.statistic == "w2_z") wz = std::max(wz, std::abs(r.value)), ++pairs, max_dim = std::max(max_dim, r.n);
    if (r.statistic == "marginal_z_max") mz = std::max(mz, r.value);
    if (r.statistic == "marginal_exact_err") exact = std::max(exact, r.value);
  }
  return {pairs >= 20 && max_dim <= 50 && wz <= 4.0 && mz <= 4.0 && exact <= 1e-8,
          fmt("%lld pairs (dim <= %lld): max |W2 z| %.3f, max marginal z %.3f, max |AA^T - K| %.2e",
              (long long)pairs, (long long)max_dim, wz, mz, exact)};
}

// 10. Monotone correction on random inputs meeting its hypothesis.
Outcome monotone() {
  std::mt19937_64 gen(10);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  Index accepted = 0, tried = 0;
  double worst_ratio = 0.0, worst_dec = 0.0, worst_inc = 0.0;
  while (accepted < 100 && tried < 100000) {
    ++tried;
    const Index m = 20 + Index(U(gen) * 200);
    Eigen::VectorXd t(m), h(m), g0(m), eps(m);
    const double e0 = 0.01 + 0.5 * U(gen), growth = U(gen) < 0.5 ? 0.0 : U(gen), amp = U(gen);
    const double freq = 1.0 + 20.0 * U(gen), share = U(gen);
    t[0] = h[0] = 0.0;
    double mono = 0.0;
    for (Index q = 0; q < m; ++q) {
      if (q > 0) {
        t[q] = t[q - 1] + 0.01 + 0.2 * U(gen);
        const double dh = (t[q] - t[q - 1]) * (0.2 + 5.0 * U(gen));
        h[q] = h[q - 1] + dh;
        mono += share * U(gen) * dh;
      }
      eps[q] = e0 * (1.0 + growth * t[q]);
      // monotone part with increments below dh plus a wiggle below eps/2
      g0[q] = mono - 0.5 * amp * e0 * (0.5 + 0.5 * std::sin(freq * t[q]));
    }
    const MonotoneResult r = monotone_correct(t, g0, h, eps);
    if (!r.hypothesis_held) continue;
    ++accepted;
    for (Index q = 0; q < m; ++q) {
      worst_ratio = std::max(worst_ratio, std::abs(r.values[q] - g0[q]) / eps[q]);
      if (q == 0) continue;
      const double dg = r.values[q] - r.values[q - 1];
      worst_dec = std::max(worst_dec, -dg);
      worst_inc = std::max(worst_inc, dg - (h[q] - h[q - 1]));
    }
  }
  return {accepted == 100 && worst_dec <= 0.0 && worst_ratio <= 6.0 && worst_inc <= 1e-12,
          fmt("%lld inputs (%lld drawn): max decrease %.2e, max |g-g0|/eps %.3f, max dg - dh %.2e",
              (long long)accepted, (long long)tried, worst_dec, worst_ratio, worst_inc)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool run_cli(const std::string& threads, const fs::path& out) {
  const std::string cmd = (threads.empty() ? std::string() : "CVASYM_THREADS=" + threads + " ") + "\"" + cli_path +
                          "\" run --config \"" + (fs::path(configs_dir) / "determinism.yaml").string() + "\" > \"" +
                          out.string() + "\"";
  return std::system(cmd.c_str()) == 0;
}

// 11. Byte-identical reruns; thread count does not change the record set.
Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / ("cvasym_acc_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const fs::path a = dir / "a.csv", b = dir / "b.csv", one = dir / "t1.csv", four = dir / "t4.csv";
  const bool ran = run_cli("", a) && run_cli("", b) && run_cli("1", one) && run_cli("4", four);
  Outcome o;
  if (!ran) {
    o.detail = "cvasym run failed";
  } else {
    const std::string sa = slurp(a), sb = slurp(b);
    auto r1 = parse_csv(slurp(one)), r4 = parse_csv(slurp(four));
    std::sort(r1.begin(), r1.end());
    std::sort(r4.begin(), r4.end());
    const bool same_bytes = !sa.empty() && sa == sb;
    const bool same_set = !r1.empty() && r1 == r4;
    o.pass = same_bytes && same_set;
    o.detail = fmt("rerun byte-identical: %s (%zu bytes); 1 vs 4 workers same sorted records: %s (%zu records)",
                   same_bytes ? "yes" : "no", sa.size(), same_set ? "yes" : "no", r1.size());
  }
  fs::remove_all(dir);
  return o;
}

struct Criterion {
  const char* name;
  double budget_s;  // 0: no stated limit
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int only = 0;
  app.add_option("--criterion", only, "run a single criterion (1-11)")->check(CLI::Range(1, 11));
  app.add_option("--configs", configs_dir, "config directory")->required()->check(CLI::ExistingDirectory);
  app.add_option("--cli", cli_path, "cvasym executable")->required()->check(CLI::ExistingFile);
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria = {
      {"exact identities", 10, exact_identities},
      {"lemma sweep", 120, lemma_sweep},
      {"PSD property", 30, psd_property},
      {"worked examples", 5, worked_examples},
      {"unbiasedness", 300, unbiasedness},
      {"variance reduction", 600, variance_ratio},
      {"covariance approximation trend", 600, cov_match},
      {"excess risk shape trend", 600, excess_risk_shape},
      {"coupling", 120, coupling},
      {"monotone correction", 60, monotone},
      {"determinism", 0, determinism},
  };
  int failed = 0;
  for (int c = 1; c <= int(criteria.size()); ++c) {
    if (only && c != only) continue;
    const Criterion& cr = criteria[c - 1];
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = cr.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = cr.budget_s == 0 || secs < cr.budget_s;
    const bool pass = o.pass && in_time;
    const std::string limit = cr.budget_s > 0 ? fmt(" (limit %.0f s)", cr.budget_s) : std::string();
    std::printf("criterion %d [%s] %s: %s; %.1f s%s\n", c, cr.name, pass ? "PASS" : "FAIL", o.detail.c_str(), secs,
                limit.c_str());
    std::fflush(stdout);
    if (!pass) ++failed;
  }
  return failed ? 1 : 0;
}
