#include "cvasym/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>

#include "cvasym/coupling.hpp"
#include "cvasym/cv_splits.hpp"
#include "cvasym/errors.hpp"
#include "cvasym/series_estimator.hpp"

namespace cvasym {

namespace {

bool le_tol(double a, double b) { return a <= b + 1e-9 * (1.0 + std::abs(a) + std::abs(b)); }

// One (n, n_t, V) cell of a ladder experiment.
struct Cell {
  Index pos = 0, n = 0, n_t = 0, V = 1;
  std::uint64_t seed = 0;
};

std::vector<Cell> cells(const ExperimentConfig& cfg, bool per_V) {
  std::vector<Cell> out;
  for (std::size_t i = 0; i < cfg.n.size(); ++i) {
    const std::vector<Index> Vs = per_V ? cfg.V : std::vector<Index>{1};
    for (Index V : Vs) {
      Cell c;
      c.pos = static_cast<Index>(i);
      c.n = cfg.n[i];
      c.n_t = cfg.n_t.n_t(c.n, i);
      c.V = V;
      c.seed = derive_seed(cfg.base_seed, i, static_cast<std::uint64_t>(V));
      out.push_back(c);
    }
  }
  return out;
}

class RecordSink {
 public:
  RecordSink(const ExperimentConfig& cfg, Index replicates)
      : experiment_(cfg.experiment), family_(cfg.family.to_string()), per_rep_(replicates) {}

  void add(const Cell& c, Index rep, const std::string& stat, double v, std::uint64_t seed) {
    auto& dst = rep >= 0 ? per_rep_[rep] : summary_;
    dst.push_back({experiment_, family_, c.n, c.n_t, c.V, rep, stat, v, seed});
  }

  std::vector<ExperimentRecord>& replicate(Index rep) { return per_rep_[rep]; }
  const std::string& family() const { return family_; }

  void flush_into(std::vector<ExperimentRecord>& out) {
    for (auto& v : per_rep_) {
      out.insert(out.end(), v.begin(), v.end());
      v.clear();
    }
    out.insert(out.end(), summary_.begin(), summary_.end());
    summary_.clear();
  }

 private:
  std::string experiment_, family_;
  std::vector<std::vector<ExperimentRecord>> per_rep_;
  std::vector<ExperimentRecord> summary_;
};

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double var_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return ss / static_cast<double>(v.size() - 1);
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::vector<double> column(const std::vector<ExperimentRecord>& recs, const std::string& stat) {
  std::vector<double> out;
  for (const auto& r : recs)
    if (r.statistic == stat) out.push_back(r.value);
  return out;
}

Index knot_of(double alpha, const ScalingSummary& sc) {
  return static_cast<Index>(std::llround(alpha * static_cast<double>(sc.delta)));
}

Index auto_k_max(const ExperimentConfig& cfg, const CoefficientSequence& seq, const ScalingSummary& sc) {
  if (cfg.k_max > 0) return cfg.k_max;
  return sc.k_star + f_n_extent(seq, sc, cfg.x_max);
}

ScalingSummary checked_scaling(const CoefficientSequence& seq, const Cell& c) {
  const ScalingSummary sc = scaling(seq, c.n, c.n_t);
  if (sc.degenerate)
    throw ConstructionError("degenerate scaling at n = " + std::to_string(c.n) + ", n_t = " + std::to_string(c.n_t));
  return sc;
}

Eigen::MatrixXd random_psd(Index d, Rng& rng) {
  std::uniform_int_distribution<Index> rank_dist(1, d);
  std::normal_distribution<double> gauss;
  const Index r = rank_dist(rng);
  Eigen::MatrixXd A(d, r);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < r; ++j) A(i, j) = gauss(rng);
  return A * A.transpose() / static_cast<double>(r);
}

}  // namespace

std::string stat_name(const std::string& base, double param) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, param);
  return base + "@" + std::string(buf, res.ptr);
}

AdmissibleConfig random_admissible(Rng& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    AdmissibleConfig ac;
    ac.n = static_cast<Index>(std::llround(std::exp(std::log(300.0) + u01(rng) * std::log(20000.0 / 300.0))));
    const double frac = 0.02 + 0.28 * u01(rng);
    ac.n_t = ac.n - std::max<Index>(1, static_cast<Index>(std::llround(frac * static_cast<double>(ac.n))));
    ac.x = 0.5 + 4.5 * u01(rng);
    const int kind = static_cast<int>(u01(rng) * 3.0);
    if (kind == 0) {
      ac.family.kind = FamilyKind::geometric;
      ac.family.params.ratio = 0.3 + 0.55 * u01(rng);
    } else if (kind == 1) {
      ac.family.kind = FamilyKind::polynomial;
      ac.family.params.exponent = 1.1 + 1.9 * u01(rng);
      ac.family.params.scale = 0.2 + 0.5 * u01(rng);
    } else {
      ac.family.kind = FamilyKind::plateau;
      ac.family.params.height = (1.0 + 19.0 * u01(rng)) / static_cast<double>(ac.n_t);
      ac.family.params.width = 5 + static_cast<Index>(u01(rng) * 56.0);
    }
    const CoefficientSequence seq = make_family(ac.family);
    const ScalingSummary sc = scaling(seq, ac.n, ac.n_t, false);
    if (sc.canonical && !sc.degenerate && sc.k_star >= 1) return ac;
  }
  throw ConstructionError("random_admissible: no admissible configuration found");
}

LemmaReport lemma_report(const AdmissibleConfig& ac, EpsSpec eps, GnMode mode) {
  LemmaReport rep;
  const CoefficientSequence seq = make_family(ac.family);
  const ScalingSummary sc = scaling(seq, ac.n, ac.n_t, false);
  auto check = [&](bool ok, Index& group, const std::string& what) {
    ++rep.checks;
    if (ok) return;
    ++group;
    rep.violations.push_back(what);
  };

  auto corrected = [&](bool ok, const std::string& what) {
    ++rep.corrected_checks;
    if (!ok) rep.corrected_violations.push_back(what);
  };
  const double d = static_cast<double>(sc.delta);
  corrected(sc.delta >= sc.n_t / sc.n_v, "Delta >= floor(n_t/n_v)");
  corrected(le_tol(sc.E_script, 2.0 * sc.oracle_risk + 1.0 / static_cast<double>(sc.n_v)), "E <= 2 or(n_t) + 1/n_v");

  const auto chain = scaling_chain_violations(sc);
  rep.checks += 5;
  for (const auto& v : chain) {
    ++rep.odgs;
    rep.violations.push_back(v);
  }

  const GridFunction f = risk_shape(seq, sc, ac.x + 1.0);
  const double step = 1.0 / f.delta();
  check(f.at(0) == 0.0, rep.fn, "f_n(0) = 0");
  for (Index j = f.j_min(); j <= f.j_max(); ++j) {
    const double a = std::abs(f.alpha(j));
    check(le_tol(std::max(a - 1.0, 0.0), f.at(j)), rep.fn, "f_n >= (|a|-1)_+ at j=" + std::to_string(j));
  }
  for (Index j = f.j_min() + 1; j < f.j_max(); ++j)
    check(le_tol(f.at(j) - f.at(j - 1), f.at(j + 1) - f.at(j)), rep.fn, "f_n convex at j=" + std::to_string(j));
  for (Index j = sc.delta; j < f.j_max(); ++j) {
    check(le_tol(step, f.at(j + 1) - f.at(j)), rep.fn, "f_n increment >= |da| at j=" + std::to_string(j));
    corrected(le_tol(step * std::sqrt(d / (d + 1.0)), f.at(j + 1) - f.at(j)),
              "f_n increment >= sqrt(D/(D+1))|da| at j=" + std::to_string(j));
  }
  for (Index j = -sc.delta; j > f.j_min(); --j) {
    check(le_tol(step, f.at(j - 1) - f.at(j)), rep.fn, "f_n increment >= |da| at j=" + std::to_string(j));
    corrected(le_tol(step, f.at(j - 1) - f.at(j)), "f_n increment >= |da| at j=" + std::to_string(j));
  }
  if (sc.delta == sc.delta_d)
    for (Index j = 0; j < sc.delta && j < f.j_max(); ++j)
      check(le_tol(f.at(j + 1) - f.at(j), step), rep.fn, "f_n slope <= 1 on [0,1] at j=" + std::to_string(j));
  if (sc.delta == sc.delta_g)
    for (Index j = -1; j >= -sc.delta && j >= f.j_min(); --j) {
      check(le_tol(-step, f.at(j + 1) - f.at(j)), rep.fn, "f_n slope >= -1 on [-1,0] at j=" + std::to_string(j));
      if (sc.delta >= 2)
        corrected(le_tol(-step * std::sqrt(d / (d - 1.0)), f.at(j + 1) - f.at(j)),
                  "f_n slope >= -sqrt(D/(D-1)) on [-1,0] at j=" + std::to_string(j));
    }

  const Window w = window(f, ac.x);
  check(le_tol(w.b - w.a, 2.0 * (1.0 + ac.x)), rep.window, "b_x - a_x <= 2(1+x)");
  double mass = 0.0;
  for (Index i = sc.k_star + w.j_a + 1; i <= sc.k_star + w.j_b; ++i) mass += seq.theta_sq(i);
  check(le_tol(mass, 4.0 * (1.0 + ac.x) * sc.E_script), rep.window, "window theta^2 mass <= 4(1+x)E");

  const DensityModel model = make_density_model(seq);
  ++rep.checks;
  try {
    build_gn(model, sc, f, eps, mode);
  } catch (const ConstructionError& e) {
    ++rep.gn;
    rep.violations.push_back(e.what());
  }
  return rep;
}

GridFunction loss_process(const Eigen::Ref<const Eigen::VectorXd>& theta_hat, const CoefficientSequence& seq,
                          const ScalingSummary& sc, Index j_lo, Index j_hi) {
  if (j_lo < -sc.k_star || j_lo > 0 || j_hi < 0 || sc.k_star + j_hi >= theta_hat.size())
    throw ParameterError("loss_process: knot range outside coefficients");
  auto term = [&](Index i) {
    const double d = theta_hat[i] - seq.theta(i);
    return d * d - seq.theta_sq(i);
  };
  GridFunction L = GridFunction::zeros(j_lo, j_hi, static_cast<double>(sc.delta));
  double acc = 0.0;
  for (Index j = 1; j <= j_hi; ++j) L.at(j) = (acc += term(sc.k_star + j)) / sc.e_frak;
  acc = 0.0;
  for (Index j = -1; j >= j_lo; --j) L.at(j) = (acc -= term(sc.k_star + j + 1)) / sc.e_frak;
  return L;
}

double same_sign_sup(const Eigen::MatrixXd& C, const Eigen::MatrixXd& K, Index j_lo) {
  double sup = 0.0;
  for (Index p = 0; p < C.rows(); ++p)
    for (Index q = 0; q < C.cols(); ++q) {
      const Index j1 = j_lo + p, j2 = j_lo + q;
      if ((j1 >= 0 && j2 >= 0) || (j1 <= 0 && j2 <= 0)) sup = std::max(sup, std::abs(C(p, q) - K(p, q)));
    }
  return sup;
}

namespace experiments {

std::vector<ExperimentRecord> unbiasedness(const ExperimentConfig& cfg, Index workers) {
  const DensityModel model = make_density_model(make_family(cfg.family));
  std::vector<ExperimentRecord> out;
  for (const Cell& c : cells(cfg, false)) {
    const Index k_max = cfg.k_max > 0 ? cfg.k_max : auto_k_max(cfg, model.seq, checked_scaling(model.seq, c));
    RecordSink sink(cfg, cfg.replicates);
    parallel_for(cfg.replicates, workers, [&](Index r) {
      const std::uint64_t seed = derive_seed(c.seed, r);
      const Sample s = draw_sample(model, c.n, seed);
      Rng rng(derive_seed(seed, 0, 1));
      const SplitScheme sch = make_scheme(c.n, c.n_t, 1, rng);
      const Eigen::VectorXd ho = holdout_curve(s, sch.folds[0], k_max);
      const Eigen::VectorXd th = empirical_coeffs(s, sch.folds[0].train, k_max).theta_hat;
      const Eigen::VectorXd risk = excess_risk_curve(th, model.seq);
      for (Index k = 0; k <= k_max; ++k)
        sink.add(c, r, "gap_k" + std::to_string(k), ho[k] + model.l2_norm_sq - risk[k], seed);
    });
    for (Index k = 0; k <= k_max; ++k) {
      std::vector<double> v;
      for (Index r = 0; r < cfg.replicates; ++r) v.push_back(sink.replicate(r)[k].value);
      sink.add(c, -1, "gap_mean_k" + std::to_string(k), mean_of(v), cfg.base_seed);
      sink.add(c, -1, "gap_se_k" + std::to_string(k), std::sqrt(var_of(v) / static_cast<double>(v.size())),
               cfg.base_seed);
    }
    sink.flush_into(out);
  }
  return out;
}

std::vector<ExperimentRecord> variance_ratio(const ExperimentConfig& cfg, Index workers) {
  const DensityModel model = make_density_model(make_family(cfg.family));
  std::vector<ExperimentRecord> out;
  for (const Cell& c : cells(cfg, true)) {
    const ScalingSummary sc = checked_scaling(model.seq, c);
    std::vector<Index> knots;
    for (double a : cfg.alphas) knots.push_back(std::max(knot_of(a, sc), -sc.k_star));
    const Index j_lo = std::min<Index>(0, *std::min_element(knots.begin(), knots.end()));
    const Index j_hi = std::max<Index>(0, *std::max_element(knots.begin(), knots.end()));
    RecordSink sink(cfg, cfg.replicates);
    parallel_for(cfg.replicates, workers, [&](Index r) {
      const std::uint64_t seed = derive_seed(c.seed, r);
      const Sample s = draw_sample(model, c.n, seed);
      Rng rng(derive_seed(seed, 0, 1));
      const SplitScheme sch = make_scheme(c.n, c.n_t, c.V, rng);
      const RescaledProcesses rp = rescaled_processes(s, sch, model.seq, sc, j_lo, j_hi);
      for (std::size_t i = 0; i < knots.size(); ++i) {
        sink.add(c, r, stat_name("ho", cfg.alphas[i]), rp.ho[0].at(knots[i]), seed);
        sink.add(c, r, stat_name("cv", cfg.alphas[i]), rp.cv.at(knots[i]), seed);
      }
    });
    std::vector<ExperimentRecord> all;
    for (Index r = 0; r < cfg.replicates; ++r) all.insert(all.end(), sink.replicate(r).begin(), sink.replicate(r).end());
    for (double a : cfg.alphas) {
      const double vh = var_of(column(all, stat_name("ho", a)));
      const double vc = var_of(column(all, stat_name("cv", a)));
      sink.add(c, -1, stat_name("var_ratio", a), vc / vh, cfg.base_seed);
    }
    sink.add(c, -1, "delta", static_cast<double>(sc.delta), cfg.base_seed);
    sink.flush_into(out);
  }
  return out;
}

std::vector<ExperimentRecord> cov_match(const ExperimentConfig& cfg, Index workers) {
  const DensityModel model = make_density_model(make_family(cfg.family));
  std::vector<ExperimentRecord> out;
  for (const Cell& c : cells(cfg, false)) {
    const ScalingSummary sc = checked_scaling(model.seq, c);
    const GridFunction f = risk_shape(model.seq, sc, cfg.x_max);
    const GridFunction g = build_gn(model, sc, f, cfg.eps, cfg.gn_mode).g.values;
    const Window w = window(f, cfg.x);
    const Eigen::MatrixXd K = K_of_g(g, w.j_a, w.j_b).values;
    const Index k_hi = sc.k_star + w.j_b;
    RecordSink sink(cfg, cfg.replicates);
    parallel_for(cfg.replicates, workers, [&](Index r) {
      const std::uint64_t seed = derive_seed(c.seed, r);
      // Only the training half enters the conditional covariance.
      const Sample s = draw_sample(model, c.n_t, seed);
      const Eigen::VectorXd th = empirical_coeffs(s, k_hi).theta_hat;
      const Eigen::MatrixXd C = cond_cov_Z_matrix(th, model.seq, sc, w.j_a, w.j_b);
      sink.add(c, r, "sup_diff", same_sign_sup(C, K, w.j_a), seed);
      const Index ks = sc.k_star;
      const double u_right = u_statistic(th, model.seq, ks, k_hi, ks, k_hi) -
                             u_statistic_leading(model.seq, sc.n_t, ks, k_hi, ks, k_hi);
      const Index kl = ks + w.j_a;
      const double u_cross = u_statistic(th, model.seq, kl, ks, ks, k_hi) -
                             u_statistic_leading(model.seq, sc.n_t, kl, ks, ks, k_hi);
      sink.add(c, r, "u_gap_right", u_right / sc.E_script, seed);
      sink.add(c, r, "u_gap_cross", u_cross / sc.E_script, seed);
    });
    std::vector<double> sup, ur, uc;
    for (Index r = 0; r < cfg.replicates; ++r) {
      sup.push_back(sink.replicate(r)[0].value);
      ur.push_back(sink.replicate(r)[1].value);
      uc.push_back(sink.replicate(r)[2].value);
    }
    sink.add(c, -1, "sup_diff_mean", mean_of(sup), cfg.base_seed);
    sink.add(c, -1, "u_gap_right_mean", mean_of(ur), cfg.base_seed);
    sink.add(c, -1, "u_gap_cross_mean", mean_of(uc), cfg.base_seed);
    sink.add(c, -1, "delta", static_cast<double>(sc.delta), cfg.base_seed);
    sink.flush_into(out);
  }
  return out;
}

std::vector<ExperimentRecord> excess_risk_shape(const ExperimentConfig& cfg, Index workers) {
  const DensityModel model = make_density_model(make_family(cfg.family));
  std::vector<ExperimentRecord> out;
  for (const Cell& c : cells(cfg, false)) {
    const ScalingSummary sc = checked_scaling(model.seq, c);
    const GridFunction f = risk_shape(model.seq, sc, cfg.x_max);
    const Window w = window(f, cfg.x);
    RecordSink sink(cfg, cfg.replicates);
    parallel_for(cfg.replicates, workers, [&](Index r) {
      const std::uint64_t seed = derive_seed(c.seed, r);
      const Sample s = draw_sample(model, c.n_t, seed);
      const Eigen::VectorXd th = empirical_coeffs(s, sc.k_star + w.j_b).theta_hat;
      const GridFunction L = loss_process(th, model.seq, sc, w.j_a, w.j_b);
      double sup = 0.0;
      for (Index j = w.j_a; j <= w.j_b; ++j) sup = std::max(sup, std::abs(L.at(j) - f.at(j)));
      sink.add(c, r, "sup_L_minus_f", sup, seed);
    });
    std::vector<double> sup;
    for (Index r = 0; r < cfg.replicates; ++r) sup.push_back(sink.replicate(r)[0].value);
    sink.add(c, -1, "sup_L_minus_f_median", median_of(sup), cfg.base_seed);
    sink.add(c, -1, "delta", static_cast<double>(sc.delta), cfg.base_seed);
    sink.flush_into(out);
  }
  return out;
}

std::vector<ExperimentRecord> argmin_law(const ExperimentConfig& cfg, Index workers) {
  const DensityModel model = make_density_model(make_family(cfg.family));
  std::vector<ExperimentRecord> out;
  for (const Cell& c : cells(cfg, true)) {
    const ScalingSummary sc = checked_scaling(model.seq, c);
    const GridFunction f = risk_shape(model.seq, sc, cfg.x_max);
    const GridFunction g = build_gn(model, sc, f, cfg.eps, cfg.gn_mode).g.values;
    const Index k_max = sc.k_star + f.j_max();
    const double delta = static_cast<double>(sc.delta);
    RecordSink sink(cfg, cfg.replicates);
    parallel_for(cfg.replicates, workers, [&](Index r) {
      const std::uint64_t seed = derive_seed(c.seed, r);
      const Sample s = draw_sample(model, c.n, seed);
      Rng rng(derive_seed(seed, 0, 1));
      const SplitScheme sch = make_scheme(c.n, c.n_t, c.V, rng);
      const Selection sel = select_k(cv_curve(s, sch, k_max));
      sink.add(c, r, "khat_scaled", static_cast<double>(sel.k - sc.k_star) / delta, seed);
      sink.add(c, r, "khat_boundary", sel.boundary_hit ? 1.0 : 0.0, seed);
      Rng prng(derive_seed(seed, 0, 2));
      const GridFunction proc = approx_process(f, simulate_path(g, c.V, prng, seed));
      sink.add(c, r, "sim_argmin", f.alpha(proc.argmin(proc.j_min(), proc.j_max())), seed);
    });
    std::vector<ExperimentRecord> all;
    for (Index r = 0; r < cfg.replicates; ++r) all.insert(all.end(), sink.replicate(r).begin(), sink.replicate(r).end());
    const auto emp = column(all, "khat_scaled"), sim = column(all, "sim_argmin");
    sink.add(c, -1, "ks", ks_statistic(emp, sim), cfg.base_seed);
    // histogram on bins of width 1/2 over [-3, 3], outer bins open
    const int nb = 12;
    std::vector<double> he(nb, 0.0), hs(nb, 0.0);
    auto bin = [&](double a) { return std::clamp(static_cast<int>(std::floor((a + 3.0) * 2.0)), 0, nb - 1); };
    for (double a : emp) he[bin(a)] += 1.0 / static_cast<double>(emp.size());
    for (double a : sim) hs[bin(a)] += 1.0 / static_cast<double>(sim.size());
    for (int b = 0; b < nb; ++b) {
      const double left = -3.0 + 0.5 * b;
      sink.add(c, -1, stat_name("hist_emp", left), he[b], cfg.base_seed);
      sink.add(c, -1, stat_name("hist_sim", left), hs[b], cfg.base_seed);
    }
    sink.add(c, -1, "delta", delta, cfg.base_seed);
    sink.flush_into(out);
  }
  return out;
}

std::vector<ExperimentRecord> lemma_sweep(const ExperimentConfig& cfg, Index workers) {
  std::vector<std::vector<ExperimentRecord>> per(cfg.replicates);
  parallel_for(cfg.replicates, workers, [&](Index r) {
    const std::uint64_t seed = derive_seed(cfg.base_seed, r);
    Rng rng(seed);
    const AdmissibleConfig ac = random_admissible(rng);
    const LemmaReport rep = lemma_report(ac, cfg.eps, cfg.gn_mode);
    auto add = [&](const std::string& stat, double v) {
      per[r].push_back({cfg.experiment, ac.family.to_string(), ac.n, ac.n_t, 1, r, stat, v, seed});
    };
    add("x", ac.x);
    add("checks", static_cast<double>(rep.checks));
    add("violations", static_cast<double>(rep.violations.size()));
    add("v_scaling_chain", static_cast<double>(rep.odgs));
    add("v_f_n", static_cast<double>(rep.fn));
    add("v_window", static_cast<double>(rep.window));
    add("v_g_n", static_cast<double>(rep.gn));
    add("corrected_checks", static_cast<double>(rep.corrected_checks));
    add("corrected_violations", static_cast<double>(rep.corrected_violations.size()));
  });
  std::vector<ExperimentRecord> out;
  double total = 0.0;
  for (auto& v : per) {
    total += v[2].value;
    out.insert(out.end(), v.begin(), v.end());
  }
  out.push_back({cfg.experiment, "random", 0, 0, 1, -1, "violations_total", total, cfg.base_seed});
  return out;
}

std::vector<ExperimentRecord> coupling_check(const ExperimentConfig& cfg, Index workers) {
  const Index draws = 20000, projections = 3;
  std::vector<std::vector<ExperimentRecord>> per(cfg.replicates);
  parallel_for(cfg.replicates, workers, [&](Index r) {
    const std::uint64_t seed = derive_seed(cfg.base_seed, r);
    Rng rng(seed);
    const Index d = std::uniform_int_distribution<Index>(1, 50)(rng);
    CovKernel KX, KY;
    KX.points = KY.points = Eigen::VectorXd::LinSpaced(d, 0.0, 1.0);
    KX.values = random_psd(d, rng);
    KY.values = random_psd(d, rng);
    const GaussianCoupling cp = make_coupling(KX, KY);
    std::normal_distribution<double> gauss;
    std::vector<Eigen::VectorXd> u;
    for (int m = 0; m < 2 * projections; ++m) {
      Eigen::VectorXd v(d);
      for (Index i = 0; i < d; ++i) v[i] = gauss(rng);
      u.push_back(v.normalized());
    }
    std::vector<double> proj_sq(u.size(), 0.0);
    double sum = 0.0, sum_sq = 0.0;
    Eigen::VectorXd x, y;
    for (Index t = 0; t < draws; ++t) {
      cp.draw(rng, x, y);
      const double dist = (x - y).squaredNorm();
      sum += dist;
      sum_sq += dist * dist;
      for (int m = 0; m < projections; ++m) {
        proj_sq[m] += std::pow(u[m].dot(x), 2);
        proj_sq[projections + m] += std::pow(u[projections + m].dot(y), 2);
      }
    }
    const double R = static_cast<double>(draws);
    const double mc = sum / R;
    const double se = std::sqrt(std::max(0.0, sum_sq / R - mc * mc) / (R - 1.0));
    double marg_z = 0.0;
    for (int m = 0; m < 2 * projections; ++m) {
      const Eigen::MatrixXd& K = m < projections ? KX.values : KY.values;
      const double target = u[m].dot(K * u[m]);
      const double sigma = target * std::sqrt(2.0 / R);
      if (sigma > 0.0) marg_z = std::max(marg_z, std::abs(proj_sq[m] / R - target) / sigma);
    }
    const double exact_err = std::max((cp.A * cp.A.transpose() - KX.values).cwiseAbs().maxCoeff(),
                                      (cp.B * cp.B.transpose() - KY.values).cwiseAbs().maxCoeff());
    auto add = [&](const std::string& stat, double v) {
      per[r].push_back({cfg.experiment, "random_psd", d, 0, 1, r, stat, v, seed});
    };
    add("w2_trace", cp.w2_sq);
    add("w2_mc", mc);
    add("w2_se", se);
    add("w2_z", se > 0.0 ? (mc - cp.w2_sq) / se : (std::abs(mc - cp.w2_sq) < 1e-9 ? 0.0 : INFINITY));
    add("marginal_z_max", marg_z);
    add("marginal_exact_err", exact_err);
  });
  std::vector<ExperimentRecord> out;
  for (auto& v : per) out.insert(out.end(), v.begin(), v.end());
  return out;
}

}  // namespace experiments

}  // namespace cvasym
