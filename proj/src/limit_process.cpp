#include "cvasym/limit_process.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "cvasym/errors.hpp"

namespace cvasym {

namespace {

constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

double sgn(Index j) { return j > 0 ? 1.0 : (j < 0 ? -1.0 : 0.0); }

// Block of indices (lo, hi] attached to knot j.
void block(const ScalingSummary& sc, Index j, Index& lo, Index& hi) {
  lo = sc.k_star + std::min<Index>(j, 0);
  hi = sc.k_star + std::max<Index>(j, 0);
}

double scale_4(const ScalingSummary& sc) {
  return 4.0 / (static_cast<double>(sc.n_v) * sc.e_frak * sc.e_frak);
}

bool le_tol(double a, double b) { return a <= b + 1e-9 * (1.0 + std::abs(a) + std::abs(b)); }

}  // namespace

TimeChange g1_from_theta(const CoefficientSequence& seq, const ScalingSummary& sc, Index j_lo, Index j_hi) {
  if (j_lo < -sc.k_star || j_lo > 0 || j_hi < 0)
    throw ParameterError("g1_from_theta: need -k* <= j_lo <= 0 <= j_hi");
  if (!(sc.e_frak > 0.0)) throw ConstructionError("g1_from_theta: degenerate scaling");
  const Index ks = sc.k_star;
  const Eigen::VectorXd th = seq.theta_range(0, ks + j_hi);
  const double c4 = scale_4(sc);
  GridFunction g = GridFunction::zeros(j_lo, j_hi, static_cast<double>(sc.delta));
  // Grow the block one index at a time; Q is the quadratic form over it.
  double Q = 0.0;
  for (Index j = 1; j <= j_hi; ++j) {
    const Index m = ks + j;
    double cross = 0.0;
    for (Index i = ks + 1; i < m; ++i) cross += th[i] * th[m - i];
    Q += th[m] * th[m] + 2.0 * th[m] * cross * kInvSqrt2;
    g.at(j) = c4 * Q;
  }
  Q = 0.0;
  for (Index j = -1; j >= j_lo; --j) {
    const Index m = ks + j + 1;
    double cross = 0.0;
    for (Index i = m + 1; i <= ks; ++i) cross += th[i] * th[i - m];
    Q += th[m] * th[m] + 2.0 * th[m] * cross * kInvSqrt2;
    g.at(j) = -c4 * Q;
  }
  return {g, GnStage::g1};
}

double EpsSpec::value(Index n) const {
  if (!(c > 0.0)) throw ParameterError("EpsSpec: c must be positive");
  return c * std::pow(static_cast<double>(n), -u);
}

GnBuild build_gn(const DensityModel& model, const ScalingSummary& sc, const GridFunction& f_n,
                 EpsSpec eps_spec, GnMode mode) {
  const Index j_lo = f_n.j_min(), j_hi = f_n.j_max();
  const double delta = static_cast<double>(sc.delta);
  if (f_n.delta() != delta) throw ParameterError("build_gn: f_n grid does not match scaling");
  GnBuild out;
  out.g1 = g1_from_theta(model.seq, sc, j_lo, j_hi);
  out.eps = eps_spec.value(sc.n);
  const double s_inf = model.sup_norm, s_l2 = model.l2_norm_sq;
  const double lip = 8.0 * s_inf / (static_cast<double>(sc.n_v) * sc.e_frak);

  auto correct = [&](const Eigen::VectorXd& t, const Eigen::VectorXd& g0, const Eigen::VectorXd& h) {
    const Eigen::VectorXd e = Eigen::VectorXd::Constant(t.size(), out.eps);
    return mode == GnMode::lemma ? monotone_correct(t, g0, h, e) : isotonic_correct(t, g0, h, e);
  };

  // right half: alpha = q / Delta, q = 0..j_hi
  {
    const Index m = j_hi + 1;
    Eigen::VectorXd t(m), g0(m), h(m);
    for (Index q = 0; q < m; ++q) {
      t[q] = static_cast<double>(q) / delta;
      g0[q] = out.g1.values.at(q);
      h[q] = -lip * f_n.at(q) + 8.0 * s_inf * t[q];
    }
    out.right = correct(t, g0, h);
  }
  // left half mirrored: beta = q / Delta stands for alpha = -beta
  {
    const Index m = -j_lo + 1;
    Eigen::VectorXd t(m), g0(m), h(m);
    for (Index q = 0; q < m; ++q) {
      t[q] = static_cast<double>(q) / delta;
      g0[q] = -out.g1.values.at(-q);
      h[q] = lip * f_n.at(-q) + 8.0 * s_inf * t[q];
    }
    out.left = correct(t, g0, h);
  }

  GridFunction g2 = GridFunction::zeros(j_lo, j_hi, delta);
  for (Index j = 1; j <= j_hi; ++j) g2.at(j) = out.right.values[j];
  for (Index j = -1; j >= j_lo; --j) g2.at(j) = -out.left.values[-j];
  g2.at(0) = 0.0;
  out.g2 = {g2, GnStage::g2};

  GridFunction g = g2;
  for (Index j = j_lo; j <= j_hi; ++j) g.at(j) += 4.0 * s_l2 * g.alpha(j);
  out.g = {g, GnStage::g};

  const auto bad = gn_violations(g, f_n, model, sc);
  if (!bad.empty()) throw ConstructionError("build_gn: " + bad.front());
  return out;
}

std::vector<std::string> gn_violations(const GridFunction& g, const GridFunction& f_n,
                                       const DensityModel& model, const ScalingSummary& sc) {
  std::vector<std::string> bad;
  const double s_inf = model.sup_norm, s_l2 = model.l2_norm_sq;
  const double lip = 8.0 * s_inf / (static_cast<double>(sc.n_v) * sc.e_frak);
  const double step = 1.0 / g.delta();
  if (g.at(0) != 0.0) bad.push_back("g(0) = 0 violated");
  for (Index j = g.j_min(); j < g.j_max(); ++j) {
    const double dg = g.at(j + 1) - g.at(j);
    if (!le_tol(4.0 * s_l2 * step, dg))
      bad.push_back("lower increment bound violated at j=" + std::to_string(j));
    const double upper = -lip * (f_n.at(j + 1) - f_n.at(j)) + (8.0 * s_inf + 4.0 * s_l2) * step;
    if (!le_tol(dg, upper)) bad.push_back("upper increment bound violated at j=" + std::to_string(j));
  }
  for (Index j = g.j_min(); j <= g.j_max(); ++j)
    if (!le_tol(std::abs(g.at(j)), 20.0 * s_inf * f_n.at(j) + 12.0 * s_inf))
      bad.push_back("|g| <= 20|s|_inf f + 12|s|_inf violated at j=" + std::to_string(j));
  return bad;
}

double K_value(double gs, double gt, double s, double t) {
  if (s >= 0.0 && t >= 0.0) return s <= t ? gs : gt;
  if (s <= 0.0 && t <= 0.0) return s >= t ? -gs : -gt;
  return 0.0;
}

CovKernel K_of_g(const GridFunction& g, Index j_lo, Index j_hi) {
  if (!g.contains(j_lo) || !g.contains(j_hi) || j_hi < j_lo) throw DomainError("K_of_g: range outside grid");
  if (!g.contains(0) || g.at(0) != 0.0) throw ParameterError("K_of_g: need g(0) = 0");
  for (Index j = g.j_min(); j < g.j_max(); ++j)
    if (g.at(j + 1) < g.at(j)) throw ParameterError("K_of_g: g is not non-decreasing");
  const Index m = j_hi - j_lo + 1;
  CovKernel K;
  K.source = KernelSource::K_of_g;
  K.points.resize(m);
  K.values.resize(m, m);
  for (Index a = 0; a < m; ++a) K.points[a] = g.alpha(j_lo + a);
  for (Index a = 0; a < m; ++a)
    for (Index b = 0; b < m; ++b)
      K.values(a, b) = K_value(g.at(j_lo + a), g.at(j_lo + b), K.points[a], K.points[b]);
  return K;
}

GaussianPath simulate_path(const GridFunction& g, Index V, Rng& rng, std::uint64_t seed) {
  if (V < 1) throw ParameterError("simulate_path: need V >= 1");
  if (!g.contains(0)) throw DomainError("simulate_path: grid does not contain 0");
  std::normal_distribution<double> gauss;
  GridFunction w = GridFunction::zeros(g.j_min(), g.j_max(), g.delta());
  const double inv_v = 1.0 / static_cast<double>(V);
  auto step = [&](double dg) {
    if (dg < 0.0) {
      if (dg < -1e-12 * (1.0 + std::abs(g.at(g.j_max())))) throw ParameterError("simulate_path: negative increment");
      dg = 0.0;
    }
    return std::sqrt(dg * inv_v) * gauss(rng);
  };
  for (Index j = 1; j <= g.j_max(); ++j) w.at(j) = w.at(j - 1) + step(g.at(j) - g.at(j - 1));
  for (Index j = -1; j >= g.j_min(); --j) w.at(j) = w.at(j + 1) + step(g.at(j + 1) - g.at(j));
  return {w, seed, V};
}

GridFunction approx_process(const GridFunction& f_n, const GaussianPath& path) {
  const GridFunction& w = path.values;
  if (w.j_min() != f_n.j_min() || w.j_max() != f_n.j_max() || w.delta() != f_n.delta())
    throw ParameterError("approx_process: grids differ");
  return GridFunction(f_n.j_min(), f_n.delta(), f_n.values() - w.values());
}

double cond_cov_Z(const Eigen::Ref<const Eigen::VectorXd>& theta_hat, const CoefficientSequence& seq,
                  const ScalingSummary& sc, Index j1, Index j2) {
  Index lo1, hi1, lo2, hi2;
  block(sc, j1, lo1, hi1);
  block(sc, j2, lo2, hi2);
  if (lo1 < 0 || lo2 < 0 || std::max(hi1, hi2) >= theta_hat.size())
    throw ParameterError("cond_cov_Z: knot outside coefficient range");
  double acc = 0.0;
  for (Index a = lo1 + 1; a <= hi1; ++a)
    for (Index b = lo2 + 1; b <= hi2; ++b) acc += theta_hat[a] * theta_hat[b] * cov_psi(seq, a, b);
  return sgn(j1) * sgn(j2) * scale_4(sc) * acc;
}

Eigen::MatrixXd cond_cov_Z_matrix(const Eigen::Ref<const Eigen::VectorXd>& theta_hat,
                                  const CoefficientSequence& seq, const ScalingSummary& sc,
                                  Index j_lo, Index j_hi) {
  if (j_lo > 0 || j_hi < 0 || sc.k_star + j_lo < 0 || sc.k_star + j_hi >= theta_hat.size())
    throw ParameterError("cond_cov_Z_matrix: range outside coefficient range");
  // indices k* + j_lo + 1 .. k* + j_hi carry the blocks
  const Index base = sc.k_star + j_lo;
  const Index m = j_hi - j_lo;
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(m + 1, m + 1);
  if (m > 0) {
    const Eigen::MatrixXd C = cov_psi_matrix(seq, base + 1, base + m);
    const Eigen::VectorXd u = theta_hat.segment(base + 1, m);
    const Eigen::MatrixXd B = u.asDiagonal() * C * u.asDiagonal();
    for (Index a = 1; a <= m; ++a)
      for (Index b = 1; b <= m; ++b) S(a, b) = B(a - 1, b - 1) + S(a - 1, b) + S(a, b - 1) - S(a - 1, b - 1);
  }
  const Index w = j_hi - j_lo + 1;
  Eigen::MatrixXd out(w, w);
  const double c4 = scale_4(sc);
  for (Index p = 0; p < w; ++p) {
    const Index j1 = j_lo + p;
    const Index l1 = std::min<Index>(j1, 0) - j_lo, h1 = std::max<Index>(j1, 0) - j_lo;
    for (Index q = 0; q < w; ++q) {
      const Index j2 = j_lo + q;
      const Index l2 = std::min<Index>(j2, 0) - j_lo, h2 = std::max<Index>(j2, 0) - j_lo;
      const double sum = S(h1, h2) - S(l1, h2) - S(h1, l2) + S(l1, l2);
      out(p, q) = sgn(j1) * sgn(j2) * c4 * sum;
    }
  }
  return out;
}

double E_stat(const Eigen::Ref<const Eigen::VectorXd>& theta_hat, const CoefficientSequence& seq,
              Index m1, Index m2, Index m3) {
  Index m[3] = {m1, m2, m3};
  std::sort(m, m + 3);
  if (m[0] < 0 || m[2] >= theta_hat.size()) throw ParameterError("E_stat: index outside coefficient range");
  if (m[0] == m[1] || m[1] == m[2]) return 0.0;
  double acc = 0.0;
  for (Index a = m[0] + 1; a <= m[1]; ++a)
    for (Index b = m[1] + 1; b <= m[2]; ++b) acc += theta_hat[a] * theta_hat[b] * cov_psi(seq, a, b);
  return acc;
}

double u_statistic(const Eigen::Ref<const Eigen::VectorXd>& theta_hat, const CoefficientSequence& seq,
                   Index lo1, Index hi1, Index lo2, Index hi2) {
  if (lo1 < 0 || lo2 < 0 || std::max(hi1, hi2) >= theta_hat.size())
    throw ParameterError("u_statistic: index outside coefficient range");
  double acc = 0.0;
  for (Index a = lo1 + 1; a <= hi1; ++a)
    for (Index b = lo2 + 1; b <= hi2; ++b) acc += theta_hat[a] * theta_hat[b] * cov_psi(seq, a, b);
  return acc;
}

double u_statistic_leading(const CoefficientSequence& seq, Index n_t, Index lo1, Index hi1,
                           Index lo2, Index hi2) {
  const double nt = static_cast<double>(n_t);
  const Index ov_lo = std::max(lo1, lo2), ov_hi = std::min(hi1, hi2);
  double overlap = 0.0, diag_sq = 0.0;
  for (Index i = ov_lo + 1; i <= ov_hi; ++i) {
    overlap += 1.0;
    diag_sq += seq.theta_sq(i);
  }
  double triple = 0.0, sq = 0.0;
  for (Index a = lo1 + 1; a <= hi1; ++a) {
    for (Index b = lo2 + 1; b <= hi2; ++b) {
      const double tr = seq.theta(std::abs(a - b));
      triple += seq.theta(a) * seq.theta(b) * tr;
      sq += tr * tr;
    }
  }
  return 0.5 * overlap / nt + (1.0 - kInvSqrt2) * diag_sq + kInvSqrt2 * triple + sq / (2.0 * nt);
}

Eigen::VectorXd simulate_bridge(Index steps, Rng& rng) {
  if (steps < 1) throw ParameterError("simulate_bridge: need steps >= 1");
  std::normal_distribution<double> gauss;
  const double sd = std::sqrt(1.0 / static_cast<double>(steps));
  Eigen::VectorXd w(steps + 1);
  w[0] = 0.0;
  for (Index i = 1; i <= steps; ++i) w[i] = w[i - 1] + sd * gauss(rng);
  const double end = w[steps];
  for (Index i = 0; i <= steps; ++i) w[i] -= end * static_cast<double>(i) / static_cast<double>(steps);
  return w;
}

double bridge_integral(const Eigen::Ref<const Eigen::VectorXd>& f_prime,
                       const Eigen::Ref<const Eigen::VectorXd>& bridge,
                       const Eigen::Ref<const Eigen::VectorXd>& F) {
  const Index m = f_prime.size();
  if (F.size() != m) throw ParameterError("bridge_integral: f' and F on different grids");
  if (m < 1001) throw ParameterError("bridge_integral: quadrature step must be <= 1e-3");
  if (bridge.size() < 2) throw ParameterError("bridge_integral: bridge needs at least 2 points");
  const Index nb = bridge.size() - 1;
  auto B = [&](double u) {
    if (!(u >= 0.0 && u <= 1.0)) throw DomainError("bridge_integral: F outside [0, 1]");
    const double pos = u * static_cast<double>(nb);
    const Index k = std::min<Index>(static_cast<Index>(pos), nb - 1);
    const double w = pos - static_cast<double>(k);
    return (1.0 - w) * bridge[k] + w * bridge[k + 1];
  };
  const double h = 1.0 / static_cast<double>(m - 1);
  double acc = 0.0;
  for (Index i = 0; i < m; ++i) {
    const double wt = (i == 0 || i == m - 1) ? 0.5 : 1.0;
    acc += wt * f_prime[i] * B(F[i]);
  }
  return -acc * h;
}

}  // namespace cvasym
