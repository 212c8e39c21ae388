#include "cvasym/oracle_scaling.hpp"

#include <cmath>
#include <limits>

#include "cvasym/errors.hpp"

namespace cvasym {

namespace {

constexpr Index kExtentCap = Index{1} << 26;

bool leq_tol(double a, double b) { return geq_tol(b, a); }

}  // namespace

Index k_star(const CoefficientSequence& seq, double n) {
  if (!(n >= 1.0)) throw ParameterError("k_star: need n >= 1");
  const double thr = 1.0 / n;
  const Index J = seq.head_last();
  Index best = 0;
  for (Index j = 1; j <= J; ++j)
    if (geq_tol(seq.theta_sq(j), thr)) best = j;

  const TailRule& t = seq.tail();
  if (t.kind == TailKind::zero || t.scale == 0.0) return best;
  const double a2 = t.scale * t.scale;
  double bound = 0.0;
  if (t.kind == TailKind::geometric)
    bound = std::log(thr / a2) / (2.0 * std::log(t.param));
  else
    bound = std::pow(a2 / thr, 1.0 / (2.0 * t.param));
  if (!(bound < 1e15)) throw ParameterError("k_star: index overflow");
  Index kt = std::max(J + 1, static_cast<Index>(std::floor(bound)));
  while (geq_tol(seq.theta_sq(kt + 1), thr)) ++kt;
  while (kt > J && !geq_tol(seq.theta_sq(kt), thr)) --kt;
  return kt > J ? std::max(best, kt) : best;
}

OracleRisk oracle_risk(const CoefficientSequence& seq, double n) {
  if (!(n >= 1.0)) throw ParameterError("oracle_risk: need n >= 1");
  OracleRisk best{seq.tail_sq_sum(0), 0};
  for (Index k = 1;; ++k) {
    const double pen = static_cast<double>(k) / n;
    if (pen > best.value * (1.0 + 1e-12)) break;
    const double v = seq.tail_sq_sum(k) + pen;
    if (v < best.value * (1.0 - 1e-12)) {
      best = {v, k};
    } else if (leq_tol(v, best.value)) {
      best.k = k;
      best.value = std::min(best.value, v);
    }
  }
  return best;
}

ScalingSummary scaling(const CoefficientSequence& seq, Index n, Index n_t, bool assert_chain) {
  if (n_t < 1 || n_t > n - 1) throw ParameterError("scaling: need 1 <= n_t <= n - 1");
  ScalingSummary sc;
  sc.n = n;
  sc.n_t = n_t;
  sc.n_v = n - n_t;
  sc.canonical = seq.monotone_sq();
  const double nt = static_cast<double>(n_t), nv = static_cast<double>(sc.n_v);
  sc.k_star = k_star(seq, nt);
  sc.oracle_risk = oracle_risk(seq, nt).value;
  const Index ks = sc.k_star;
  const double c = std::sqrt(nt / nv);

  // Beyond the explicit head the tail is non-increasing while the bracket
  // increases in l, so the first failure with a positive bracket is final.
  const Index free_until = std::max(static_cast<Index>(std::ceil(nt / nv)), seq.head_last() - ks);
  for (Index l = 1;; ++l) {
    const double bracket = (1.0 - c / std::sqrt(static_cast<double>(l))) / nt;
    if (geq_tol(seq.theta_sq(ks + l), bracket)) {
      sc.delta_d = l;
    } else if (l > free_until && bracket > 0.0) {
      break;
    }
  }
  for (Index l = 1; l <= ks; ++l) {
    const double bracket = (1.0 + c / std::sqrt(static_cast<double>(l))) / nt;
    if (geq_tol(seq.theta_sq(ks - l), bracket)) {
      sc.delta_g = l;
      break;
    }
  }
  sc.delta = std::max(sc.delta_d, sc.delta_g);
  sc.degenerate = sc.delta_d == 0 || sc.delta_g == 0;
  sc.E_script = static_cast<double>(sc.delta) / nt;
  sc.e_frak = std::sqrt(sc.E_script / nv);

  if (assert_chain && sc.canonical && !sc.degenerate) {
    const auto bad = scaling_chain_violations(sc);
    if (!bad.empty()) throw ConstructionError("scaling: " + bad.front());
  }
  return sc;
}

std::vector<std::string> scaling_chain_violations(const ScalingSummary& sc) {
  std::vector<std::string> out;
  const double nv = static_cast<double>(sc.n_v);
  if (sc.delta * sc.n_v < sc.n_t) out.push_back("Delta >= n_t/n_v violated");
  if (!geq_tol(sc.E_script, 1.0 / nv)) out.push_back("E >= 1/n_v violated");
  if (!geq_tol(sc.e_frak, 1.0 / nv)) out.push_back("e >= 1/n_v violated");
  if (!leq_tol(sc.e_frak, sc.E_script)) out.push_back("e <= E violated");
  if (!leq_tol(sc.E_script, 2.0 * sc.oracle_risk + 1.0 / nv))
    out.push_back("E <= 2 or(n_t) + 1/n_v violated");
  return out;
}

GridFunction risk_shape(const CoefficientSequence& seq, const ScalingSummary& sc,
                        Index j_lo, Index j_hi) {
  if (j_lo < -sc.k_star || j_lo > 0 || j_hi < 0)
    throw ParameterError("risk_shape: need -k* <= j_lo <= 0 <= j_hi");
  if (!(sc.e_frak > 0.0)) throw ConstructionError("risk_shape: degenerate scaling (e = 0)");
  const double inv_nt = 1.0 / static_cast<double>(sc.n_t);
  GridFunction f = GridFunction::zeros(j_lo, j_hi, static_cast<double>(sc.delta));
  double acc = 0.0;
  for (Index j = 1; j <= j_hi; ++j) {
    acc += inv_nt - seq.theta_sq(sc.k_star + j);
    f.at(j) = acc / sc.e_frak;
  }
  acc = 0.0;
  for (Index j = -1; j >= j_lo; --j) {
    acc += seq.theta_sq(sc.k_star + j + 1) - inv_nt;
    f.at(j) = acc / sc.e_frak;
  }
  return f;
}

double f_n_abs(const CoefficientSequence& seq, const ScalingSummary& sc, Index j) {
  if (j < -sc.k_star) throw ParameterError("f_n: j below -k*");
  const double inv_nt = 1.0 / static_cast<double>(sc.n_t);
  const Index lo = std::min(sc.k_star, sc.k_star + j), hi = std::max(sc.k_star, sc.k_star + j);
  double acc = 0.0;
  for (Index i = lo + 1; i <= hi; ++i) acc += std::abs(seq.theta_sq(i) - inv_nt);
  return acc / sc.e_frak;
}

Index f_n_extent(const CoefficientSequence& seq, const ScalingSummary& sc, double x_max) {
  if (!(sc.e_frak > 0.0)) throw ConstructionError("f_n_extent: degenerate scaling (e = 0)");
  const double inv_nt = 1.0 / static_cast<double>(sc.n_t);
  double acc = 0.0;
  for (Index j = 1; j < kExtentCap; ++j) {
    acc += inv_nt - seq.theta_sq(sc.k_star + j);
    if (acc / sc.e_frak > x_max) return j + 2 * sc.delta;
  }
  throw ConstructionError("f_n_extent: f_n does not exceed x_max on a bounded grid");
}

GridFunction risk_shape(const CoefficientSequence& seq, const ScalingSummary& sc, double x_max) {
  return risk_shape(seq, sc, -sc.k_star, f_n_extent(seq, sc, x_max));
}

Window window(const GridFunction& f_n, double x) {
  if (!(x > 0.0)) throw ParameterError("window: need x > 0");
  if (!f_n.contains(0)) throw DomainError("window: grid does not contain 0");
  Window w;
  w.x = x;
  for (Index j = f_n.j_min(); j <= 0; ++j) {
    if (f_n.at(j) <= x) {
      w.j_a = j;
      break;
    }
  }
  for (Index j = f_n.j_max(); j >= 0; --j) {
    if (f_n.at(j) <= x) {
      if (j == f_n.j_max() && j > 0) throw DomainError("window: grid too short for level x");
      w.j_b = j;
      break;
    }
  }
  w.a = f_n.alpha(w.j_a);
  w.b = f_n.alpha(w.j_b);
  return w;
}

HypothesisReport check_hypotheses(const CoefficientSequence& seq, const HypothesisConstants& c,
                                  Index k_check_max, std::optional<Index> n,
                                  std::optional<Index> n_t) {
  if (c.c1 < 0 || c.d1 < 0 || c.c2 < 0 || c.d2 < 0)
    throw ParameterError("check_hypotheses: c1, d1, c2, d2 must be >= 0");
  if (!(c.c3 > 0 && c.d3 > 0 && c.d4 > 0 && c.d5 > 0))
    throw ParameterError("check_hypotheses: c3, d3, d4, d5 must be > 0");
  if (k_check_max < 2) throw ParameterError("check_hypotheses: need k_check_max >= 2");
  HypothesisReport rep;
  rep.constants = c;
  auto fail = [](HypothesisRecord& r, Index k) {
    if (r.holds) r.first_violation = k;
    r.holds = false;
  };
  for (int h = 0; h < 3; ++h) rep.hyp[h].checked = true;
  for (Index k = 1; k <= k_check_max; ++k) {
    const double kd = static_cast<double>(k);
    const double tail = seq.tail_sq_sum(k);
    if (!leq_tol(tail, c.c1 / std::pow(kd, 2.0 + c.d1))) fail(rep.hyp[0], k);
    if (!geq_tol(tail, c.c2 / std::pow(kd, c.d2))) fail(rep.hyp[1], k);
    const Index m = static_cast<Index>(std::floor(std::pow(kd, c.d3)));
    if (!geq_tol(seq.theta_sq(k + m), c.c3 * seq.theta_sq(std::max<Index>(1, k - m))))
      fail(rep.hyp[2], k);
  }
  if (n && n_t) {
    const double nd = static_cast<double>(*n);
    const double nv = static_cast<double>(*n - *n_t);
    rep.hyp[3].checked = rep.hyp[4].checked = true;
    if (nv > std::pow(nd, 1.0 - c.d4)) fail(rep.hyp[3], *n_t);
    if (nv < std::pow(nd, 2.0 / 3.0 + c.d5)) fail(rep.hyp[4], *n_t);
  }
  return rep;
}

NtWindow nt_window(Index n, double d4, double d5) {
  if (n < 2 || !(d4 > 0) || !(d5 > 0)) throw ParameterError("nt_window: need n >= 2, d4 > 0, d5 > 0");
  const double nd = static_cast<double>(n);
  const double lo = std::pow(nd, 2.0 / 3.0 + d5);
  const double hi = std::pow(nd, 1.0 - d4);
  // guard exact powers against last-bit rounding
  return {static_cast<Index>(std::ceil(lo * (1.0 - 1e-13))),
          static_cast<Index>(std::floor(hi * (1.0 + 1e-13)))};
}

}  // namespace cvasym
