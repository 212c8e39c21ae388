#include "cvasym/monotone.hpp"

#include <algorithm>
#include <cmath>

#include "cvasym/errors.hpp"

namespace cvasym {

namespace {

void check_inputs(const Eigen::Ref<const Eigen::VectorXd>& t, const Eigen::Ref<const Eigen::VectorXd>& g0,
                  const Eigen::Ref<const Eigen::VectorXd>& h, const Eigen::Ref<const Eigen::VectorXd>& eps) {
  const Index m = t.size();
  if (m < 1 || g0.size() != m || h.size() != m || eps.size() != m)
    throw ParameterError("monotone_correct: inputs must share one non-empty grid");
  for (Index q = 0; q + 1 < m; ++q) {
    if (!(t[q + 1] > t[q])) throw ParameterError("monotone_correct: grid not increasing");
    if (eps[q + 1] < eps[q]) throw ParameterError("monotone_correct: eps must be non-decreasing");
  }
  if (!(eps[0] > 0.0)) throw ParameterError("monotone_correct: eps(0) must be positive");
}

// -eps(t) <= g0(t) - g0(s) <= max(h(t) - h(s), eps(t)) for knots s < t.
double hypothesis_excess(const Eigen::Ref<const Eigen::VectorXd>& g0, const Eigen::Ref<const Eigen::VectorXd>& h,
                         const Eigen::Ref<const Eigen::VectorXd>& eps) {
  double worst = 0.0;
  const Index m = g0.size();
  for (Index b = 1; b < m; ++b) {
    for (Index a = 0; a < b; ++a) {
      const double d = g0[b] - g0[a];
      worst = std::max(worst, -eps[b] - d);
      worst = std::max(worst, d - std::max(h[b] - h[a], eps[b]));
    }
  }
  return worst;
}

void finish(MonotoneResult& r, const Eigen::Ref<const Eigen::VectorXd>& g0,
            const Eigen::Ref<const Eigen::VectorXd>& h, const Eigen::Ref<const Eigen::VectorXd>& eps) {
  const Index m = g0.size();
  const Eigen::VectorXd& g = r.values;
  for (Index q = 0; q < m; ++q) r.bound_ratio = std::max(r.bound_ratio, std::abs(g[q] - g0[q]) / eps[q]);
  r.bound_ok = r.bound_ratio <= 6.0 * (1.0 + 1e-12);
  for (Index q = 0; q + 1 < m; ++q) {
    const double dg = g[q + 1] - g[q], dh = h[q + 1] - h[q];
    const double tol = 1e-12 * (1.0 + std::abs(g[q + 1]) + std::abs(h[q + 1]));
    if (dg < -tol || dg > dh + tol) r.increments_ok = false;
  }
}

}  // namespace

MonotoneResult monotone_correct(const Eigen::Ref<const Eigen::VectorXd>& t,
                                const Eigen::Ref<const Eigen::VectorXd>& g0,
                                const Eigen::Ref<const Eigen::VectorXd>& h,
                                const Eigen::Ref<const Eigen::VectorXd>& eps) {
  check_inputs(t, g0, h, eps);
  const Index m = t.size();
  MonotoneResult r;
  r.hypothesis_excess = hypothesis_excess(g0, h, eps);
  r.hypothesis_held = r.hypothesis_excess <= 1e-12 * (1.0 + g0.cwiseAbs().maxCoeff());
  r.values.resize(m);
  r.values[0] = g0[0];

  auto lerp = [](const Eigen::Ref<const Eigen::VectorXd>& v, Index k, double w) {
    return w == 0.0 ? v[k] : v[k] + w * (v[k + 1] - v[k]);
  };
  // Current breakpoint x_i sits at fraction w of segment [t_k, t_{k+1}].
  Index k = 0;
  double w = 0.0;
  double G = g0[0];
  while (k < m - 1) {
    const double g0_x = lerp(g0, k, w), e_x = lerp(eps, k, w), h_x = lerp(h, k, w);
    const double target_g = g0_x + 2.0 * e_x, target_e = 1.5 * e_x;
    Index seg = -1;
    double u = 1.0;
    bool flat = false;
    for (Index s = k; s < m - 1 && seg < 0; ++s) {
      const double ws = s == k ? w : 0.0;
      auto solve = [&](const Eigen::Ref<const Eigen::VectorXd>& v, double target) {
        const double a = lerp(v, s, ws);
        if (a >= target) return ws;
        if (v[s + 1] < target) return 2.0;
        const double frac = (target - v[s]) / (v[s + 1] - v[s]);
        return std::clamp(frac, ws, 1.0);
      };
      const double ug = solve(g0, target_g), ue = solve(eps, target_e);
      if (std::min(ug, ue) <= 1.0) {
        seg = s;
        u = std::min(ug, ue);
        flat = ue <= ug;  // eps grew by 3/2 first: g stays flat
      }
    }
    if (seg < 0) {
      // no trigger before the end of the grid: g stays flat
      for (Index q = k + 1; q < m; ++q) r.values[q] = G;
      break;
    }
    const double x_next = t[seg] + u * (t[seg + 1] - t[seg]);
    r.breakpoints.push_back(x_next);
    double ratio = 0.0;
    if (!flat) {
      const double num = lerp(g0, seg, u) - g0_x;
      const double den = lerp(h, seg, u) - h_x;
      ratio = den > 0.0 ? num / den : (num > 0.0 ? 2.0 : 0.0);
      if (ratio < 0.0 || ratio > 1.0) {
        r.clamped = true;
        ratio = std::clamp(ratio, 0.0, 1.0);
      }
    }
    const Index last = u >= 1.0 ? seg + 1 : seg;
    for (Index q = k + 1; q <= last; ++q) r.values[q] = flat ? G : G + ratio * (h[q] - h_x);
    G = flat ? G : G + ratio * (lerp(h, seg, u) - h_x);
    if (u >= 1.0) {
      k = seg + 1;
      w = 0.0;
    } else {
      k = seg;
      w = u;
    }
  }
  finish(r, g0, h, eps);
  return r;
}

MonotoneResult isotonic_correct(const Eigen::Ref<const Eigen::VectorXd>& t,
                                const Eigen::Ref<const Eigen::VectorXd>& g0,
                                const Eigen::Ref<const Eigen::VectorXd>& h,
                                const Eigen::Ref<const Eigen::VectorXd>& eps) {
  check_inputs(t, g0, h, eps);
  const Index m = t.size();
  MonotoneResult r;
  r.hypothesis_excess = hypothesis_excess(g0, h, eps);
  r.hypothesis_held = r.hypothesis_excess <= 1e-12 * (1.0 + g0.cwiseAbs().maxCoeff());

  // pool adjacent violators, unit weights
  std::vector<double> level;
  std::vector<Index> count;
  for (Index q = 0; q < m; ++q) {
    level.push_back(g0[q]);
    count.push_back(1);
    while (level.size() > 1 && level[level.size() - 2] > level.back()) {
      const double c1 = static_cast<double>(count[count.size() - 2]), c2 = static_cast<double>(count.back());
      const double merged = (level[level.size() - 2] * c1 + level.back() * c2) / (c1 + c2);
      count[count.size() - 2] += count.back();
      level.pop_back();
      count.pop_back();
      level.back() = merged;
    }
  }
  Eigen::VectorXd iso(m);
  Index q = 0;
  for (std::size_t b = 0; b < level.size(); ++b)
    for (Index c = 0; c < count[b]; ++c) iso[q++] = level[b];

  r.values.resize(m);
  r.values[0] = g0[0];
  for (Index p = 0; p + 1 < m; ++p) {
    const double room = std::max(0.0, h[p + 1] - h[p]);
    const double step = iso[p + 1] - iso[p];
    if (step > room) r.clamped = true;
    r.values[p + 1] = r.values[p] + std::clamp(step, 0.0, room);
  }
  finish(r, g0, h, eps);
  return r;
}

}  // namespace cvasym
