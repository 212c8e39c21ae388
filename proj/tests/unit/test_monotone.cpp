#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "cvasym/errors.hpp"
#include "cvasym/monotone.hpp"

using namespace cvasym;

namespace {

double lin(const Eigen::VectorXd& t, const Eigen::VectorXd& v, double x) {
  const auto it = std::upper_bound(t.data(), t.data() + t.size(), x);
  Index q = std::clamp<Index>(it - t.data() - 1, 0, t.size() - 2);
  const double w = (x - t[q]) / (t[q + 1] - t[q]);
  return v[q] + w * (v[q + 1] - v[q]);
}

// The inductive construction written out directly: breakpoints located by
// bisection on the first segment whose right end triggers.
Eigen::VectorXd reference(const Eigen::VectorXd& t, const Eigen::VectorXd& g0, const Eigen::VectorXd& h,
                          const Eigen::VectorXd& eps) {
  struct Piece {
    double x0, x1, G, ratio, h0;
    bool flat;
  };
  std::vector<Piece> pieces;
  const Index m = t.size();
  double x = t[0], G = g0[0];
  while (x < t[m - 1]) {
    const double e = lin(t, eps, x), gx = lin(t, g0, x), hx = lin(t, h, x);
    auto trig = [&](double y) { return lin(t, g0, y) >= gx + 2 * e || lin(t, eps, y) >= 1.5 * e; };
    Index q = 0;
    while (q < m && (t[q] <= x || !trig(t[q]))) ++q;
    if (q == m) {
      pieces.push_back({x, t[m - 1], G, 0.0, hx, true});
      break;
    }
    double a = std::max(x, t[q - 1]), b = t[q];
    if (trig(a)) b = a;
    for (int it = 0; it < 200 && b - a > 0; ++it) {
      const double mid = 0.5 * (a + b);
      if (mid <= a || mid >= b) break;
      (trig(mid) ? b : a) = mid;
    }
    const bool flat = lin(t, eps, b) >= 1.5 * e;
    double ratio = 0.0;
    if (!flat) {
      const double num = lin(t, g0, b) - gx, den = lin(t, h, b) - hx;
      ratio = std::clamp(den > 0 ? num / den : (num > 0 ? 1.0 : 0.0), 0.0, 1.0);
    }
    pieces.push_back({x, b, G, ratio, hx, flat});
    if (!flat) G += ratio * (lin(t, h, b) - hx);
    x = b;
  }
  Eigen::VectorXd out(m);
  out[0] = g0[0];
  for (Index k = 1; k < m; ++k) {
    const Piece* p = &pieces.back();
    for (const auto& pc : pieces)
      if (t[k] > pc.x0 && t[k] <= pc.x1) {
        p = &pc;
        break;
      }
    out[k] = p->flat ? p->G : p->G + p->ratio * (h[k] - p->h0);
  }
  return out;
}

Eigen::VectorXd grid(Index m, double step) { return Eigen::VectorXd::LinSpaced(m, 0.0, step * (m - 1)); }

}  // namespace

TEST_CASE("constant g0 and constant eps: g = g0, no breakpoint") {
  const Eigen::VectorXd t = grid(20, 0.1);
  const Eigen::VectorXd g0 = Eigen::VectorXd::Constant(20, 0.7);
  const Eigen::VectorXd h = 3.0 * t;
  const MonotoneResult r = monotone_correct(t, g0, h, Eigen::VectorXd::Constant(20, 0.01));
  CHECK(r.breakpoints.empty());
  CHECK(r.values == g0);
  CHECK(r.hypothesis_held);
  CHECK(r.bound_ok);
  CHECK(r.increments_ok);
}

TEST_CASE("g0 = h increasing with huge eps") {
  const Eigen::VectorXd t = grid(30, 0.2);
  const Eigen::VectorXd h = t.array().square() + t.array();
  const Eigen::VectorXd eps = Eigen::VectorXd::Constant(30, 1e6);
  const MonotoneResult r = monotone_correct(t, h, h, eps);
  CHECK(r.bound_ratio <= 6.0);
  for (Index q = 0; q + 1 < 30; ++q) CHECK(r.values[q + 1] >= r.values[q]);
}

TEST_CASE("sawtooth input matches the reference transcription") {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int rep = 0; rep < 40; ++rep) {
    const Index m = 120;
    const Eigen::VectorXd t = grid(m, 0.05);
    const double e0 = 0.05 + 0.2 * U(gen);
    Eigen::VectorXd h(m), g0(m), eps(m);
    for (Index q = 0; q < m; ++q) {
      h[q] = 4.0 * t[q] + 0.3 * t[q] * t[q];
      // rising trend with dips smaller than eps
      g0[q] = 0.6 * h[q] - 0.4 * e0 * std::abs(std::sin(7.3 * t[q] + rep));
      eps[q] = rep % 2 ? e0 : e0 * (1.0 + 0.15 * t[q]);
    }
    const MonotoneResult r = monotone_correct(t, g0, h, eps);
    const Eigen::VectorXd ref = reference(t, g0, h, eps);
    CHECK((r.values - ref).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + ref.cwiseAbs().maxCoeff()));
    if (r.hypothesis_held) {
      CHECK(r.bound_ok);
      CHECK(r.increments_ok);
    }
  }
}

TEST_CASE("hypothesis violations are reported, not thrown") {
  const Eigen::VectorXd t = grid(10, 0.1);
  Eigen::VectorXd g0(10);
  g0 << 0, 1, 0, 1, 0, 1, 0, 1, 0, 1;
  const MonotoneResult r = monotone_correct(t, g0, t, Eigen::VectorXd::Constant(10, 0.01));
  CHECK_FALSE(r.hypothesis_held);
  CHECK(r.hypothesis_excess > 0.9);
  CHECK_THROWS_AS(monotone_correct(t, g0, t, Eigen::VectorXd::Zero(10)), ParameterError);
  Eigen::VectorXd dec = Eigen::VectorXd::Constant(10, 0.1);
  dec[5] = 0.05;
  CHECK_THROWS_AS(monotone_correct(t, g0, t, dec), ParameterError);
}

TEST_CASE("isotonic witness is non-decreasing with increments below h") {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> N;
  const Eigen::VectorXd t = grid(80, 0.1);
  Eigen::VectorXd g0(80);
  for (Index q = 0; q < 80; ++q) g0[q] = t[q] + 0.05 * N(gen);
  const Eigen::VectorXd h = 2.0 * t;
  const MonotoneResult r = isotonic_correct(t, g0, h, Eigen::VectorXd::Constant(80, 0.2));
  for (Index q = 0; q + 1 < 80; ++q) {
    CHECK(r.values[q + 1] >= r.values[q]);
    CHECK(r.values[q + 1] - r.values[q] <= h[q + 1] - h[q] + 1e-15);
  }
}
