#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "cvasym/coupling.hpp"
#include "cvasym/grid_function.hpp"
#include "cvasym/monotone.hpp"
#include "cvasym/oracle_scaling.hpp"
#include "cvasym/rng.hpp"
#include "cvasym/series_estimator.hpp"

namespace cvasym {

enum class GnStage { g1, g2, g };

struct TimeChange {
  GridFunction values;
  GnStage stage = GnStage::g;
};

// sgn(j) g1(j/Delta) = 4/(n_v e^2) sum_{i1,i2 in B_j} theta_i1 theta_i2 c_{i1 i2} theta_|i1-i2|,
// B_j = (k* - (j)_-, k* + (j)_+], c = 1 on the diagonal and 1/sqrt2 off it.
TimeChange g1_from_theta(const CoefficientSequence& seq, const ScalingSummary& sc, Index j_lo, Index j_hi);

// eps(alpha) = c * n^{-u}, constant in alpha.
struct EpsSpec {
  double c = 1.0;
  double u = 0.1;
  double value(Index n) const;
};

enum class GnMode { lemma, isotonic };

struct GnBuild {
  TimeChange g1, g2, g;
  MonotoneResult right, left;  // correction diagnostics per half
  double eps = 0.0;
};

// g = g2 + 4||s||^2 alpha, where g2 is the monotone correction of g1 on each
// half.  Grid taken from f_n.  Throws ConstructionError if g breaks a bound.
GnBuild build_gn(const DensityModel& model, const ScalingSummary& sc, const GridFunction& f_n,
                 EpsSpec eps = {}, GnMode mode = GnMode::lemma);

// Empty when g satisfies g(0) = 0, both increment bounds and
// |g| <= 20 ||s||_inf f_n + 12 ||s||_inf at every knot.
std::vector<std::string> gn_violations(const GridFunction& g, const GridFunction& f_n,
                                       const DensityModel& model, const ScalingSummary& sc);

// K(g)(s, t): g(min) for s, t >= 0, -g(max) for s, t <= 0, 0 across signs.
double K_value(double gs, double gt, double s, double t);

// Kernel on knots j in [j_lo, j_hi].
CovKernel K_of_g(const GridFunction& g, Index j_lo, Index j_hi);

struct GaussianPath {
  GridFunction values;
  std::uint64_t seed = 0;
  Index V = 1;
};

// W_{g(alpha)/V} on the knots of g, built outward from alpha = 0.
GaussianPath simulate_path(const GridFunction& g, Index V, Rng& rng, std::uint64_t seed = 0);

// f_n - W on the shared grid.
GridFunction approx_process(const GridFunction& f_n, const GaussianPath& path);

// Cov(Z(j1/Delta), Z(j2/Delta) | training data) by direct double sum.
double cond_cov_Z(const Eigen::Ref<const Eigen::VectorXd>& theta_hat, const CoefficientSequence& seq,
                  const ScalingSummary& sc, Index j1, Index j2);

// Same for all knot pairs in [j_lo, j_hi], via 2-D prefix sums.
Eigen::MatrixXd cond_cov_Z_matrix(const Eigen::Ref<const Eigen::VectorXd>& theta_hat,
                                  const CoefficientSequence& seq, const ScalingSummary& sc,
                                  Index j_lo, Index j_hi);

// 0 on ties, else sum over (m(1), m(2)] x (m(2), m(3)] of theta_hat theta_hat cov_psi.
double E_stat(const Eigen::Ref<const Eigen::VectorXd>& theta_hat, const CoefficientSequence& seq,
              Index m1, Index m2, Index m3);

// U over index intervals (lo1, hi1] x (lo2, hi2].
double u_statistic(const Eigen::Ref<const Eigen::VectorXd>& theta_hat, const CoefficientSequence& seq,
                   Index lo1, Index hi1, Index lo2, Index hi2);

// The four deterministic leading terms of U.
double u_statistic_leading(const CoefficientSequence& seq, Index n_t, Index lo1, Index hi1,
                           Index lo2, Index hi2);

// Brownian bridge on the uniform grid i/steps, i = 0..steps.
Eigen::VectorXd simulate_bridge(Index steps, Rng& rng);

// -int_0^1 f'(x) B(F(x)) dx, trapezoid rule.  f_prime and F sampled on a
// uniform grid of [0,1] with step <= 1e-3; bridge on its own uniform grid.
double bridge_integral(const Eigen::Ref<const Eigen::VectorXd>& f_prime,
                       const Eigen::Ref<const Eigen::VectorXd>& bridge,
                       const Eigen::Ref<const Eigen::VectorXd>& F);

}  // namespace cvasym
