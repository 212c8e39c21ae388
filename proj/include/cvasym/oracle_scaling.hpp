#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cvasym/grid_function.hpp"
#include "cvasym/spectral_density.hpp"

namespace cvasym {

// max{k : theta_k^2 >= 1/n}
Index k_star(const CoefficientSequence& seq, double n);

struct OracleRisk {
  double value = 0.0;
  Index k = 0;  // largest minimizer
};

// inf_k { sum_{j>k} theta_j^2 + k/n }
OracleRisk oracle_risk(const CoefficientSequence& seq, double n);

struct ScalingSummary {
  Index n = 0, n_t = 0, n_v = 0;
  Index k_star = 0;          // k*(n_t)
  double oracle_risk = 0.0;  // or(n_t)
  Index delta_d = 0, delta_g = 0, delta = 0;
  double E_script = 0.0;     // delta / n_t
  double e_frak = 0.0;       // sqrt(E_script / n_v)
  bool canonical = true;     // theta^2 non-increasing
  bool degenerate = false;   // an empty qualifying set
};

// With assert_chain, a canonical non-degenerate summary that breaks the
// scaling chain throws ConstructionError.
ScalingSummary scaling(const CoefficientSequence& seq, Index n, Index n_t, bool assert_chain = true);

// Violations of the scaling chain Delta >= n_t/n_v, E >= 1/n_v, e >= 1/n_v,
// e <= E, E <= 2 or(n_t) + 1/n_v.  Empty when all hold.
std::vector<std::string> scaling_chain_violations(const ScalingSummary& sc);

// f_n on knots j in [j_lo, j_hi], built from R(k* + j) - R(k*) + j/n_t.
GridFunction risk_shape(const CoefficientSequence& seq, const ScalingSummary& sc,
                        Index j_lo, Index j_hi);

// f_n(j/Delta) from e f_n = sum_{i=min(k,k*)+1}^{max(k,k*)} |theta_i^2 - 1/n_t|, k = k*+j.
// Agrees with risk_shape when theta^2 is non-increasing.
double f_n_abs(const CoefficientSequence& seq, const ScalingSummary& sc, Index j);

// Smallest j > 0 with f_n(j/Delta) > x_max, plus 2 Delta.
Index f_n_extent(const CoefficientSequence& seq, const ScalingSummary& sc, double x_max);

// f_n on [-k*, f_n_extent(x_max)].
GridFunction risk_shape(const CoefficientSequence& seq, const ScalingSummary& sc, double x_max);

struct Window {
  double x = 0.0;
  Index j_a = 0, j_b = 0;
  double a = 0.0, b = 0.0;  // j_a / Delta, j_b / Delta
};

// a_x: smallest knot in [-k*, 0] with f_n <= x; b_x: largest knot >= 0 with f_n <= x.
Window window(const GridFunction& f_n, double x);

struct HypothesisConstants {
  double c1 = 1.0, d1 = 0.0;
  double c2 = 0.1, d2 = 1.0;
  double c3 = 0.1, d3 = 0.5;
  double d4 = 0.2, d5 = 0.05;
};

struct HypothesisRecord {
  bool checked = false;
  bool holds = true;
  std::optional<Index> first_violation;
};

struct HypothesisReport {
  HypothesisConstants constants;
  HypothesisRecord hyp[5];
};

// hyp[0..2] (tail upper bound, tail lower bound, local decay) over 1 <= k <= k_check_max;
// hyp[3..4] (n_v window) only when (n, n_t) is given.
HypothesisReport check_hypotheses(const CoefficientSequence& seq, const HypothesisConstants& c,
                                  Index k_check_max, std::optional<Index> n = std::nullopt,
                                  std::optional<Index> n_t = std::nullopt);

struct NtWindow {
  Index n_v_min = 0, n_v_max = 0;
  bool empty() const { return n_v_min > n_v_max; }
  Index midpoint() const { return (n_v_min + n_v_max) / 2; }
};

// [ceil(n^{2/3 + d5}), floor(n^{1 - d4})] for n - n_t.
NtWindow nt_window(Index n, double d4, double d5);

}  // namespace cvasym
