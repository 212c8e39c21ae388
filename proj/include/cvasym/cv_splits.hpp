#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "cvasym/grid_function.hpp"
#include "cvasym/oracle_scaling.hpp"
#include "cvasym/rng.hpp"
#include "cvasym/series_estimator.hpp"

namespace cvasym {

struct Fold {
  std::vector<Index> train;  // T_i, sorted
  std::vector<Index> test;   // I_i = complement of T_i, sorted
};

struct SplitScheme {
  Index n = 0, n_t = 0, V = 0;
  std::vector<Fold> folds;
};

// Throws SchemeError naming the violated inequality.
void validate_scheme(Index n, Index n_t, Index V);

// Disjoint test blocks of size n - n_t cut from one random permutation.
SplitScheme make_scheme(Index n, Index n_t, Index V, Rng& rng);

// HO_T(k) for k = 0..k_max.
Eigen::VectorXd holdout_curve(const Sample& sample, const Fold& fold, Index k_max);
// HO_T(k) = sum_{j<=k} theta_hat^T_j (theta_hat^T_j - 2 theta_hat^{T^c}_j).
double holdout_crit(const Sample& sample, std::span<const Index> T, Index k);

Eigen::VectorXd cv_curve(const Sample& sample, const SplitScheme& scheme, Index k_max);
double cv_crit(const Sample& sample, const SplitScheme& scheme, Index k);

struct Selection {
  Index k = 0;                   // smallest minimizer
  std::vector<Index> argmin_set;
  bool boundary_hit = false;     // k == last index searched
};

Selection select_k(const Eigen::Ref<const Eigen::VectorXd>& values);

struct RescaledProcesses {
  std::vector<GridFunction> ho, L, Z;  // per fold
  GridFunction cv;
};

// Knots j in [j_lo, j_hi] around k*; needs the true theta for L and Z.
RescaledProcesses rescaled_processes(const Sample& sample, const SplitScheme& scheme,
                                     const CoefficientSequence& seq, const ScalingSummary& sc,
                                     Index j_lo, Index j_hi);

}  // namespace cvasym
