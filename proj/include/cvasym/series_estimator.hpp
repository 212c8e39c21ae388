#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "cvasym/spectral_density.hpp"
#include "cvasym/types.hpp"

namespace cvasym {

struct Sample {
  std::vector<double> values;
  std::uint64_t seed = 0;

  Index size() const { return static_cast<Index>(values.size()); }
};

Sample draw_sample(const DensityModel& model, Index n, std::uint64_t seed);

// Rows = points, columns = psi_0 .. psi_{k_max} evaluated at each point.
Eigen::MatrixXd basis_matrix(std::span<const double> points, Index k_max);

struct EmpiricalCoefficients {
  Eigen::VectorXd theta_hat;  // theta_hat_0 .. theta_hat_{k_max}
  Index n_t = 0;
};

// Mean of psi_j over sample[T], j = 0..k_max.
EmpiricalCoefficients empirical_coeffs(const Sample& sample, std::span<const Index> T, Index k_max);
// Same over the whole sample.
EmpiricalCoefficients empirical_coeffs(const Sample& sample, Index k_max);

// ||s_k - s||^2 = sum_{j<=k} (theta_hat_j - theta_j)^2 + sum_{j>k} theta_j^2.
double exact_excess_risk(const Eigen::Ref<const Eigen::VectorXd>& theta_hat,
                         const CoefficientSequence& seq, Index k);

// Excess risk for every k in 0..theta_hat.size()-1.
Eigen::VectorXd excess_risk_curve(const Eigen::Ref<const Eigen::VectorXd>& theta_hat,
                                  const CoefficientSequence& seq);

// ||t||^2 - 2 P_S t for t = sum_{j<=k} coeffs_j psi_j.
double empirical_contrast(const Sample& sample, std::span<const Index> S,
                          const Eigen::Ref<const Eigen::VectorXd>& coeffs, Index k);

}  // namespace cvasym
