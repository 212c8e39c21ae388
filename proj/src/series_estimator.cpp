#include "cvasym/series_estimator.hpp"

#include <cmath>
#include <numbers>

#include "cvasym/errors.hpp"

namespace cvasym {

namespace {

// Accumulates psi_0..psi_{k_max} at x into acc via the Chebyshev recurrence.
void add_basis(double x, Index k_max, double* acc) {
  acc[0] += 1.0;
  if (k_max == 0) return;
  const double c1 = std::cos(2.0 * std::numbers::pi * x);
  double prev = 1.0, cur = c1;
  acc[1] += std::numbers::sqrt2 * cur;
  for (Index j = 2; j <= k_max; ++j) {
    const double next = 2.0 * c1 * cur - prev;
    prev = cur;
    cur = next;
    acc[j] += std::numbers::sqrt2 * cur;
  }
}

void check_point(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw DataError("sample point outside [0, 1]");
}

}  // namespace

Sample draw_sample(const DensityModel& model, Index n, std::uint64_t seed) {
  Rng rng(seed);
  return Sample{sample_density(model, n, rng), seed};
}

Eigen::MatrixXd basis_matrix(std::span<const double> points, Index k_max) {
  if (k_max < 0) throw ParameterError("basis_matrix: negative k_max");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Index>(points.size()), k_max + 1);
  Eigen::VectorXd row(k_max + 1);
  for (std::size_t i = 0; i < points.size(); ++i) {
    check_point(points[i]);
    row.setZero();
    add_basis(points[i], k_max, row.data());
    out.row(static_cast<Index>(i)) = row.transpose();
  }
  return out;
}

EmpiricalCoefficients empirical_coeffs(const Sample& sample, std::span<const Index> T, Index k_max) {
  if (k_max < 0) throw ParameterError("empirical_coeffs: negative k_max");
  if (T.empty()) throw DataError("empirical_coeffs: empty index set");
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(k_max + 1);
  for (Index i : T) {
    if (i < 0 || i >= sample.size()) throw ParameterError("empirical_coeffs: index out of range");
    const double x = sample.values[static_cast<std::size_t>(i)];
    check_point(x);
    add_basis(x, k_max, acc.data());
  }
  const Index nt = static_cast<Index>(T.size());
  return {acc / static_cast<double>(nt), nt};
}

EmpiricalCoefficients empirical_coeffs(const Sample& sample, Index k_max) {
  std::vector<Index> all(static_cast<std::size_t>(sample.size()));
  for (Index i = 0; i < sample.size(); ++i) all[static_cast<std::size_t>(i)] = i;
  return empirical_coeffs(sample, all, k_max);
}

double exact_excess_risk(const Eigen::Ref<const Eigen::VectorXd>& theta_hat,
                         const CoefficientSequence& seq, Index k) {
  if (k < 0 || k >= theta_hat.size()) throw ParameterError("exact_excess_risk: k out of range");
  double var = 0.0;
  for (Index j = 0; j <= k; ++j) {
    const double d = theta_hat[j] - seq.theta(j);
    var += d * d;
  }
  return var + seq.tail_sq_sum(k);
}

Eigen::VectorXd excess_risk_curve(const Eigen::Ref<const Eigen::VectorXd>& theta_hat,
                                  const CoefficientSequence& seq) {
  const Index m = theta_hat.size();
  Eigen::VectorXd out(m);
  double var = 0.0;
  for (Index k = 0; k < m; ++k) {
    const double d = theta_hat[k] - seq.theta(k);
    var += d * d;
    out[k] = var + seq.tail_sq_sum(k);
  }
  return out;
}

double empirical_contrast(const Sample& sample, std::span<const Index> S,
                          const Eigen::Ref<const Eigen::VectorXd>& coeffs, Index k) {
  if (k < 0 || k >= coeffs.size()) throw ParameterError("empirical_contrast: k out of range");
  const EmpiricalCoefficients ps = empirical_coeffs(sample, S, k);
  const auto c = coeffs.head(k + 1);
  return c.squaredNorm() - 2.0 * c.dot(ps.theta_hat);
}

}  // namespace cvasym
