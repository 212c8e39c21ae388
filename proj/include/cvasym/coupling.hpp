#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "cvasym/errors.hpp"
#include "cvasym/rng.hpp"
#include "cvasym/types.hpp"

namespace cvasym {

enum class KernelSource { K_of_g, empirical, conditional_exact };

// Symmetric PSD kernel sampled on grid points.
template <typename Scalar>
struct BasicCovKernel {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Vector points;
  Matrix values;
  KernelSource source = KernelSource::empirical;

  Index size() const { return values.rows(); }
};

using CovKernel = BasicCovKernel<double>;

template <typename Scalar>
struct PsdFactor {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Matrix root;             // symmetric square root after clipping
  Scalar min_eigenvalue;   // before clipping
  Scalar repair;           // largest clipped |eigenvalue|
};

// Symmetric square root via eigendecomposition.  Eigenvalues below
// clip_rel * scale are set to 0; below -indefinite_rel * scale is an error.
template <typename Derived>
PsdFactor<typename Derived::Scalar> psd_sqrt(const Eigen::MatrixBase<Derived>& K,
                                             double clip_rel = 1e-10, double indefinite_rel = 1e-9) {
  using Scalar = typename Derived::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (K.rows() != K.cols()) throw ParameterError("psd_sqrt: matrix not square");
  if (K.rows() == 0) return {Matrix(0, 0), Scalar(0), Scalar(0)};
  const Matrix sym = (K + K.transpose()) / Scalar(2);
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  auto ev = es.eigenvalues();
  const Scalar scale = std::max<Scalar>(Scalar(1), ev.cwiseAbs().maxCoeff());
  const Scalar min_ev = ev.minCoeff();
  if (min_ev < -Scalar(indefinite_rel) * scale)
    throw ParameterError("psd_sqrt: indefinite matrix (min eigenvalue " + std::to_string(double(min_ev)) + ")");
  Scalar repair(0);
  for (Index i = 0; i < ev.size(); ++i) {
    if (ev[i] < Scalar(clip_rel) * scale) {
      repair = std::max(repair, std::abs(ev[i]));
      ev[i] = Scalar(0);
    }
  }
  Matrix root = es.eigenvectors() * ev.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
  return {root, min_ev, repair};
}

// Nearest PSD matrix by flooring eigenvalues at 0; returns the floor size.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> psd_repair(
    const Eigen::MatrixBase<Derived>& K, typename Derived::Scalar* magnitude = nullptr) {
  using Scalar = typename Derived::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Matrix sym = (K + K.transpose()) / Scalar(2);
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  auto ev = es.eigenvalues();
  Scalar floor_size(0);
  for (Index i = 0; i < ev.size(); ++i) {
    if (ev[i] < Scalar(0)) {
      floor_size = std::max(floor_size, -ev[i]);
      ev[i] = Scalar(0);
    }
  }
  if (magnitude) *magnitude = floor_size;
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

// Tr(K_X + K_Y - 2 (K_X^{1/2} K_Y K_X^{1/2})^{1/2})
double w2_squared(const Eigen::MatrixXd& KX, const Eigen::MatrixXd& KY);

// Optimal coupling X = A xi, Y = B xi with A = K_X^{1/2} and
// B = K_Y^{1/2} U, U the orthogonal polar factor of K_Y^{1/2} K_X^{1/2}.
struct GaussianCoupling {
  Eigen::MatrixXd A, B;
  double w2_sq = 0.0;
  double repair_x = 0.0, repair_y = 0.0;

  void draw(Rng& rng, Eigen::VectorXd& x, Eigen::VectorXd& y) const;
};

GaussianCoupling make_coupling(const CovKernel& KX, const CovKernel& KY);

struct CoupledDraw {
  Eigen::VectorXd x, y;
  double w2_sq = 0.0;
};

CoupledDraw gaussian_coupling(const CovKernel& KX, const CovKernel& KY, Rng& rng);

}  // namespace cvasym
