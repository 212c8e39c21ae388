#include "cvasym/coupling.hpp"

#include <random>

namespace cvasym {

double w2_squared(const Eigen::MatrixXd& KX, const Eigen::MatrixXd& KY) {
  if (KX.rows() != KY.rows() || KX.cols() != KY.cols())
    throw ParameterError("w2_squared: dimension mismatch");
  const Eigen::MatrixXd rx = psd_sqrt(KX).root;
  const Eigen::MatrixXd inner = rx * KY * rx;
  const Eigen::MatrixXd cross = psd_sqrt(inner).root;
  return std::max(0.0, KX.trace() + KY.trace() - 2.0 * cross.trace());
}

GaussianCoupling make_coupling(const CovKernel& KX, const CovKernel& KY) {
  if (KX.values.rows() != KY.values.rows() || KX.values.cols() != KY.values.cols())
    throw ParameterError("gaussian_coupling: dimension mismatch");
  if (KX.points.size() != KY.points.size() || (KX.points - KY.points).cwiseAbs().sum() != 0.0)
    throw ParameterError("gaussian_coupling: kernels on different grids");
  const auto fx = psd_sqrt(KX.values);
  const auto fy = psd_sqrt(KY.values);
  const Eigen::MatrixXd M = fy.root * fx.root;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::MatrixXd U = svd.matrixU() * svd.matrixV().transpose();
  GaussianCoupling c;
  c.A = fx.root;
  c.B = fy.root * U;
  c.repair_x = fx.repair;
  c.repair_y = fy.repair;
  c.w2_sq = w2_squared(KX.values, KY.values);
  return c;
}

void GaussianCoupling::draw(Rng& rng, Eigen::VectorXd& x, Eigen::VectorXd& y) const {
  std::normal_distribution<double> gauss;
  Eigen::VectorXd xi(A.cols());
  for (Index i = 0; i < xi.size(); ++i) xi[i] = gauss(rng);
  x.noalias() = A * xi;
  y.noalias() = B * xi;
}

CoupledDraw gaussian_coupling(const CovKernel& KX, const CovKernel& KY, Rng& rng) {
  const GaussianCoupling c = make_coupling(KX, KY);
  CoupledDraw d;
  c.draw(rng, d.x, d.y);
  d.w2_sq = c.w2_sq;
  return d;
}

}  // namespace cvasym
