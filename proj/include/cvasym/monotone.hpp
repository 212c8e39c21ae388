#pragma once

#include <Eigen/Dense>
#include <vector>

#include "cvasym/types.hpp"

namespace cvasym {

struct MonotoneResult {
  Eigen::VectorXd values;           // g at the input knots
  std::vector<double> breakpoints;  // finite x_1 < x_2 < ...
  bool hypothesis_held = true;
  double hypothesis_excess = 0.0;   // worst violation of the input hypothesis
  double bound_ratio = 0.0;         // max |g - g0| / eps over knots
  bool bound_ok = true;             // bound_ratio <= 6
  bool increments_ok = true;        // 0 <= dg <= dh between knots
  bool clamped = false;             // a slope ratio had to be clamped into [0, 1]
};

// Non-decreasing g close to g0 with increments dominated by h_plus.
// All inputs are knot values of piecewise-linear functions on the
// increasing grid t (t[0] = 0); eps must be positive and non-decreasing.
MonotoneResult monotone_correct(const Eigen::Ref<const Eigen::VectorXd>& t,
                                const Eigen::Ref<const Eigen::VectorXd>& g0,
                                const Eigen::Ref<const Eigen::VectorXd>& h_plus,
                                const Eigen::Ref<const Eigen::VectorXd>& eps);

// Alternative witness: pool-adjacent-violators fit of g0, then increments
// clipped into [0, dh].
MonotoneResult isotonic_correct(const Eigen::Ref<const Eigen::VectorXd>& t,
                                const Eigen::Ref<const Eigen::VectorXd>& g0,
                                const Eigen::Ref<const Eigen::VectorXd>& h_plus,
                                const Eigen::Ref<const Eigen::VectorXd>& eps);

}  // namespace cvasym
