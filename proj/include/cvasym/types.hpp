#pragma once

#include <Eigen/Core>

namespace cvasym {

using Index = Eigen::Index;

// Relative-tolerance comparison used wherever a squared coefficient is
// compared against a threshold like 1/n; keeps exact ties (theta^2 == 1/n)
// from flipping on the last bit.
inline bool geq_tol(double a, double b, double rel = 1e-12) {
  return a >= b - rel * (b < 0 ? -b : b);
}

}  // namespace cvasym
