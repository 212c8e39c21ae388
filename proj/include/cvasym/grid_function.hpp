#pragma once

#include <Eigen/Core>
#include <cmath>
#include <string>

#include "cvasym/errors.hpp"
#include "cvasym/types.hpp"

namespace cvasym {

// Piecewise-linear function with knots at j / delta for integer
// j in [j_min, j_min + size - 1].
template <typename Scalar>
class BasicGridFunction {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  BasicGridFunction() = default;
  BasicGridFunction(Index j_min, Scalar delta, Vector values)
      : j_min_(j_min), delta_(delta), values_(std::move(values)) {
    if (!(delta_ > Scalar(0))) throw ParameterError("GridFunction: delta must be positive");
  }

  static BasicGridFunction zeros(Index j_min, Index j_max, Scalar delta) {
    return BasicGridFunction(j_min, delta, Vector::Zero(j_max - j_min + 1));
  }

  Index j_min() const { return j_min_; }
  Index j_max() const { return j_min_ + values_.size() - 1; }
  Index size() const { return values_.size(); }
  Scalar delta() const { return delta_; }
  bool contains(Index j) const { return j >= j_min_ && j <= j_max(); }
  Scalar alpha(Index j) const { return Scalar(j) / delta_; }

  Scalar at(Index j) const {
    if (!contains(j)) throw DomainError("GridFunction: knot " + std::to_string(j) + " outside grid");
    return values_[j - j_min_];
  }
  Scalar& at(Index j) {
    if (!contains(j)) throw DomainError("GridFunction: knot " + std::to_string(j) + " outside grid");
    return values_[j - j_min_];
  }

  // Linear interpolation at real alpha.
  Scalar operator()(Scalar alpha) const {
    const Scalar pos = alpha * delta_;
    const Scalar lo = std::floor(pos);
    const Index j = static_cast<Index>(lo);
    if (j == j_max() && pos == lo) return at(j);
    if (j < j_min_ || j >= j_max()) throw DomainError("GridFunction: alpha outside grid");
    const Scalar w = pos - lo;
    return (Scalar(1) - w) * values_[j - j_min_] + w * values_[j - j_min_ + 1];
  }

  const Vector& values() const { return values_; }
  Vector& values() { return values_; }

  BasicGridFunction slice(Index lo, Index hi) const {
    if (!contains(lo) || !contains(hi) || hi < lo) throw DomainError("GridFunction: bad slice");
    return BasicGridFunction(lo, delta_, values_.segment(lo - j_min_, hi - lo + 1));
  }

  // Smallest knot attaining the minimum over [lo, hi].
  Index argmin(Index lo, Index hi) const {
    if (!contains(lo) || !contains(hi) || hi < lo) throw DomainError("GridFunction: bad range");
    Index best = lo;
    for (Index j = lo + 1; j <= hi; ++j)
      if (values_[j - j_min_] < values_[best - j_min_]) best = j;
    return best;
  }

 private:
  Index j_min_ = 0;
  Scalar delta_ = Scalar(1);
  Vector values_;
};

using GridFunction = BasicGridFunction<double>;

}  // namespace cvasym
