#pragma once

#include <complex>
#include <vector>

namespace cvasym {

// sum_{j>=0} (j + a)^{-s}, s > 1, a > 0.  Euler-Maclaurin after a shift.
double hurwitz_zeta(double s, double a);

// Riemann zeta on the real line, s != 1.  Reflection for s < 0.
double riemann_zeta(double s);

// Li_s(e^{i theta}) for theta in [0, 2*pi], real s > 0, via the expansion
// around mu = 0.  Coefficients zeta(s - k) / k! are cached per order s.
class PolylogSeries {
 public:
  explicit PolylogSeries(double s);

  double order() const { return s_; }
  std::complex<double> operator()(double theta) const;

 private:
  double s_;
  bool integer_order_;
  int n_;                       // integer order when integer_order_
  double gamma_1ms_ = 0.0;      // Gamma(1 - s), non-integer case
  double harmonic_ = 0.0;       // H_{n-1}, integer case
  double inv_fact_nm1_ = 0.0;   // 1 / (n-1)!
  std::vector<double> coeff_;   // zeta(s - k) / k!, zero at k = n - 1
};

}  // namespace cvasym
