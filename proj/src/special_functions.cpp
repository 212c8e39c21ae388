#include "cvasym/special_functions.hpp"

#include <cmath>
#include <numbers>

#include "cvasym/errors.hpp"

namespace cvasym {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kSeriesTerms = 72;

// B_{2m} / (2m)!
constexpr double kBernoulliOverFact[] = {
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 24.0,
    1.0 / 42.0 / 720.0,
    -1.0 / 30.0 / 40320.0,
    5.0 / 66.0 / 3628800.0,
    -691.0 / 2730.0 / 479001600.0,
    7.0 / 6.0 / 87178291200.0,
    -3617.0 / 510.0 / 20922789888000.0,
};

}  // namespace

double hurwitz_zeta(double s, double a) {
  if (!(s > 1.0) || !(a > 0.0))
    throw ParameterError("hurwitz_zeta: need s > 1 and a > 0");
  constexpr double kShift = 16.0;
  double sum = 0.0;
  double b = a;
  while (b < kShift) {
    sum += std::pow(b, -s);
    b += 1.0;
  }
  sum += std::pow(b, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(b, -s);
  double poch = s;
  double power = std::pow(b, -s - 1.0);
  for (int m = 1; m <= 8; ++m) {
    sum += kBernoulliOverFact[m - 1] * poch * power;
    poch *= (s + 2 * m - 1) * (s + 2 * m);
    power /= b * b;
  }
  return sum;
}

double riemann_zeta(double s) {
  if (s == 1.0) throw DomainError("riemann_zeta: pole at s = 1");
  if (s > 1.0) return hurwitz_zeta(s, 1.0);
  if (s == 0.0) return -0.5;
  if (s > 0.0) return std::riemann_zeta(s);
  // zeta(s) = 2^s pi^{s-1} sin(pi s / 2) Gamma(1-s) zeta(1-s)
  const double t = 1.0 - s;
  return std::pow(2.0, s) * std::pow(kPi, s - 1.0) * std::sin(kPi * s / 2.0) *
         std::exp(std::lgamma(t)) * hurwitz_zeta(t, 1.0);
}

PolylogSeries::PolylogSeries(double s) : s_(s) {
  if (!(s > 0.0)) throw ParameterError("PolylogSeries: order must be positive");
  const double r = std::round(s);
  integer_order_ = std::abs(s - r) < 1e-12;
  n_ = static_cast<int>(r);
  if (integer_order_) {
    s_ = r;
    double h = 0.0, f = 1.0;
    for (int i = 1; i < n_; ++i) {
      h += 1.0 / i;
      f *= i;
    }
    harmonic_ = h;
    inv_fact_nm1_ = 1.0 / f;
  } else {
    gamma_1ms_ = std::tgamma(1.0 - s);
  }
  coeff_.assign(kSeriesTerms, 0.0);
  double log_fact = 0.0;
  for (int k = 0; k < kSeriesTerms; ++k) {
    if (k > 0) log_fact += std::log(static_cast<double>(k));
    const double sigma = s_ - k;
    if (integer_order_ && k == n_ - 1) continue;
    if (sigma < 0.0) {
      // zeta(sigma)/k! with Gamma(1-sigma)/k! taken in logs
      const double t = 1.0 - sigma;
      coeff_[k] = std::pow(2.0, sigma) * std::pow(kPi, sigma - 1.0) *
                  std::sin(kPi * sigma / 2.0) * hurwitz_zeta(t, 1.0) *
                  std::exp(std::lgamma(t) - log_fact);
    } else {
      coeff_[k] = riemann_zeta(sigma) * std::exp(-log_fact);
    }
  }
}

std::complex<double> PolylogSeries::operator()(double theta) const {
  // reduce to [0, pi]; Li_s(e^{-i t}) = conj(Li_s(e^{i t}))
  double t = std::fmod(theta, 2.0 * kPi);
  if (t < 0) t += 2.0 * kPi;
  bool conj = false;
  if (t > kPi) {
    t = 2.0 * kPi - t;
    conj = true;
  }
  const std::complex<double> mu(0.0, t);
  std::complex<double> acc(0.0, 0.0);
  for (int k = kSeriesTerms - 1; k >= 0; --k) acc = acc * mu + coeff_[k];
  if (t > 0.0) {
    const std::complex<double> log_minus_mu(std::log(t), -kPi / 2.0);
    if (integer_order_) {
      acc += std::pow(mu, n_ - 1) * inv_fact_nm1_ * (harmonic_ - log_minus_mu);
    } else {
      acc += gamma_1ms_ * std::exp((s_ - 1.0) * log_minus_mu);
    }
  } else if (s_ <= 1.0) {
    throw DomainError("PolylogSeries: divergent at theta = 0 for order <= 1");
  }
  return conj ? std::conj(acc) : acc;
}

}  // namespace cvasym
