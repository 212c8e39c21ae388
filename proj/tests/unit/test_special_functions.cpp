#include <doctest.h>

#include <boost/math/special_functions/zeta.hpp>
#include <cmath>
#include <numbers>

#include "cvasym/special_functions.hpp"

using namespace cvasym;
using std::numbers::pi;

TEST_CASE("hurwitz zeta at a = 1 and a = 2 matches boost zeta") {
  for (double s : {1.1, 1.5, 2.0, 3.0, 4.5, 7.0}) {
    const double z = boost::math::zeta(s);
    CHECK(hurwitz_zeta(s, 1.0) == doctest::Approx(z).epsilon(1e-13));
    CHECK(hurwitz_zeta(s, 2.0) == doctest::Approx(z - 1.0).epsilon(1e-12));
  }
}

TEST_CASE("hurwitz zeta shift identity") {
  // zeta(s, a) = a^{-s} + zeta(s, a + 1)
  for (double s : {1.3, 2.5, 5.0})
    for (double a : {0.1, 0.7, 3.2, 41.0})
      CHECK(hurwitz_zeta(s, a) == doctest::Approx(std::pow(a, -s) + hurwitz_zeta(s, a + 1.0)).epsilon(1e-12));
}

TEST_CASE("riemann zeta including negative arguments") {
  CHECK(riemann_zeta(2.0) == doctest::Approx(pi * pi / 6.0).epsilon(1e-14));
  CHECK(riemann_zeta(4.0) == doctest::Approx(std::pow(pi, 4) / 90.0).epsilon(1e-14));
  CHECK(riemann_zeta(0.0) == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(riemann_zeta(-1.0) == doctest::Approx(-1.0 / 12.0).epsilon(1e-12));
  for (double s : {-2.5, -0.5, 0.5, 1.5, 2.7})
    CHECK(riemann_zeta(s) == doctest::Approx(boost::math::zeta(s)).epsilon(1e-11));
}

TEST_CASE("integer-order polylog matches the Bernoulli closed forms") {
  // sum cos(j t)/j^2 = pi^2/6 - pi t/2 + t^2/4 and
  // sum sin(j t)/j^3 = pi^2 t/6 - pi t^2/4 + t^3/12 on [0, 2 pi]
  const PolylogSeries li2(2.0), li3(3.0);
  for (double t : {0.0, 1e-6, 0.3, 1.0, pi - 0.01, pi, 4.0, 2 * pi - 1e-4, 2 * pi}) {
    CHECK(li2(t).real() == doctest::Approx(pi * pi / 6 - pi * t / 2 + t * t / 4).epsilon(1e-13));
    CHECK(li3(t).imag() == doctest::Approx(pi * pi * t / 6 - pi * t * t / 4 + t * t * t / 12).scale(1.0).epsilon(1e-13));
  }
}

TEST_CASE("non-integer polylog matches a directly summed series") {
  // Li_s(e^{it}) for s = 2.5 converges absolutely; 2e6 terms leave < 1e-9
  const double s = 2.5;
  const PolylogSeries li(s);
  for (double t : {0.2, 1.7, 3.0, 5.5}) {
    double re = 0.0, im = 0.0;
    for (int j = 2000000; j >= 1; --j) {
      const double w = std::pow(static_cast<double>(j), -s);
      re += w * std::cos(j * t);
      im += w * std::sin(j * t);
    }
    CHECK(li(t).real() == doctest::Approx(re).epsilon(1e-8));
    CHECK(li(t).imag() == doctest::Approx(im).epsilon(1e-8));
  }
}
