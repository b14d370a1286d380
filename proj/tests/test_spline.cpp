#include <doctest.h>

#include <cmath>

#include "muskat/spline.hpp"

using namespace muskat;

TEST_CASE("not-a-knot spline reproduces cubics") {
  auto p = [](double x) { return 1.0 - 2.0 * x + 0.5 * x * x + 0.25 * x * x * x; };
  std::vector<double> x, y;
  for (int k = 0; k <= 12; ++k) {
    x.push_back(-2.0 + 0.37 * k + 0.01 * k * k);
    y.push_back(p(x.back()));
  }
  const CubicSpline sp(x, y);
  for (double s : {-1.9, -0.3, 0.0, 1.1, 2.5}) {
    CHECK(sp.value(s) == doctest::Approx(p(s)).epsilon(1e-12));
    CHECK(sp.d1(s) == doctest::Approx(-2.0 + s + 0.75 * s * s).epsilon(1e-10));
    CHECK(sp.d2(s) == doctest::Approx(1.0 + 1.5 * s).epsilon(1e-10));
  }
  auto P = [](double s) { return s - s * s + s * s * s / 6.0 + s * s * s * s / 16.0; };
  CHECK(sp.integral(1.3) == doctest::Approx(P(1.3) - P(-2.0)).epsilon(1e-12));
}

TEST_CASE("tabulated function tails") {
  std::vector<double> x, y;
  for (int k = 0; k <= 400; ++k) {
    x.push_back(-20.0 + 0.1 * k);
    y.push_back(1.0 / (1.0 + x.back() * x.back()));
  }
  const TabulatedFunction f(x, y, 1.5);
  CHECK(f.right_exponent() == doctest::Approx(2.0).epsilon(1e-2));
  CHECK(f.left_exponent() == doctest::Approx(2.0).epsilon(1e-2));
  CHECK(f.value(40.0) == doctest::Approx(1.0 / 1601.0).epsilon(1e-2));
  const double pi = std::acos(-1.0);
  CHECK(f.integral(-INFINITY, INFINITY) == doctest::Approx(pi).epsilon(1e-4));
  CHECK(f.integral(0.0, 1.0) == doctest::Approx(pi / 4).epsilon(1e-6));
}
