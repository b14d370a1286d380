#include <doctest.h>

#include <cmath>
#include <limits>

#include "muskat/profiles.hpp"

using namespace muskat;

namespace {

// Five-point central difference of a derivative of order `order - 1`.
double numeric_derivative(const ProfileFunction& f, int order, double s) {
  const double h = 1e-3;
  auto g = [&](double x) { return f.derivative(order - 1, x); };
  return (-g(s + 2 * h) + 8 * g(s + h) - 8 * g(s - h) + g(s - 2 * h)) / (12 * h);
}

}  // namespace

TEST_CASE("primitive values") {
  CHECK(ProfileFunction::rational_bump(0.1, 0.0, 1.0)(0.0) == doctest::Approx(0.1));
  CHECK(ProfileFunction::rational_bump(0.1, 0.0, 1.0)(1.0) == doctest::Approx(0.05));
  CHECK(ProfileFunction::gaussian(2.0, 1.0, 0.5)(1.0) == doctest::Approx(2.0));
  CHECK(ProfileFunction::compact_bump(0.3, 0.0, 2.0)(0.0) == doctest::Approx(0.3));
  CHECK(ProfileFunction::compact_bump(0.3, 0.0, 2.0)(2.5) == 0.0);
  CHECK(ProfileFunction::linear_ramp(-0.7)(3.0) == doctest::Approx(-2.1));
  CHECK(ProfileFunction()(4.0) == 0.0);
}

TEST_CASE("jets agree with finite differences") {
  const ProfileFunction f = ProfileFunction::sum(
      {ProfileFunction::rational_bump(0.1, 0.3, 1.2, 1.5),
       ProfileFunction::product({ProfileFunction::gaussian(0.4, -0.5, 0.8), ProfileFunction::linear_ramp(1.3)}),
       ProfileFunction::compact_bump(0.2, 1.0, 1.5).scaled(-2.0), ProfileFunction::constant(0.25)});
  for (double s : {-2.0, -0.4, 0.0, 0.7, 1.9}) {
    for (int order = 1; order <= 3; ++order) {
      CAPTURE(s);
      CAPTURE(order);
      CHECK(f.derivative(order, s) == doctest::Approx(numeric_derivative(f, order, s)).epsilon(1e-6));
    }
  }
}

TEST_CASE("decay classification") {
  CHECK(ProfileFunction::rational_bump(1.0, 0.0, 1.0).decay_exponent() == 2.0);
  CHECK(ProfileFunction::rational_bump(1.0, 0.0, 1.0, 1.0 / 6.0).decay_exponent() == doctest::Approx(1.0 / 3.0));
  CHECK(std::isinf(ProfileFunction::gaussian(1.0, 0.0, 1.0).decay_exponent()));
  CHECK(ProfileFunction::constant(1.0).decay_exponent() == 0.0);
  CHECK(ProfileFunction::constant(1.0).is_constant());
  CHECK_FALSE(ProfileFunction::gaussian(1.0, 0.0, 1.0).is_constant());
  CHECK(ProfileFunction::rational_bump(1.0, 0.0, 1.0).decays_in_weighted_class(0.5));
  CHECK_FALSE(ProfileFunction::rational_bump(1.0, 0.0, 1.0, 0.5).decays_in_weighted_class(0.5));
}

TEST_CASE("make_profile parses and rejects") {
  const auto f = make_profile({{"type", "rational_bump"}, {"a", 0.1}, {"s0", 0.0}, {"w", 1.0}});
  CHECK(f(1.0) == doctest::Approx(0.05));
  const auto g = make_profile(
      {{"type", "sum"}, {"terms", {{{"type", "constant"}, {"a", 1.0}}, {{"type", "linear_ramp"}, {"slope", 2.0}}}}});
  CHECK(g(1.5) == doctest::Approx(4.0));
  CHECK_THROWS_AS(make_profile({{"type", "sinc"}}), std::invalid_argument);
  CHECK_THROWS_AS(make_profile({{"type", "gaussian"}, {"a", 1.0}, {"s0", 0.0}, {"w", 0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(make_profile({{"type", "gaussian"}, {"a", 1.0}, {"s0", 0.0}, {"w", 1.0}, {"q", 1.0}}),
                  std::invalid_argument);
}

TEST_CASE("sampling grid") {
  const SamplingGrid g(10.0, 21, 3.0);
  CHECK(g.size() == 21);
  CHECK(g[0] == doctest::Approx(-10.0));
  CHECK(g[20] == doctest::Approx(10.0));
  CHECK(g[10] == doctest::Approx(0.0));
  // graded toward 0
  CHECK(g[11] - g[10] < g[20] - g[19]);
  const SamplingGrid r = g.refined();
  CHECK(r.size() == 41);
  for (int k = 0; k < g.size(); ++k) CHECK(r[2 * k] == doctest::Approx(g[k]));
  CHECK(g.locate(g[7] + 1e-9) == 7);
  const auto s = g.strided(6);
  CHECK(s.front() == g[0]);
  CHECK(s.back() == g[20]);
}

TEST_CASE("weighted norms") {
  const SamplingGrid grid(40.0, 2001);
  // (1 + |s|^{3/2}) / (1 + s^2) has its maximum where s^{1/2}(3 - ... ) balances; just bound it.
  const double n0 = weighted_sup_norm([](double s) { return 1.0 / (1.0 + s * s); }, 0.5, grid);
  CHECK(n0 >= 1.0);
  CHECK(n0 < 2.0);
  // Hölder quotient of f(s) = s at s = 0, xi = 1: |(-1) - 0| / 1 with weight 1.
  CHECK(holder_quotient([](double s) { return s; }, 0.5, 0.0, 1.0) == doctest::Approx(1.0));
  // Linear scaling of the norm.
  const auto f = ProfileFunction::rational_bump(1.0, 0.0, 1.0);
  const auto shifts = default_shifts();
  const double a = weighted_ck_norm(f, 1, 0.5, grid, shifts);
  const double b = weighted_ck_norm(f.scaled(3.0), 1, 0.5, grid, shifts);
  CHECK(b == doctest::Approx(3.0 * a).epsilon(1e-12));
  CHECK_THROWS(weighted_holder_seminorm([](double s) { return s; }, 0.5, grid, std::vector<double>{2.0}));
}
