#include <doctest.h>

#include <cmath>
#include <numbers>

#include "muskat/operators.hpp"

using namespace muskat;

namespace {
QuadSpec tight() {
  QuadSpec q;
  q.rel_tol = 1e-10;
  q.abs_tol = 1e-14;
  return q;
}
}  // namespace

TEST_CASE("sigma integral family") {
  for (double a : {0.0, 0.5, -0.5, 2.0}) {
    CAPTURE(a);
    const double exact = sigma_integral_exact(a);
    CHECK(exact == doctest::Approx(-2.0 * std::numbers::pi * sigma(a)));
    CHECK(sigma_integral(a, tight()).value == doctest::Approx(exact).epsilon(1e-8));
  }
  CHECK(std::abs(sigma_integral(1.0, tight()).value) < 1e-9);
}

TEST_CASE("offset integral") {
  const double zero[] = {0.0};
  for (double a : {0.0, 0.3, 1.0, -2.0}) {
    const double v = pv_integrate([a](double xi) { return kernel_K(a + 1.0 / xi) / xi; }, zero, tight()).value;
    CHECK(v == doctest::Approx(offset_integral_exact(a)).epsilon(1e-8));
  }
}

TEST_CASE("Hilbert pair") {
  const WeightKernel two = constant_weight(2.0);
  auto df = [](double s) { return 1.0 / (1.0 + s * s); };
  for (double s : {-7.0, -1.0, 0.0, 0.5, 1.0, 9.5}) {
    CHECK(t_phi(two, df, s, tight()).value == doctest::Approx(s / (1.0 + s * s)).epsilon(1e-8));
  }
}

TEST_CASE("T_Phi is linear and kills constants") {
  const WeightKernel two = constant_weight(2.0);
  auto df = [](double s) { return std::exp(-s * s); };
  const double base = t_phi(two, df, 0.4, tight()).value;
  for (double lambda : {-3.0, 0.5, 7.0}) {
    auto scaled = [&](double s) { return lambda * df(s); };
    CHECK(t_phi(two, scaled, 0.4, tight()).value == doctest::Approx(lambda * base).epsilon(1e-9));
  }
  CHECK(t_phi(two, [](double) { return 1.3; }, 0.4, tight()).value == 0.0);
}

TEST_CASE("loglog slope recovers a power law") {
  const std::vector<double> t{1.0, 0.5, 0.25, 0.125};
  std::vector<double> v;
  for (double x : t) v.push_back(3.0 * std::pow(x, 1.5));
  CHECK(loglog_slope(t, v) == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("small-offset limits") {
  const auto z = ProfileFunction::rational_bump(0.1, 0.0, 1.0);
  const auto f = ProfileFunction::gaussian(1.0, 0.0, 1.0);
  const SymmetricLimit l = symmetric_kernel_limit(z, f, 0.5, 1e-3, tight());
  CHECK(l.rel_error < 1e-2);
  CHECK(l.target == doctest::Approx(sigma(z.derivative(1, 0.5)) * f.derivative(2, 0.5)));
  const std::vector<double> c{1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128};
  const ScalingSeries r = offset_integral_convergence(z, 1.0, c, tight());
  CHECK(r.slope >= 0.4);
}
