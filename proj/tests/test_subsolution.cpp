#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "muskat/operators.hpp"

using namespace muskat;
using muskat::testing::canonical_fields;
using muskat::testing::canonical_interface;

namespace {
double layer_factor(int i, int N) { return 1.0 - static_cast<double>(i * i) / (N * N); }
}  // namespace

TEST_CASE("layer gradients telescope into the h coefficients") {
  const SubsolutionFields& f = canonical_fields();
  const int N = 2;
  for (double s : {-3.0, -0.4, 0.0, 0.9, 6.0}) {
    for (int sign : {1, -1}) {
      // (1 - (i/N)^2) d g^{(i)} - (1 - ((i+1)/N)^2) d g^{(i+1)} = a_{i+1} = (1 - (i/N)^2) h^{(i+1)}.
      for (int i = 1; i < N; ++i) {
        const double lhs = layer_factor(i, N) * f.g_gradient_outer(sign * i, s) -
                           layer_factor(i + 1, N) * f.g_gradient_outer(sign * (i + 1), s);
        CHECK(lhs == doctest::Approx(layer_factor(i, N) * f.h_coeff(sign * (i + 1), s)).epsilon(1e-10));
      }
      // Layer 0 edge: d_s ghat(s, +-1) = h^{(+-1)} + (1 - 1/N^2) d g^{(+-1)}.
      const GHat g = f.ghat(s, sign);
      CHECK(g.ds == doctest::Approx(f.h_coeff(sign, s) + layer_factor(1, N) * f.g_gradient_outer(sign, s))
                        .epsilon(1e-10));
    }
  }
}

TEST_CASE("differentiating the potentials reproduces their gradients") {
  const SubsolutionFields& f = canonical_fields();
  const double h = 1e-4;
  for (double s : {-2.0, 0.35, 1.7}) {
    for (int i : {-1, 1}) {
      const double fd = (f.g_outer(i, s + h) - f.g_outer(i, s - h)) / (2 * h);
      CHECK(fd == doctest::Approx(f.g_gradient_outer(i, s)).epsilon(1e-6));
    }
    const double lam = 0.3;
    const GHat g = f.ghat(s, lam);
    CHECK((f.ghat(s + h, lam).value - f.ghat(s - h, lam).value) / (2 * h) == doctest::Approx(g.ds).epsilon(1e-6));
    CHECK((f.ghat(s, lam + h).value - f.ghat(s, lam - h).value) / (2 * h) ==
          doctest::Approx(g.dlambda).epsilon(1e-6));
  }
  CHECK(f.g_outer(2, 1.0) == 0.0);
  CHECK(f.g_gradient_outer(-2, 1.0) == 0.0);
}

TEST_CASE("jump conditions hold on every interface") {
  const SubsolutionFields& f = canonical_fields();
  for (int i : interface_indices(2))
    for (double s : {-5.0, -0.8, 0.0, 0.45, 2.2, 9.0}) CHECK(f.jump_residual(i, s) < 1e-6);
}

TEST_CASE("outer regions carry zero margin") {
  const SubsolutionFields& f = canonical_fields();
  const PseudoInterface& pi = canonical_interface();
  for (double s : {-1.0, 0.5}) {
    const double z = pi.value(s, f.time());
    for (double x2 : {z + 1.0, z - 1.0}) {
      const std::array<double, 2> x{s, x2};
      CHECK(f.strict_margin(x) == 0.0);
      const std::array<double, 2> u{0.3, -0.2};
      const auto m = f.m_field(x, u);
      CHECK(m[0] == doctest::Approx(f.rho(x) * u[0]));
      CHECK(m[1] == doctest::Approx(f.rho(x) * u[1]));
      CHECK(f.gamma(x) == std::array<double, 2>{0.0, 0.0});
    }
  }
}

TEST_CASE("mixing layers have a positive margin at small time") {
  const SubsolutionFields& f = canonical_fields();
  const PseudoInterface& pi = canonical_interface();
  const double t = f.time();
  for (double s : {-3.0, 0.0, 0.8}) {
    const double z = pi.value(s, t);
    for (double off : {-0.8, -0.5, 0.0, 0.2, 0.6}) CHECK(f.strict_margin({s, z + off * t}) > 0.1);
  }
  // Outer sublayers have gradients along x1 only.
  const double z = pi.value(0.5, t);
  CHECK(f.layer_gradient(1, {0.5, z + 0.6 * t})[1] == 0.0);
}

TEST_CASE("symmetric profile gives gamma with matching parity") {
  const SubsolutionFields& f = canonical_fields();
  const PseudoInterface& pi = canonical_interface();
  const double t = f.time();
  for (double s : {0.3, 1.2, 4.0}) {
    for (double off : {-0.5, 0.1, 0.7}) {
      const auto a = f.gamma({s, pi.value(s, t) + off * t});
      const auto b = f.gamma({-s, pi.value(-s, t) + off * t});
      CHECK(a[0] == doctest::Approx(-b[0]).epsilon(1e-6).scale(1e-6));
      CHECK(a[1] == doctest::Approx(b[1]).epsilon(1e-6).scale(1e-6));
    }
  }
}

TEST_CASE("guards") {
  const SubsolutionFields& f = canonical_fields();
  const PseudoInterface& pi = canonical_interface();
  const double t = f.time();
  CHECK_THROWS_AS(f.gamma({0.2, pi.ladder_interface(1, 0.2, t)}), ProximityError);
  CHECK_THROWS_AS(f.velocity(1, 100.0), std::out_of_range);
  CHECK_THROWS_AS(f.ghat(0.0, 1.5), std::out_of_range);
  CHECK_THROWS_AS(f.h_coeff(3, 0.0), std::out_of_range);
  CHECK_THROWS(SubsolutionFields(pi, 0.0));
}

TEST_CASE("limit regime uses the analytic gradient") {
  const SubsolutionFields lim(canonical_interface(), 1e-8, FieldOptions{muskat::testing::field_quad()});
  CHECK(lim.limit_regime());
  CHECK(lim.limit_gradient(0.0) == doctest::Approx(1.0 / 6.0));
  const GHat g = lim.ghat(0.7, 0.2);
  CHECK(g.grad[0] == doctest::Approx(1.0 / 6.0));
  CHECK(g.grad[1] == 0.0);
  // Outer gradients approach the same limit.
  CHECK(lim.g_gradient_outer(1, 0.7) == doctest::Approx(1.0 / 6.0).epsilon(1e-2));
}

TEST_CASE("hypothesis residuals shrink with time") {
  const PseudoInterface& pi = canonical_interface();
  const SubsolutionFields a(pi, 0.02, FieldOptions{muskat::testing::field_quad()});
  const auto ra = a.hypothesis_residuals(20.0);
  const auto rb = canonical_fields().hypothesis_residuals(20.0);
  CHECK(ra.r1 < rb.r1);
  CHECK(ra.r2 < rb.r2);
  CHECK(ra.r3 == doctest::Approx(rb.r3).epsilon(0.05));
}

TEST_CASE("certified horizon is stable under probe refinement") {
  CertifyOptions coarse;
  coarse.fields.quad = muskat::testing::field_quad();
  CertifyOptions fine = coarse;
  fine.probe_points = 2 * coarse.probe_points - 1;
  fine.lambdas = {-1.0, -0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75, 1.0};
  const auto a = certify_admissibility(canonical_interface(), coarse);
  const auto b = certify_admissibility(canonical_interface(), fine);
  REQUIRE(a.certified);
  REQUIRE(b.certified);
  CHECK(std::abs(a.t_star - b.t_star) < 0.1 * a.t_star);
}
