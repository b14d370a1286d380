#include <doctest.h>

#include <cmath>

#include "muskat/kernels.hpp"

using namespace muskat;

namespace {

MixingConfig layered(int N, double c = 1.0) {
  const SamplingGrid grid(40.0, 201);
  return make_mixing_config(N, 0.5, 0.0, 1.0, ProfileFunction::rational_bump(0.1, 0.0, 1.0),
                            ProfileFunction::constant(c), grid);
}

}  // namespace

TEST_CASE("kernel derivatives") {
  const double h = 1e-5;
  for (double x : {-2.0, -0.3, 0.0, 0.8, 3.0}) {
    CHECK(kernel_K1(x) == doctest::Approx((kernel_K(x + h) - kernel_K(x - h)) / (2 * h)).epsilon(1e-8));
    CHECK(kernel_K2(x) == doctest::Approx((kernel_K1(x + h) - kernel_K1(x - h)) / (2 * h)).epsilon(1e-8));
  }
  CHECK(sigma(1.0) == 0.0);
  CHECK(sigma(0.0) == 1.0);
  CHECK(sigma(2.0) == doctest::Approx(-3.0 / 25.0));
}

TEST_CASE("layer-count gate") {
  CHECK(minimal_layers(0.5) == 1);
  CHECK(minimal_layers(1.0) == 2);
  CHECK(minimal_layers(1.4) == 2);
  CHECK(minimal_layers(1.5) == 3);
  CHECK_THROWS(minimal_layers(2.0));
  CHECK_NOTHROW(layered(2, 1.0));
  CHECK_THROWS_AS(layered(2, 1.95), ConfigError);
  CHECK_THROWS_AS(layered(1, 1.0), ConfigError);
  // The limit gradient -1/2 + cN/(2N-1) lies in (-1/2, 1/2) exactly when the gate passes.
  for (int N = 1; N <= 6; ++N) {
    for (double c : {0.3, 0.9, 1.2, 1.6, 1.9}) {
      const double g = -0.5 + c * N / (2.0 * N - 1.0);
      const bool inside = g > -0.5 && g < 0.5;
      bool accepted = true;
      try {
        layered(N, c);
      } catch (const ConfigError&) {
        accepted = false;
      }
      CHECK(inside == accepted);
    }
  }
}

TEST_CASE("vanishing speed hypotheses") {
  const SamplingGrid grid(40.0, 201);
  const auto c = ProfileFunction::rational_bump(0.5, 0.0, 1.0, 1.0 / 6.0);
  const auto z = ProfileFunction::rational_bump(0.1, 0.0, 1.0);
  const auto cfg = make_mixing_config(1, 0.5, 0.0, 0.25, z, c, grid);
  CHECK(cfg.vanishing_speed);
  CHECK_THROWS_AS(make_mixing_config(1, 0.5, 0.2, 0.25, z, c, grid), ConfigError);
  // Decays faster than (1 + |s|^{2 alpha/3})^{-1}.
  CHECK_THROWS_AS(make_mixing_config(1, 0.5, 0.0, 0.25, z, ProfileFunction::rational_bump(0.5, 0.0, 1.0), grid),
                  ConfigError);
}

TEST_CASE("cbar brute force equals the closed form") {
  MixingConfig cfg;
  cfg.c = ProfileFunction::rational_bump(0.8, 0.0, 1.0, 0.5);
  for (int N = 1; N <= 6; ++N) {
    cfg.N = N;
    for (double s : {0.0, 0.4, 3.0}) {
      for (auto conv : {CbarConvention::literal, CbarConvention::doubled}) {
        CHECK(std::abs(effective_cbar(cfg, s, conv) - closed_form_cbar(cfg, s, conv)) < 1e-12);
      }
      CHECK(closed_form_cbar(cfg, s, CbarConvention::doubled) ==
            doctest::Approx(2.0 * closed_form_cbar(cfg, s, CbarConvention::literal)));
    }
  }
  CHECK(parse_cbar_convention("literal") == CbarConvention::literal);
  CHECK_THROWS_AS(parse_cbar_convention("half"), ConfigError);
}

TEST_CASE("speed ladder") {
  const auto cfg = layered(3, 1.2);
  CHECK(interface_indices(3) == std::vector<int>{-3, -2, -1, 1, 2, 3});
  for (int i : interface_indices(3)) CHECK(speed_ladder(cfg, i, 0.7) == doctest::Approx(-speed_ladder(cfg, -i, 0.7)));
  CHECK(speed_ladder(cfg, 3, 0.0) == doctest::Approx(1.2));
  CHECK(speed_ladder(cfg, 1, 0.0) == doctest::Approx(1.2 / 5.0));
  CHECK(speed_ladder_ds(cfg, 2, 0.3) == 0.0);
}

TEST_CASE("offset and rational kernels coincide") {
  const auto cfg = layered(2);
  const ProfileCurve z(ProfileFunction::rational_bump(0.1, 0.0, 1.0));
  for (double xi : {-1.3, -0.01, 0.2, 4.0}) {
    for (int i : {-2, 1}) {
      for (int j : {-1, 2}) {
        CHECK(phi_ij(cfg, z, i, j, xi, 0.4, 0.05) ==
              doctest::Approx(phi_ij_rational(cfg, z, i, j, xi, 0.4, 0.05)).epsilon(1e-12));
      }
    }
  }
  // xi -> 0 with distinct interfaces: Z -> infinity.
  CHECK(phi_ij(cfg, z, 2, -1, 0.0, 0.4, 0.05) == 0.0);
  // Same interface at xi = 0: K(d_s z).
  const double a = z.ds(0.4, 0.0);
  CHECK(phi_ij(cfg, z, 1, 1, 0.0, 0.4, 0.05) == doctest::Approx(kernel_K(a)));
}

TEST_CASE("far-field decomposition of the sharp weight") {
  const ProfileCurve z(ProfileFunction::rational_bump(0.1, 0.0, 1.0));
  const WeightKernel w = sharp_weight(z, 0.0);
  // For a decaying profile the far limit is 2K(0) = 2.
  CHECK(w.far(0.3) == doctest::Approx(2.0));
  const FarField ff = farfield_decomposition(w, 50.0, 0.3);
  CHECK(std::abs(ff.bar) < 1e-2);
  const WNormEstimate est = w_norm_estimate(constant_weight(2.0), 0, 0.5, SamplingGrid(10.0, 41), default_shifts());
  CHECK(est.near == doctest::Approx(2.0));
  CHECK(est.far == doctest::Approx(2.0));  // |xi dPhi - Phi| = 2
  CHECK(est.total == doctest::Approx(est.near + est.far + est.holder));
}
