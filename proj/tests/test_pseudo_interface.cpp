#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "muskat/operators.hpp"

using namespace muskat;
using muskat::testing::canonical_interface;

TEST_CASE("first-order term of the canonical bump") {
  const PseudoInterface& pi = canonical_interface();
  CHECK(pi.mode() == SpeedMode::positive_inf);
  // z1 = H applied to a Lorentzian derivative: even, z1(0) ~ 0.1, z1(1) ~ 0.
  for (double s : {0.3, 1.0, 2.5, 7.0}) CHECK(pi.z1().value(s) == doctest::Approx(pi.z1().value(-s)).epsilon(1e-8));
  CHECK(pi.z1().value(0.0) == doctest::Approx(0.1).epsilon(0.05));
  CHECK(std::abs(pi.z1().value(1.0)) < 1e-3);
  // Table against direct quadrature off the nodes.
  const QuadSpec q = muskat::testing::field_quad();
  for (double s : {0.137, 1.71, -4.3})
    CHECK(pi.z1().value(s) == doctest::Approx(pi.direct_phi0_z0(s, q).value).epsilon(1e-6));
}

TEST_CASE("small-amplitude limit of z1") {
  // z1/eps -> (1 - s^2)/(1 + s^2)^2 as the bump amplitude eps -> 0.
  const double eps = 1e-4;
  const MixingConfig cfg = make_mixing_config(2, 0.5, 0.0, 1.0, ProfileFunction::rational_bump(eps, 0.0, 1.0),
                                              ProfileFunction::constant(1.0), SamplingGrid(40.0, 201));
  PseudoInterfaceOptions opt;
  opt.table.points = 101;
  const PseudoInterface pi = PseudoInterface::build(cfg, opt);
  const QuadSpec q = muskat::testing::field_quad();
  for (double s : {0.0, 0.5, 2.0}) {
    const double expected = (1.0 - s * s) / ((1.0 + s * s) * (1.0 + s * s));
    CHECK(pi.direct_phi0_z0(s, q).value / eps == doctest::Approx(expected).epsilon(1e-3));
  }
}

TEST_CASE("psi vanishes for a speed bounded below") {
  const PseudoInterface& pi = canonical_interface();
  CHECK_FALSE(pi.psi().active);
  for (double t : {0.0, 0.3, 1.0}) {
    CHECK(pi.psi().value(t)[0] == 0.0);
    CHECK(pi.psi().value(t)[1] == 0.0);
  }
}

TEST_CASE("expansion of z") {
  const PseudoInterface& pi = canonical_interface();
  const double t = 0.2, s = 0.7;
  CHECK(pi.value(s, 0.0) == doctest::Approx(pi.z0(s)));
  CHECK(pi.value(s, t) == doctest::Approx(pi.z0(s) + t * pi.z1().value(s) + 0.5 * t * t * pi.z2().value(s)));
  CHECK(pi.dt(s, t) == doctest::Approx(pi.z1().value(s) + t * pi.z2().value(s)));
  CHECK(pi.dtt(s, t) == doctest::Approx(pi.z2().value(s)));
  // Constant speed: no gradient correction; z2 follows the configured convention.
  CHECK(pi.gradient_term(s) == 0.0);
  CHECK(pi.z2().value(s) == doctest::Approx(pi.z2_with(s, CbarConvention::doubled)).epsilon(1e-8));
}

TEST_CASE("staircase density and region labels") {
  const PseudoInterface& pi = canonical_interface();
  const double t = 0.1, s = 0.4;
  const double z = pi.value(s, t);
  // Interfaces sit at z + c_i t with c_i = +-1/3, +-1.
  CHECK(pi.density_rho({s, z + 2.0}, t) == 1.0);
  CHECK(pi.density_rho({s, z - 2.0}, t) == -1.0);
  CHECK(pi.density_rho({s, z}, t) == 0.0);
  CHECK(pi.density_rho({s, z + 0.05}, t) == 0.5);
  CHECK(pi.density_rho({s, z - 0.05}, t) == -0.5);
  CHECK(pi.classify_point({s, z + 2.0}, t) == RegionLabel{RegionLabel::Kind::plus, 0});
  CHECK(pi.classify_point({s, z + 0.05}, t) == RegionLabel{RegionLabel::Kind::layer, 1});
  CHECK(pi.classify_point({s, z}, t) == RegionLabel{RegionLabel::Kind::layer, 0});
  CHECK(pi.classify_point({s, z - 0.05}, t) == RegionLabel{RegionLabel::Kind::layer, -1});
  CHECK(pi.ladder_interface(2, s, t) == doctest::Approx(z + t));
}

TEST_CASE("split and direct velocities agree") {
  const PseudoInterface& pi = canonical_interface();
  const MixingConfig& cfg = pi.config();
  const QuadSpec q = muskat::testing::field_quad();
  for (int i : interface_indices(cfg.N)) {
    const double direct = normal_velocity(cfg, pi, i, 0.3, 0.01, q);
    CHECK(normal_velocity_split(cfg, pi, i, 0.3, 0.01, q).value() == doctest::Approx(direct).epsilon(1e-9));
  }
}

TEST_CASE("plane velocity traces match normal velocities") {
  const PseudoInterface& pi = canonical_interface();
  const MixingConfig& cfg = pi.config();
  const QuadSpec q = muskat::testing::field_quad();
  const double t = 0.01;
  for (double s : {-1.5, 0.25, 3.0}) {
    const double x2 = pi.ladder_interface(1, s, t);
    const double slope = pi.ds(s, t);
    const double un = normal_velocity(cfg, pi, 1, s, t, q);
    for (double d : {1e-4, -1e-4}) {
      const auto u = plane_velocity(cfg, pi, {s, x2 + d}, t, q);
      CHECK(std::abs(-slope * u[0] + u[1] - un) < 1e-4);
    }
    CHECK_THROWS_AS(plane_velocity(cfg, pi, {s, x2}, t, q), ProximityError);
  }
}

TEST_CASE("time range is enforced") {
  CHECK_THROWS(canonical_interface().value(0.0, 1.5));
  CHECK_THROWS(canonical_interface().value(0.0, -0.1));
}
