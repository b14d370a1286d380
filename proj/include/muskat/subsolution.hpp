#pragma once

#include <array>
#include <string>
#include <vector>

#include "muskat/pseudo_interface.hpp"
#include "muskat/spline.hpp"

namespace muskat {

struct FieldOptions {
  QuadSpec quad;
  /// Velocities are tabulated on every `stride`-th pseudo-interface node.
  int stride = 4;
  /// Vertical distance below which a point counts as lying on an interface.
  double guard = 1e-8;
  /// Below this fraction of T the layer-0 gradient is replaced by its t -> 0 limit.
  double small_time_fraction = 1e-6;
};

/// Layer-0 potential in the (s, lambda) chart, x2 = z + lambda c_1 t.
struct GHat {
  double value = 0.0;
  double ds = 0.0;
  double dlambda = 0.0;
  std::array<double, 2> grad{};  // (d_{x1}, d_{x2}) g^{(0)}
};

/// The subsolution fields at one time t > 0, built from tabulated normal velocities.
class SubsolutionFields {
 public:
  SubsolutionFields(const PseudoInterface& pi, double t, FieldOptions opt = {});

  const PseudoInterface& interface() const { return pi_; }
  double time() const { return t_; }
  const std::vector<double>& nodes() const { return nodes_; }
  /// True when t is below the chain-rule threshold and limits are used.
  bool limit_regime() const { return limit_; }

  /// Interpolated u^{(i)}(s, t). Field queries outside the tabulated window throw std::out_of_range.
  double velocity(int i, double s) const;
  /// h^{(i)} for i = +-1..+-N.
  double h_coeff(int i, double s) const;
  /// d_{x1} g^{(i)} for |i| <= N; zero for |i| = N.
  double g_gradient_outer(int i, double s) const;
  /// t -> 0 limit -1/2 + c(s) N/(2N - 1) shared by every layer gradient.
  double limit_gradient(double s) const;

  GHat ghat(double s, double lambda) const;
  /// Potential g^{(i)} along s (i != 0), obtained by integrating its gradient from 0.
  double g_outer(int i, double s) const;
  /// g in sublayer `layer` at x; layer 0 maps x to the lambda chart (clamped to [-1, 1]).
  double layer_potential(int layer, std::array<double, 2> x) const;

  /// grad g in sublayer i at x (i = 0 uses the lambda chart).
  std::array<double, 2> layer_gradient(int layer, std::array<double, 2> x) const;

  RegionLabel classify(std::array<double, 2> x) const;
  double rho(std::array<double, 2> x) const;
  /// gamma = grad^perp g in the layer containing x, zero in Omega^+-.
  /// Throws ProximityError within `guard` of an interface.
  std::array<double, 2> gamma(std::array<double, 2> x) const;
  /// m = rho u - (1 - rho^2)(gamma + e2/2) for a given plane velocity u.
  std::array<double, 2> m_field(std::array<double, 2> x, std::array<double, 2> u) const;
  /// 1/2 (1 - rho^2) - |m - rho u + (0, (1 - rho^2)/2)|, which does not depend on u.
  double strict_margin(std::array<double, 2> x) const;

  /// Residual of the tangential jump condition across interface i = +-1..+-N.
  double jump_residual(int i, double s) const;

  struct Hypotheses {
    double r1 = 0.0, r2 = 0.0, r3 = 0.0;
  };
  /// Sup over the tabulation nodes within |s| <= window.
  Hypotheses hypothesis_residuals(double window) const;

 private:
  std::size_t slot(int i) const;
  std::size_t outer_slot(int i) const;
  void check_range(double s) const;
  void check_proximity(std::array<double, 2> x) const;
  double lambda_of(std::array<double, 2> x) const;

  const PseudoInterface& pi_;
  double t_;
  FieldOptions opt_;
  bool limit_ = false;
  std::vector<double> nodes_;
  std::vector<CubicSpline> u_;  // one per interface, interface_indices order
  std::vector<double> dtz_;     // d_t z at the nodes
  CubicSpline dtz_table_;
  CubicSpline gplus_, gminus_;  // d_s ghat(s, +-1)
  CubicSpline drift_;           // d_t z - mean u; its integral from 0 is d_lambda ghat
  std::vector<CubicSpline> outer_;  // d_{x1} g^{(i)}, i = -(N-1)..-1, 1..N-1
};

struct CertifyOptions {
  FieldOptions fields;
  /// Ladder t = T 2^-k for k = 0..levels-1.
  int levels = 11;
  int bisection_steps = 6;
  double safety = 1e-3;
  double jump_tol = 1e-6;
  /// Probe abscissae: uniform grid on [-probe_window, probe_window].
  double probe_window = 10.0;
  int probe_points = 81;
  std::vector<double> lambdas{-1.0, -0.5, 0.0, 0.5, 1.0};
  /// Window for the hypothesis residual sups.
  double residual_window = 20.0;
};

struct LadderRow {
  double t = 0.0;
  double min_margin = 0.0;
  double worst_s = 0.0;
  double worst_x2 = 0.0;
  int worst_layer = 0;
  double jump_max = 0.0;
  double r1 = 0.0, r2 = 0.0, r3 = 0.0;
  /// max over probes and layers of |d_{x1} g^{(i)} - limit|, i != 0.
  double limit_deviation = 0.0;
  double max_dx2_g0_over_sqrt_c = 0.0;
  bool margin_ok = false;
  bool jump_ok = false;
};

struct AdmissibilityReport {
  bool certified = false;
  double t_star = 0.0;
  double margin_at_t_star = 0.0;
  double margin_at_half = 0.0;
  double jump_max = 0.0;
  double M = 0.0;
  double r1_slope = 0.0, r2_slope = 0.0;
  bool r1_decreasing = false, r2_decreasing = false;
  /// Limit-gradient deviation at the smallest ladder time.
  double limit_deviation = 0.0;
  int jump_conditions = 0;
  std::string failure;
  std::vector<LadderRow> ladder;
  std::vector<LadderRow> bisection;
  LadderRow half;
};

/// Evaluates one time: margins on the probe set, jump residuals and hypothesis residuals.
LadderRow evaluate_time(const PseudoInterface& pi, double t, const CertifyOptions& opt);

/// Ascending ladder scan then bisection for the largest admissible time. A time is
/// admissible when margins exceed the safety, jumps pass, and r1, r2 keep growing with t.
AdmissibilityReport certify_admissibility(const PseudoInterface& pi, const CertifyOptions& opt = {});

}  // namespace muskat
