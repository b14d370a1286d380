#pragma once

#include <array>
#include <vector>

#include "muskat/kernels.hpp"
#include "muskat/profiles.hpp"
#include "muskat/pv_quadrature.hpp"
#include "muskat/spline.hpp"

namespace muskat {

enum class SpeedMode { positive_inf, vanishing };

const char* to_string(SpeedMode m);

struct TableOptions {
  double window = 40.0;
  int points = 801;
  double grading = 4.0;
  QuadSpec quad = [] {
    QuadSpec q;
    q.rel_tol = 1e-10;
    q.abs_tol = 1e-14;
    return q;
  }();
};

struct PsiOptions {
  int initial_steps = 8;
  int max_refinements = 6;
  /// Stop when |psi_n(T) - psi_{n/2}(T)| <= rel_tol |psi_n(T)| + abs_tol.
  double rel_tol = 1e-6;
  double abs_tol = 1e-14;
  /// Time nodes t_k = T (k/n)^time_exponent.
  double time_exponent = 2.0;
  /// h_k is integrated on every h_stride-th table node.
  int h_stride = 8;
  /// A fixed panel layout keeps h a smooth function of (t, psi), which the
  /// step-halving convergence test relies on.
  QuadSpec quad = [] {
    QuadSpec q;
    q.adaptive = false;
    q.fixed_width = 0.5;
    q.fixed_split = 2;
    q.max_doublings = 16;
    return q;
  }();
};

struct PseudoInterfaceOptions {
  TableOptions table;
  PsiOptions psi;
  /// When false the trajectory is left at psi = 0 even in vanishing-speed mode.
  bool solve_psi = true;
};

/// Piecewise cubic Hermite trajectory of psi = (psi_1, psi_2) on [0, T].
struct PsiTrajectory {
  bool active = false;
  std::vector<double> t;
  std::vector<std::array<double, 2>> psi;
  std::vector<std::array<double, 2>> h;  // psi' at the nodes
  /// (step count, psi(T)) for each resolution tried.
  std::vector<std::pair<int, std::array<double, 2>>> refinements;
  double self_change = 0.0;  // relative change of psi(T) at the last refinement

  std::array<double, 2> value(double time) const;
  std::array<double, 2> derivative(double time) const;
  std::array<double, 2> second_derivative(double time) const;
};

struct RegionLabel {
  enum class Kind { plus, minus, layer, interface };
  Kind kind = Kind::plus;
  /// Sublayer index -(N-1)..N-1 for `layer`, interface index +-1..+-N for `interface`.
  int index = 0;

  bool operator==(const RegionLabel&) const = default;
};

class PseudoInterface;

/// The curve z(., t) with a prescribed psi instead of the trajectory value.
class InterfaceSnapshot final : public CurveView {
 public:
  InterfaceSnapshot(const PseudoInterface& pi, std::array<double, 2> psi) : pi_(pi), psi_(psi) {}
  double value(double s, double t) const override;
  double ds(double s, double t) const override;
  void eval(double s, double t, double& value, double& slope) const override;

 private:
  const PseudoInterface& pi_;
  std::array<double, 2> psi_;
};

/// z(s,t) = z0 + t z1 + t^2/2 z2 + sum_k psi_k(t) f_k(s).
class PseudoInterface final : public CurveView {
 public:
  static PseudoInterface build(const MixingConfig& cfg, const PseudoInterfaceOptions& opt = {});

  const MixingConfig& config() const { return cfg_; }
  const PseudoInterfaceOptions& options() const { return opt_; }
  SpeedMode mode() const { return mode_; }
  const std::vector<double>& nodes() const { return nodes_; }

  double z0(double s) const { return cfg_.beta * s + cfg_.z0_tilde(s); }
  double z0_ds(double s) const { return cfg_.beta + cfg_.z0_tilde.derivative(1, s); }
  double z0_dss(double s) const { return cfg_.z0_tilde.derivative(2, s); }

  /// T_{Phi_0} z_0.
  const TabulatedFunction& z1() const { return z1_; }
  const TabulatedFunction& z2() const { return z2_; }
  /// The convention-independent parts of z_2.
  const TabulatedFunction& phi0_z1() const { return phi0_z1_; }
  const TabulatedFunction& psi0_z0() const { return psi0_z0_; }
  /// c_bar sigma(d_s z0) d_s^2 z0 for the given convention.
  double curvature_term(double s, CbarConvention convention) const;
  /// d_s cbar d_s z0 / (1 + (d_s z0)^2); zero for constant speed or when disabled in the config.
  double gradient_term(double s) const;
  double z2_with(double s, CbarConvention convention) const;

  /// Direct quadrature of the table entries at an arbitrary s.
  QuadResult direct_phi0_z0(double s, const QuadSpec& quad) const;
  QuadResult direct_phi0_z1(double s, const QuadSpec& quad) const;
  QuadResult direct_psi0_z0(double s, const QuadSpec& quad) const;

  const ProfileFunction& bump(int k) const { return k == 1 ? f1_ : f2_; }
  const PsiTrajectory& psi() const { return psi_; }

  double value(double s, double t) const override;
  double ds(double s, double t) const override;
  void eval(double s, double t, double& value, double& slope) const override;
  double dt(double s, double t) const;
  double dtt(double s, double t) const;

  /// z with an explicit psi (used by the ODE right-hand side).
  double value_with(double s, double t, std::array<double, 2> psi) const;
  double ds_with(double s, double t, std::array<double, 2> psi) const;
  InterfaceSnapshot snapshot(std::array<double, 2> psi) const { return InterfaceSnapshot(*this, psi); }

  /// z^{(i)} = z + c_i t.
  double ladder_interface(int i, double s, double t) const;
  RegionLabel classify_point(std::array<double, 2> x, double t) const;
  /// Staircase density; boundary points take the value of the layer above.
  double density_rho(std::array<double, 2> x, double t) const;

  /// h_k(t, psi) = \int_{I_k} [mean_i u^{(i)} - z1 - t z2] ds with z built from psi.
  std::array<double, 2> psi_rhs(double t, std::array<double, 2> psi, const QuadSpec& quad) const;
  /// Solves psi' = h(t, psi), psi(0) = 0, refining until self-converged.
  PsiTrajectory solve_psi() const;

 private:
  PseudoInterface() = default;
  void check_time(double t) const;
  /// With a baseline, the mean velocities at t = 0 replace z_1 node by node.
  std::array<double, 2> psi_rhs(double t, std::array<double, 2> psi, const QuadSpec& quad,
                                const std::vector<double>* baseline) const;

  MixingConfig cfg_;
  PseudoInterfaceOptions opt_;
  SpeedMode mode_ = SpeedMode::positive_inf;
  std::vector<double> nodes_;
  TabulatedFunction z1_, z2_, phi0_z1_, psi0_z0_;
  ProfileFunction f1_, f2_;
  PsiTrajectory psi_;
};

}  // namespace muskat
