#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "muskat/profiles.hpp"

namespace muskat {

/// Rejected configuration (layer-count gate, speed hypotheses, malformed input).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class CbarConvention { literal, doubled };

const char* to_string(CbarConvention c);
CbarConvention parse_cbar_convention(const std::string& name);

struct MixingConfig {
  int N = 1;
  double alpha = 0.5;
  double beta = 0.0;
  double T = 1.0;
  ProfileFunction z0_tilde;
  ProfileFunction c;
  /// min and max of c on the working grid. In vanishing-speed mode c_min is
  /// instead the grid infimum of c(s) (1 + |s|^{2 alpha/3}).
  double c_min = 0.0;
  double c_max = 0.0;
  /// inf c = 0: the speed decays at infinity.
  bool vanishing_speed = false;
  CbarConvention cbar = CbarConvention::doubled;
  /// Include the drift t d_s cbar d_s z0 / (1 + (d_s z0)^2) from a non-constant speed in z_2.
  bool speed_gradient_term = true;
};

/// Validates and completes a configuration. Throws ConfigError when c is not
/// positive on the grid, when c_max >= (2N-1)/N, or when a decaying speed
/// violates beta = 0 or the lower bound c >= c_min (1 + |s|^{2 alpha/3})^{-1}.
MixingConfig make_mixing_config(int N, double alpha, double beta, double T, ProfileFunction z0_tilde,
                                ProfileFunction c, const SamplingGrid& grid,
                                CbarConvention cbar = CbarConvention::doubled);

/// Smallest N with (2N - 1)/N > c_max. Requires 0 < c_max < 2.
int minimal_layers(double c_max);

inline double kernel_K(double x) { return 1.0 / (1.0 + x * x); }
inline double kernel_K1(double x) {
  const double d = 1.0 + x * x;
  return -2.0 * x / (d * d);
}
inline double kernel_K2(double x) {
  const double d = 1.0 + x * x;
  return (6.0 * x * x - 2.0) / (d * d * d);
}
/// (1 - a^2) / (1 + a^2)^2
inline double sigma(double a) {
  const double d = 1.0 + a * a;
  return (1.0 - a * a) / (d * d);
}

/// A curve s -> z(s, t) with its s-derivative, as consumed by the kernels.
class CurveView {
 public:
  virtual ~CurveView() = default;
  virtual double value(double s, double t) const = 0;
  virtual double ds(double s, double t) const = 0;
  /// Value and slope together; override when sharing work is cheaper.
  virtual void eval(double s, double t, double& value, double& slope) const {
    value = this->value(s, t);
    slope = ds(s, t);
  }
};

/// Time-independent curve beta s + f(s).
class ProfileCurve final : public CurveView {
 public:
  explicit ProfileCurve(ProfileFunction f, double beta = 0.0) : f_(std::move(f)), beta_(beta) {}
  double value(double s, double) const override { return beta_ * s + f_(s); }
  double ds(double s, double) const override { return beta_ + f_.derivative(1, s); }

 private:
  ProfileFunction f_;
  double beta_;
};

/// Difference quotient (z(s) - z(s - xi))/xi, switching to the midpoint
/// derivative for |xi| below 1e-6 where the quotient loses digits.
template <class Value, class Slope>
double difference_quotient(const Value& z, const Slope& dz, double s, double xi) {
  if (std::abs(xi) < 1e-6) return dz(s - 0.5 * xi);
  return (z(s) - z(s - xi)) / xi;
}

double difference_quotient(const CurveView& z, double s, double xi, double t);

/// sign(i) (2|i| - 1)/(2N - 1) c(s) for 1 <= |i| <= N.
double speed_ladder(const MixingConfig& cfg, int i, double s);
/// s-derivative of speed_ladder.
double speed_ladder_ds(const MixingConfig& cfg, int i, double s);
/// Interface index list -N..-1, 1..N.
std::vector<int> interface_indices(int N);

/// Brute-force (1/8N^2) sum |c_i - c_j| (literal) or twice that (doubled).
double effective_cbar(const MixingConfig& cfg, double s, CbarConvention convention);
inline double effective_cbar(const MixingConfig& cfg, double s) { return effective_cbar(cfg, s, cfg.cbar); }
/// (2N+1)/(6N) c(s) or (2N+1)/(3N) c(s).
double closed_form_cbar(const MixingConfig& cfg, double s, CbarConvention convention);

/// d_s of the doubled cbar, (2N+1)/(3N) d_s c(s).
double cbar_slope(const MixingConfig& cfg, double s);

/// Offset form K(Z^{(j)} + c_ij t / xi); at xi = 0 returns the limit.
double phi_ij(const MixingConfig& cfg, const CurveView& z, int i, int j, double xi, double s, double t);
/// Rational form xi^2 / (xi^2 + (z^{(i)}(s,t) - z^{(j)}(s - xi,t))^2).
double phi_ij_rational(const MixingConfig& cfg, const CurveView& z, int i, int j, double xi, double s, double t);

/// 2 K(Z) for the curve z at time t.
double phi_sharp(const CurveView& z, double xi, double s, double t);
/// 2 K'(Z_0) Z_1 with Z_0, Z_1 the difference quotients of z0 and z1.
double psi0(const CurveView& z0, const CurveView& z1, double xi, double s);

/// Weight Phi(xi, s) with xi-derivative and far-field limit.
struct WeightKernel {
  std::function<double(double, double)> phi;
  std::function<double(double, double)> dphi_dxi;
  std::function<double(double)> far;
};

WeightKernel constant_weight(double value);
WeightKernel sharp_weight(const CurveView& z, double beta, double t = 0.0);

struct FarField {
  double limit = 0.0;  // Phi^inf(s)
  double bar = 0.0;    // xi (Phi - Phi^inf)
  double tilde = 0.0;  // xi d_xi Phi - Phi
};

FarField farfield_decomposition(const WeightKernel& w, double xi, double s);

/// Grid estimate of the W-norm of a weight. `near` is the sup of |Phi| over
/// |xi| <= 1, `far` the sup of |Phi bar| + |Phi tilde| over |xi| > 1, and
/// `total` their sum. For k >= 1 the s-derivatives are taken by central
/// differences and `holder` collects the Hölder seminorm terms.
struct WNormEstimate {
  double near = 0.0;
  double far = 0.0;
  double holder = 0.0;
  double total = 0.0;
};

WNormEstimate w_norm_estimate(const WeightKernel& w, int k, double alpha, const SamplingGrid& grid,
                              std::span<const double> shifts);

}  // namespace muskat
