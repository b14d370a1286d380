#pragma once

#include <array>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "muskat/kernels.hpp"
#include "muskat/pv_quadrature.hpp"

namespace muskat {

class PseudoInterface;

/// A field query landed within the guard distance of an interface.
class ProximityError : public std::runtime_error {
 public:
  explicit ProximityError(const std::string& what) : std::runtime_error(what) {}
};

/// (1/2pi) PV \int (df(s - xi) - df(s))/xi Phi(xi, s) dxi, where df is the derivative of f.
QuadResult t_phi(const std::function<double(double, double)>& weight, const std::function<double(double)>& df,
                 double s, const QuadSpec& quad);
QuadResult t_phi(const WeightKernel& weight, const std::function<double(double)>& df, double s,
                 const QuadSpec& quad);

/// (1/2pi) PV \int Phi_ij(xi, s, t) dxi / xi.
QuadResult i_integral(const MixingConfig& cfg, const CurveView& z, int i, int j, double s, double t,
                      const QuadSpec& quad);

/// Normal velocities u^{(i)}(s, t) of all 2N interfaces, ordered as interface_indices(N),
/// from the direct double-sum form with kernels Phi_ij.
std::vector<double> normal_velocities(const MixingConfig& cfg, const CurveView& z, double s, double t,
                                      const QuadSpec& quad);
double normal_velocity(const MixingConfig& cfg, const CurveView& z, int i, double s, double t,
                       const QuadSpec& quad);

/// Split evaluation of u^{(i)}: `transport` = (1/N) sum_j T_{Phi_ij} z^{(j)},
/// `offset` = (t/N) sum_{j != i} (d_s c_j - d_s c_i) I_ij. Their sum equals the direct form.
struct SplitVelocity {
  double transport = 0.0;
  double offset = 0.0;
  double value() const { return transport + offset; }
};
SplitVelocity normal_velocity_split(const MixingConfig& cfg, const CurveView& z, int i, double s, double t,
                                    const QuadSpec& quad);

/// T_Phi z with the sharp kernel 2K(Z) of the curve at time t.
double sharp_velocity(const CurveView& z, double s, double t, const QuadSpec& quad);

/// Biot-Savart velocity of the 2N vortex sheets at the point x.
/// Throws ProximityError within `guard` (vertical distance) of an interface.
std::array<double, 2> plane_velocity(const MixingConfig& cfg, const CurveView& z, std::array<double, 2> x, double t,
                                     const QuadSpec& quad, double guard = 1e-8);

/// Normal velocities on a set of abscissae; rows follow `nodes`, columns interface_indices(N).
std::vector<std::vector<double>> velocity_table(const MixingConfig& cfg, const CurveView& z,
                                                std::span<const double> nodes, double t, const QuadSpec& quad);

struct ResidualSample {
  double t = 0.0;
  double value = 0.0;
  double argmax_s = 0.0;
};

/// max over nodes and i of (1+|s|^{1+alpha}) |u^{(i)} - T_{Phi_0} z_0|.
ResidualSample expansion_residual_first(const PseudoInterface& pi, double t, std::span<const double> nodes,
                                        const QuadSpec& quad);
/// max over nodes of (1+|s|^{1+alpha}) |mean_i u^{(i)} - comparator| with the second-order comparator.
ResidualSample expansion_residual_second(const PseudoInterface& pi, double t, std::span<const double> nodes,
                                         CbarConvention convention, const QuadSpec& quad);
/// Both residuals from one velocity sweep.
std::pair<ResidualSample, ResidualSample> expansion_residuals(const PseudoInterface& pi, double t,
                                                              std::span<const double> nodes,
                                                              CbarConvention convention, const QuadSpec& quad);

/// Least-squares slope of log(value) against log(t).
double loglog_slope(std::span<const double> t, std::span<const double> value);

struct CbarFit {
  double s = 0.0;
  double chat = 0.0;      // fitted t -> 0 intercept
  double slope = 0.0;     // linear-in-t coefficient of the fit
  double residual = 0.0;  // max deviation of the samples from the fitted line
  double denominator = 0.0;
  std::vector<double> samples;  // raw coefficient per t
};

/// Fit of the coefficient multiplying t sigma(d_s z_0) d_s^2 z_0 in the mean normal velocity.
std::vector<CbarFit> fit_cbar_coefficient(const PseudoInterface& pi, std::span<const double> t_list,
                                          std::span<const double> probes, const QuadSpec& quad);

// ---------------------------------------------------------------------------
// Kernel identities and small-offset scalings

/// PV \int [K(a + 1/xi) + K(a - 1/xi) - 2K(a)] dxi by quadrature.
QuadResult sigma_integral(double a, const QuadSpec& quad);
/// Partial-fraction value of the same integral, -2 pi sigma(a).
double sigma_integral_exact(double a);
/// PV \int K(a + 1/xi) dxi/xi = -pi a/(1 + a^2).
double offset_integral_exact(double a);

struct ScalingSeries {
  std::vector<double> c;
  std::vector<double> value;
  double slope = 0.0;  // log-log slope of value against c
};

/// Weighted sup over `nodes` of T_Phi f with Phi = K(Z + c/xi) - K(Z), for each constant c.
ScalingSeries offset_kernel_scaling(const ProfileFunction& z, const ProfileFunction& f, double alpha,
                                    std::span<const double> c_list, std::span<const double> nodes,
                                    const QuadSpec& quad);

struct SymmetricLimit {
  double s = 0.0;
  double c = 0.0;
  double ratio = 0.0;   // T_Phi f / c
  double target = 0.0;  // sigma(d_s z) d_s^2 f
  double rel_error = 0.0;
};

/// T_Phi f / c for Phi = K(Z + c/xi) + K(Z - c/xi) - 2K(Z), compared with sigma(d_s z) d_s^2 f.
SymmetricLimit symmetric_kernel_limit(const ProfileFunction& z, const ProfileFunction& f, double s, double c,
                                      const QuadSpec& quad);

/// |I_c(s) - I_lim(s)| for each c, where I_c = (1/2pi) PV \int K(Z + c/xi) dxi/xi and
/// I_lim = (1/2pi) [PV \int K(d_s z + 1/xi) dxi/xi + PV \int K(Z) dxi/xi].
ScalingSeries offset_integral_convergence(const ProfileFunction& z, double s, std::span<const double> c_list,
                                          const QuadSpec& quad);

}  // namespace muskat
