#include "muskat/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "muskat/parallel.hpp"
#include "muskat/pseudo_interface.hpp"

namespace muskat {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kSmallXi = 1e-6;

/// Ladder factors sign(i) (2|i| - 1)/(2N - 1) in interface_indices order.
std::vector<double> ladder_factors(int N) {
  std::vector<double> out;
  for (int i : interface_indices(N)) {
    const double f = (2.0 * std::abs(i) - 1.0) / (2.0 * N - 1.0);
    out.push_back(i > 0 ? f : -f);
  }
  return out;
}

std::size_t slot(int N, int i) {
  if (i == 0 || std::abs(i) > N) {
    std::ostringstream msg;
    msg << "interface index " << i << " outside +-1..+-" << N;
    throw std::out_of_range(msg.str());
  }
  return static_cast<std::size_t>(i < 0 ? i + N : i + N - 1);
}

/// The 2N ladder curves at a single abscissa.
struct LadderPoint {
  std::vector<double> z, dz, dc;
};

LadderPoint ladder_at(const MixingConfig& cfg, const CurveView& z, const std::vector<double>& factors, double s,
                      double t) {
  double zs = 0.0, dzs = 0.0;
  z.eval(s, t, zs, dzs);
  const Jet c = cfg.c.jet(s);
  LadderPoint p;
  for (double f : factors) {
    p.z.push_back(zs + f * c[0] * t);
    p.dz.push_back(dzs + f * c[1] * t);
    p.dc.push_back(f * c[1]);
  }
  return p;
}

/// Z_ij = (z^{(i)}(s) - z^{(j)}(s - xi))/xi, with the midpoint slope when both
/// curves coincide and xi is too small for the quotient.
inline double quotient(double zi, double zj, double dzi, double dzj, double xi, bool coincide) {
  if (coincide && std::abs(xi) < kSmallXi) return 0.5 * (dzi + dzj);
  return (zi - zj) / xi;
}

}  // namespace

QuadResult t_phi(const std::function<double(double, double)>& weight, const std::function<double(double)>& df,
                 double s, const QuadSpec& quad) {
  const double dfs = df(s);
  const double zero[] = {0.0};
  return pv_integrate([&](double xi) { return (df(s - xi) - dfs) / xi * weight(xi, s) / kTwoPi; }, zero, quad);
}

QuadResult t_phi(const WeightKernel& weight, const std::function<double(double)>& df, double s,
                 const QuadSpec& quad) {
  return t_phi(weight.phi, df, s, quad);
}

QuadResult i_integral(const MixingConfig& cfg, const CurveView& z, int i, int j, double s, double t,
                      const QuadSpec& quad) {
  slot(cfg.N, i);
  slot(cfg.N, j);
  const double zero[] = {0.0};
  return pv_integrate([&](double xi) { return phi_ij(cfg, z, i, j, xi, s, t) / xi / kTwoPi; }, zero, quad);
}

std::vector<double> normal_velocities(const MixingConfig& cfg, const CurveView& z, double s, double t,
                                      const QuadSpec& quad) {
  const int n2 = 2 * cfg.N;
  const auto factors = ladder_factors(cfg.N);
  const LadderPoint at_s = ladder_at(cfg, z, factors, s, t);
  const double scale = 1.0 / (kTwoPi * cfg.N);
  std::vector<double> zj(static_cast<std::size_t>(n2)), dzj(static_cast<std::size_t>(n2));
  auto integrand = [&](double xi, std::span<double> out) {
    double zx = 0.0, dzx = 0.0;
    z.eval(s - xi, t, zx, dzx);
    const Jet c = cfg.c.jet(s - xi);
    for (int j = 0; j < n2; ++j) {
      zj[j] = zx + factors[j] * c[0] * t;
      dzj[j] = dzx + factors[j] * c[1] * t;
    }
    for (int i = 0; i < n2; ++i) {
      double acc = 0.0;
      for (int j = 0; j < n2; ++j) {
        const double Z = quotient(at_s.z[i], zj[j], at_s.dz[i], dzj[j], xi, i == j || t == 0.0);
        acc += (dzj[j] - at_s.dz[i]) / xi * kernel_K(Z);
      }
      out[i] = acc * scale;
    }
  };
  return pv_integrate(integrand, static_cast<std::size_t>(n2), 0.0, quad).value;
}

double normal_velocity(const MixingConfig& cfg, const CurveView& z, int i, double s, double t,
                       const QuadSpec& quad) {
  const std::size_t k = slot(cfg.N, i);
  return normal_velocities(cfg, z, s, t, quad)[k];
}

SplitVelocity normal_velocity_split(const MixingConfig& cfg, const CurveView& z, int i, double s, double t,
                                    const QuadSpec& quad) {
  const int n2 = 2 * cfg.N;
  const std::size_t ki = slot(cfg.N, i);
  const auto factors = ladder_factors(cfg.N);
  const LadderPoint at_s = ladder_at(cfg, z, factors, s, t);
  // Components 0..2N-1: T_{Phi_ij} z^{(j)}; 2N..4N-1: I_ij.
  auto integrand = [&](double xi, std::span<double> out) {
    double zx = 0.0, dzx = 0.0;
    z.eval(s - xi, t, zx, dzx);
    const Jet c = cfg.c.jet(s - xi);
    for (int j = 0; j < n2; ++j) {
      const double zj = zx + factors[j] * c[0] * t;
      const double dzj = dzx + factors[j] * c[1] * t;
      const double Z = quotient(at_s.z[ki], zj, at_s.dz[ki], dzj, xi, static_cast<std::size_t>(j) == ki || t == 0.0);
      const double phi = kernel_K(Z);
      out[j] = (dzj - at_s.dz[j]) / xi * phi / kTwoPi;
      out[n2 + j] = static_cast<std::size_t>(j) == ki ? 0.0 : phi / xi / kTwoPi;
    }
  };
  const auto r = pv_integrate(integrand, static_cast<std::size_t>(2 * n2), 0.0, quad).value;
  SplitVelocity out;
  for (int j = 0; j < n2; ++j) {
    out.transport += r[j] / cfg.N;
    if (static_cast<std::size_t>(j) != ki) out.offset += t / cfg.N * (at_s.dc[j] - at_s.dc[ki]) * r[n2 + j];
  }
  return out;
}

double sharp_velocity(const CurveView& z, double s, double t, const QuadSpec& quad) {
  double zs = 0.0, dzs = 0.0;
  z.eval(s, t, zs, dzs);
  const double zero[] = {0.0};
  auto integrand = [&](double xi) {
    double zx = 0.0, dzx = 0.0;
    z.eval(s - xi, t, zx, dzx);
    const double Z = quotient(zs, zx, dzs, dzx, xi, true);
    return (dzx - dzs) / xi * 2.0 * kernel_K(Z) / kTwoPi;
  };
  return pv_integrate(integrand, zero, quad).value;
}

std::array<double, 2> plane_velocity(const MixingConfig& cfg, const CurveView& z, std::array<double, 2> x, double t,
                                     const QuadSpec& quad, double guard) {
  const int n2 = 2 * cfg.N;
  const auto factors = ladder_factors(cfg.N);
  {
    const double zx = z.value(x[0], t), cx = cfg.c(x[0]);
    for (int j = 0; j < n2; ++j) {
      const double dist = std::abs(x[1] - (zx + factors[j] * cx * t));
      if (dist < guard) {
        std::ostringstream msg;
        msg << "point (" << x[0] << ", " << x[1] << ") lies within " << dist << " of interface "
            << interface_indices(cfg.N)[j];
        throw ProximityError(msg.str());
      }
    }
  }
  const double scale = 1.0 / (kTwoPi * cfg.N);
  auto integrand = [&](double xi, std::span<double> out) {
    double zx = 0.0, dzx = 0.0;
    z.eval(xi, t, zx, dzx);
    const Jet c = cfg.c.jet(xi);
    const double d1 = x[0] - xi;
    out[0] = out[1] = 0.0;
    for (int j = 0; j < n2; ++j) {
      const double d2 = x[1] - (zx + factors[j] * c[0] * t);
      const double w = (dzx + factors[j] * c[1] * t) / (d1 * d1 + d2 * d2);
      out[0] -= d2 * w;
      out[1] += d1 * w;
    }
    out[0] *= scale;
    out[1] *= scale;
  };
  const auto r = pv_integrate(integrand, 2, x[0], quad).value;
  return {r[0], r[1]};
}

std::vector<std::vector<double>> velocity_table(const MixingConfig& cfg, const CurveView& z,
                                                std::span<const double> nodes, double t, const QuadSpec& quad) {
  std::vector<std::vector<double>> rows(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t k) { rows[k] = normal_velocities(cfg, z, nodes[k], t, quad); });
  return rows;
}

namespace {

double residual_weight(double s, double alpha) { return 1.0 + std::pow(std::abs(s), 1.0 + alpha); }

}  // namespace

std::pair<ResidualSample, ResidualSample> expansion_residuals(const PseudoInterface& pi, double t,
                                                              std::span<const double> nodes,
                                                              CbarConvention convention, const QuadSpec& quad) {
  ResidualSample first{t, 0.0, 0.0}, second{t, 0.0, 0.0};
  if (t == 0.0) return {first, second};
  const MixingConfig& cfg = pi.config();
  const auto rows = velocity_table(cfg, pi, nodes, t, quad);
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const double s = nodes[k];
    const double w = residual_weight(s, cfg.alpha);
    const double lead = pi.z1().value(s);
    double mean = 0.0;
    for (double u : rows[k]) {
      mean += u;
      const double r = w * std::abs(u - lead);
      if (r > first.value) first = {t, r, s};
    }
    mean /= static_cast<double>(rows[k].size());
    const double r = w * std::abs(mean - (lead + t * pi.z2_with(s, convention)));
    if (r > second.value) second = {t, r, s};
  }
  return {first, second};
}

ResidualSample expansion_residual_first(const PseudoInterface& pi, double t, std::span<const double> nodes,
                                        const QuadSpec& quad) {
  return expansion_residuals(pi, t, nodes, pi.config().cbar, quad).first;
}

ResidualSample expansion_residual_second(const PseudoInterface& pi, double t, std::span<const double> nodes,
                                         CbarConvention convention, const QuadSpec& quad) {
  return expansion_residuals(pi, t, nodes, convention, quad).second;
}

double loglog_slope(std::span<const double> t, std::span<const double> value) {
  if (t.size() != value.size() || t.size() < 2) throw std::invalid_argument("loglog_slope needs >= 2 paired samples");
  double mx = 0.0, my = 0.0;
  const double n = static_cast<double>(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (!(t[k] > 0.0) || !(value[k] > 0.0)) throw std::invalid_argument("loglog_slope needs positive samples");
    mx += std::log(t[k]) / n;
    my += std::log(value[k]) / n;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double dx = std::log(t[k]) - mx;
    sxy += dx * (std::log(value[k]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

std::vector<CbarFit> fit_cbar_coefficient(const PseudoInterface& pi, std::span<const double> t_list,
                                          std::span<const double> probes, const QuadSpec& quad) {
  if (t_list.size() < 2) throw std::invalid_argument("fit_cbar_coefficient needs at least two times");
  const MixingConfig& cfg = pi.config();
  std::vector<CbarFit> fits(probes.size());
  parallel_for(probes.size(), [&](std::size_t p) {
    const double s = probes[p];
    CbarFit& fit = fits[p];
    fit.s = s;
    fit.denominator = sigma(pi.z0_ds(s)) * pi.z0_dss(s);
    if (std::abs(fit.denominator) < 1e-8) {
      std::ostringstream msg;
      msg << "sigma(d_s z0) d_s^2 z0 vanishes at probe s = " << s;
      throw std::domain_error(msg.str());
    }
    const double lead = pi.direct_phi0_z0(s, quad).value;
    const double first =
        pi.direct_phi0_z1(s, quad).value + pi.direct_psi0_z0(s, quad).value + pi.gradient_term(s);
    for (double t : t_list) {
      const auto u = normal_velocities(cfg, pi, s, t, quad);
      double mean = 0.0;
      for (double v : u) mean += v / static_cast<double>(u.size());
      fit.samples.push_back((mean - lead - t * first) / (t * fit.denominator));
    }
    // Least squares samples ~ chat + slope t.
    const double n = static_cast<double>(t_list.size());
    double mt = 0.0, mc = 0.0;
    for (std::size_t k = 0; k < t_list.size(); ++k) {
      mt += t_list[k] / n;
      mc += fit.samples[k] / n;
    }
    double stc = 0.0, stt = 0.0;
    for (std::size_t k = 0; k < t_list.size(); ++k) {
      stc += (t_list[k] - mt) * (fit.samples[k] - mc);
      stt += (t_list[k] - mt) * (t_list[k] - mt);
    }
    fit.slope = stt > 0.0 ? stc / stt : 0.0;
    fit.chat = mc - fit.slope * mt;
    for (std::size_t k = 0; k < t_list.size(); ++k)
      fit.residual = std::max(fit.residual, std::abs(fit.samples[k] - fit.chat - fit.slope * t_list[k]));
  });
  return fits;
}

// ---------------------------------------------------------------------------
// Kernel identities and small-offset scalings

QuadResult sigma_integral(double a, const QuadSpec& quad) {
  const double zero[] = {0.0};
  return pv_integrate(
      [a](double xi) {
        if (xi == 0.0) return -2.0 * kernel_K(a);
        return kernel_K(a + 1.0 / xi) + kernel_K(a - 1.0 / xi) - 2.0 * kernel_K(a);
      },
      zero, quad);
}

double sigma_integral_exact(double a) { return -kTwoPi * sigma(a); }

double offset_integral_exact(double a) { return -std::numbers::pi * a / (1.0 + a * a); }

namespace {

struct ProfileCurveFn {
  const ProfileFunction& z;
  double Z(double s, double xi) const {
    return difference_quotient([&](double x) { return z(x); }, [&](double x) { return z.derivative(1, x); }, s, xi);
  }
};

}  // namespace

ScalingSeries offset_kernel_scaling(const ProfileFunction& z, const ProfileFunction& f, double alpha,
                                    std::span<const double> c_list, std::span<const double> nodes,
                                    const QuadSpec& quad) {
  const ProfileCurveFn curve{z};
  auto df = [&f](double x) { return f.derivative(1, x); };
  ScalingSeries out;
  for (double c : c_list) {
    std::vector<double> vals(nodes.size());
    parallel_for(nodes.size(), [&](std::size_t k) {
      const double s = nodes[k];
      auto phi = [&](double xi, double at) {
        const double Z = curve.Z(at, xi);
        if (xi == 0.0) return -kernel_K(Z);
        return kernel_K(Z + c / xi) - kernel_K(Z);
      };
      vals[k] = (1.0 + std::pow(std::abs(s), 1.0 + alpha)) * std::abs(t_phi(phi, df, s, quad).value);
    });
    out.c.push_back(c);
    out.value.push_back(*std::max_element(vals.begin(), vals.end()));
  }
  if (out.c.size() >= 2) out.slope = loglog_slope(out.c, out.value);
  return out;
}

SymmetricLimit symmetric_kernel_limit(const ProfileFunction& z, const ProfileFunction& f, double s, double c,
                                      const QuadSpec& quad) {
  if (!(c > 0.0)) throw std::invalid_argument("symmetric_kernel_limit needs c > 0");
  const ProfileCurveFn curve{z};
  auto phi = [&](double xi, double at) {
    const double Z = curve.Z(at, xi);
    if (xi == 0.0) return -2.0 * kernel_K(Z);
    return kernel_K(Z + c / xi) + kernel_K(Z - c / xi) - 2.0 * kernel_K(Z);
  };
  SymmetricLimit out;
  out.s = s;
  out.c = c;
  out.ratio = t_phi(phi, [&f](double x) { return f.derivative(1, x); }, s, quad).value / c;
  out.target = sigma(z.derivative(1, s)) * f.derivative(2, s);
  out.rel_error = std::abs(out.ratio - out.target) / std::abs(out.target);
  return out;
}

ScalingSeries offset_integral_convergence(const ProfileFunction& z, double s, std::span<const double> c_list,
                                          const QuadSpec& quad) {
  const ProfileCurveFn curve{z};
  const double zero[] = {0.0};
  const double plain = pv_integrate([&](double xi) { return kernel_K(curve.Z(s, xi)) / xi; }, zero, quad).value;
  const double limit = (offset_integral_exact(z.derivative(1, s)) + plain) / kTwoPi;
  ScalingSeries out;
  for (double c : c_list) {
    const double ic =
        pv_integrate(
            [&](double xi) {
              if (xi == 0.0) return 0.0;
              return kernel_K(curve.Z(s, xi) + c / xi) / xi;
            },
            zero, quad)
            .value /
        kTwoPi;
    out.c.push_back(c);
    out.value.push_back(std::abs(ic - limit));
  }
  if (out.c.size() >= 2) out.slope = loglog_slope(out.c, out.value);
  return out;
}

}  // namespace muskat
