#include "muskat/pseudo_interface.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "muskat/operators.hpp"
#include "muskat/parallel.hpp"

namespace muskat {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Compact bump with unit mass on [center - width, center + width].
ProfileFunction unit_mass_bump(double center, double width) {
  const auto shape = ProfileFunction::compact_bump(1.0, 0.0, 1.0);
  QuadSpec q;
  q.rel_tol = 1e-13;
  q.abs_tol = 1e-15;
  const double mass = integrate_interval([&](double u) { return shape(u); }, -1.0, 1.0, q).value;
  return ProfileFunction::compact_bump(1.0 / (width * mass), center, width);
}

std::vector<double> strided_nodes(const std::vector<double>& nodes, int stride) {
  std::vector<double> out;
  const std::size_t step = static_cast<std::size_t>(std::max(stride, 1));
  for (std::size_t k = 0; k < nodes.size(); k += step) out.push_back(nodes[k]);
  if (out.back() != nodes.back()) out.push_back(nodes.back());
  return out;
}

TabulatedFunction tabulate(const std::vector<double>& nodes, double p_min,
                           const std::function<double(double)>& f) {
  std::vector<double> values(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t k) { values[k] = f(nodes[k]); });
  return TabulatedFunction(nodes, std::move(values), p_min);
}

}  // namespace

const char* to_string(SpeedMode m) { return m == SpeedMode::positive_inf ? "positive_inf" : "vanishing"; }

// ---------------------------------------------------------------------------
// Trajectory

namespace {

struct Segment {
  std::size_t k;
  double h, u;  // step and local coordinate in [0, 1]
};

Segment find_segment(const std::vector<double>& t, double time) {
  if (time < t.front() - 1e-12 * std::abs(t.back()) || time > t.back() * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "time " << time << " outside the trajectory range [" << t.front() << ", " << t.back() << "]";
    throw std::out_of_range(msg.str());
  }
  auto it = std::upper_bound(t.begin(), t.end(), time);
  std::size_t k = it == t.begin() ? 0 : static_cast<std::size_t>(it - t.begin()) - 1;
  k = std::min(k, t.size() - 2);
  const double h = t[k + 1] - t[k];
  return {k, h, std::clamp((time - t[k]) / h, 0.0, 1.0)};
}

}  // namespace

std::array<double, 2> PsiTrajectory::value(double time) const {
  if (!active) return {0.0, 0.0};
  const Segment g = find_segment(t, time);
  const double u = g.u;
  const double h00 = (1 + 2 * u) * (1 - u) * (1 - u), h10 = u * (1 - u) * (1 - u);
  const double h01 = u * u * (3 - 2 * u), h11 = u * u * (u - 1);
  std::array<double, 2> out{};
  for (int c = 0; c < 2; ++c)
    out[c] = h00 * psi[g.k][c] + h10 * g.h * h[g.k][c] + h01 * psi[g.k + 1][c] + h11 * g.h * h[g.k + 1][c];
  return out;
}

std::array<double, 2> PsiTrajectory::derivative(double time) const {
  if (!active) return {0.0, 0.0};
  const Segment g = find_segment(t, time);
  const double u = g.u;
  const double d00 = 6 * u * (u - 1), d10 = (1 - u) * (1 - 3 * u);
  const double d01 = 6 * u * (1 - u), d11 = u * (3 * u - 2);
  std::array<double, 2> out{};
  for (int c = 0; c < 2; ++c)
    out[c] = (d00 * psi[g.k][c] + d01 * psi[g.k + 1][c]) / g.h + d10 * h[g.k][c] + d11 * h[g.k + 1][c];
  return out;
}

std::array<double, 2> PsiTrajectory::second_derivative(double time) const {
  if (!active) return {0.0, 0.0};
  const Segment g = find_segment(t, time);
  const double u = g.u;
  const double e00 = 12 * u - 6, e10 = 6 * u - 4, e01 = 6 - 12 * u, e11 = 6 * u - 2;
  std::array<double, 2> out{};
  for (int c = 0; c < 2; ++c)
    out[c] = (e00 * psi[g.k][c] + e01 * psi[g.k + 1][c]) / (g.h * g.h) + (e10 * h[g.k][c] + e11 * h[g.k + 1][c]) / g.h;
  return out;
}

// ---------------------------------------------------------------------------
// Construction

PseudoInterface PseudoInterface::build(const MixingConfig& cfg, const PseudoInterfaceOptions& opt) {
  if (opt.table.points < 5 || !(opt.table.window > 2.0))
    throw ConfigError("table grid needs at least 5 points and a window beyond the bump supports");
  PseudoInterface pi;
  pi.cfg_ = cfg;
  pi.opt_ = opt;
  pi.mode_ = cfg.vanishing_speed ? SpeedMode::vanishing : SpeedMode::positive_inf;
  int points = opt.table.points;
  if (points % 2 == 0) ++points;  // keep s = 0 on the grid
  pi.nodes_ = SamplingGrid(opt.table.window, points, opt.table.grading).nodes();
  pi.f1_ = unit_mass_bump(-1.5, 0.5);
  pi.f2_ = unit_mass_bump(1.5, 0.5);

  const double p_min = 1.0 + cfg.alpha;
  const QuadSpec& q = opt.table.quad;
  pi.z1_ = tabulate(pi.nodes_, p_min, [&](double s) { return pi.direct_phi0_z0(s, q).value; });
  pi.phi0_z1_ = tabulate(pi.nodes_, p_min, [&](double s) { return pi.direct_phi0_z1(s, q).value; });
  pi.psi0_z0_ = tabulate(pi.nodes_, p_min, [&](double s) { return pi.direct_psi0_z0(s, q).value; });
  std::vector<double> z2(pi.nodes_.size());
  for (std::size_t k = 0; k < z2.size(); ++k) z2[k] = pi.z2_with(pi.nodes_[k], cfg.cbar);
  pi.z2_ = TabulatedFunction(pi.nodes_, std::move(z2), p_min);

  pi.psi_.t = {0.0, cfg.T};
  pi.psi_.psi = {{0.0, 0.0}, {0.0, 0.0}};
  pi.psi_.h = pi.psi_.psi;
  if (pi.mode_ == SpeedMode::vanishing && opt.solve_psi) pi.psi_ = pi.solve_psi();
  return pi;
}

double PseudoInterface::curvature_term(double s, CbarConvention convention) const {
  return effective_cbar(cfg_, s, convention) * sigma(z0_ds(s)) * z0_dss(s);
}

double PseudoInterface::gradient_term(double s) const {
  if (!cfg_.speed_gradient_term) return 0.0;
  const double a = z0_ds(s);
  return cbar_slope(cfg_, s) * a / (1.0 + a * a);
}

double PseudoInterface::z2_with(double s, CbarConvention convention) const {
  return phi0_z1_.value(s) + psi0_z0_.value(s) + curvature_term(s, convention) + gradient_term(s);
}

QuadResult PseudoInterface::direct_phi0_z0(double s, const QuadSpec& quad) const {
  const Jet js = cfg_.z0_tilde.jet(s);
  const double zs = cfg_.beta * s + js[0], dzs = cfg_.beta + js[1];
  const double zero[] = {0.0};
  return pv_integrate(
      [&](double xi) {
        const Jet jx = cfg_.z0_tilde.jet(s - xi);
        const double dzx = cfg_.beta + jx[1];
        const double Z = std::abs(xi) < 1e-6 ? 0.5 * (dzs + dzx) : (zs - cfg_.beta * (s - xi) - jx[0]) / xi;
        return (dzx - dzs) / xi * 2.0 * kernel_K(Z) / kTwoPi;
      },
      zero, quad);
}

QuadResult PseudoInterface::direct_phi0_z1(double s, const QuadSpec& quad) const {
  const double zs = z0(s), dzs = z0_ds(s), d1s = z1_.d1(s);
  const double zero[] = {0.0};
  return pv_integrate(
      [&](double xi) {
        const Jet jx = cfg_.z0_tilde.jet(s - xi);
        const double dzx = cfg_.beta + jx[1];
        const double Z = std::abs(xi) < 1e-6 ? 0.5 * (dzs + dzx) : (zs - cfg_.beta * (s - xi) - jx[0]) / xi;
        return (z1_.d1(s - xi) - d1s) / xi * 2.0 * kernel_K(Z) / kTwoPi;
      },
      zero, quad);
}

QuadResult PseudoInterface::direct_psi0_z0(double s, const QuadSpec& quad) const {
  const double zs = z0(s), dzs = z0_ds(s), w1s = z1_.value(s);
  const double zero[] = {0.0};
  return pv_integrate(
      [&](double xi) {
        const Jet jx = cfg_.z0_tilde.jet(s - xi);
        const double dzx = cfg_.beta + jx[1];
        const bool small = std::abs(xi) < 1e-6;
        const double Z0 = small ? 0.5 * (dzs + dzx) : (zs - cfg_.beta * (s - xi) - jx[0]) / xi;
        const double Z1 = small ? z1_.d1(s - 0.5 * xi) : (w1s - z1_.value(s - xi)) / xi;
        return (dzx - dzs) / xi * 2.0 * kernel_K1(Z0) * Z1 / kTwoPi;
      },
      zero, quad);
}

// ---------------------------------------------------------------------------
// Evaluation

void PseudoInterface::check_time(double t) const {
  if (!(t >= 0.0) || t > cfg_.T * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "time " << t << " outside [0, " << cfg_.T << "]";
    throw std::out_of_range(msg.str());
  }
}

double PseudoInterface::value_with(double s, double t, std::array<double, 2> psi) const {
  double v = z0(s) + t * z1_.value(s) + 0.5 * t * t * z2_.value(s);
  if (psi[0] != 0.0) v += psi[0] * f1_(s);
  if (psi[1] != 0.0) v += psi[1] * f2_(s);
  return v;
}

double PseudoInterface::ds_with(double s, double t, std::array<double, 2> psi) const {
  double v = z0_ds(s) + t * z1_.d1(s) + 0.5 * t * t * z2_.d1(s);
  if (psi[0] != 0.0) v += psi[0] * f1_.derivative(1, s);
  if (psi[1] != 0.0) v += psi[1] * f2_.derivative(1, s);
  return v;
}

double PseudoInterface::value(double s, double t) const {
  check_time(t);
  return value_with(s, t, psi_.value(t));
}

double PseudoInterface::ds(double s, double t) const {
  check_time(t);
  return ds_with(s, t, psi_.value(t));
}

void PseudoInterface::eval(double s, double t, double& value, double& slope) const {
  const auto psi = psi_.value(t);
  value = value_with(s, t, psi);
  slope = ds_with(s, t, psi);
}

double PseudoInterface::dt(double s, double t) const {
  check_time(t);
  const auto dpsi = psi_.derivative(t);
  return z1_.value(s) + t * z2_.value(s) + dpsi[0] * f1_(s) + dpsi[1] * f2_(s);
}

double PseudoInterface::dtt(double s, double t) const {
  check_time(t);
  const auto d2psi = psi_.second_derivative(t);
  return z2_.value(s) + d2psi[0] * f1_(s) + d2psi[1] * f2_(s);
}

double InterfaceSnapshot::value(double s, double t) const { return pi_.value_with(s, t, psi_); }
double InterfaceSnapshot::ds(double s, double t) const { return pi_.ds_with(s, t, psi_); }
void InterfaceSnapshot::eval(double s, double t, double& value, double& slope) const {
  value = pi_.value_with(s, t, psi_);
  slope = pi_.ds_with(s, t, psi_);
}

double PseudoInterface::ladder_interface(int i, double s, double t) const {
  return value(s, t) + speed_ladder(cfg_, i, s) * t;
}

RegionLabel PseudoInterface::classify_point(std::array<double, 2> x, double t) const {
  if (t <= 0.0) {
    const double d = x[1] - z0(x[0]);
    if (d > 0.0) return {RegionLabel::Kind::plus, 0};
    if (d < 0.0) return {RegionLabel::Kind::minus, 0};
    return {RegionLabel::Kind::interface, 0};
  }
  const double d = x[1] - value(x[0], t);
  int above = 0;
  for (int j : interface_indices(cfg_.N)) {
    const double offset = speed_ladder(cfg_, j, x[0]) * t;
    if (d == offset) return {RegionLabel::Kind::interface, j};
    if (d > offset) ++above;
  }
  if (above == 0) return {RegionLabel::Kind::minus, 0};
  if (above == 2 * cfg_.N) return {RegionLabel::Kind::plus, 0};
  return {RegionLabel::Kind::layer, above - cfg_.N};
}

double PseudoInterface::density_rho(std::array<double, 2> x, double t) const {
  if (t <= 0.0) return x[1] >= z0(x[0]) ? 1.0 : -1.0;
  const double d = x[1] - value(x[0], t);
  int at_or_above = 0;
  for (int j : interface_indices(cfg_.N))
    if (d >= speed_ladder(cfg_, j, x[0]) * t) ++at_or_above;
  return static_cast<double>(at_or_above - cfg_.N) / cfg_.N;
}

// ---------------------------------------------------------------------------
// psi ODE

namespace {

std::vector<double> mean_velocities(const MixingConfig& cfg, const CurveView& z, const std::vector<double>& nodes,
                                    double t, const QuadSpec& quad) {
  const auto rows = velocity_table(cfg, z, nodes, t, quad);
  std::vector<double> out(nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    double mean = 0.0;
    for (double u : rows[k]) mean += u;
    out[k] = mean / static_cast<double>(rows[k].size());
  }
  return out;
}

}  // namespace

std::array<double, 2> PseudoInterface::psi_rhs(double t, std::array<double, 2> psi, const QuadSpec& quad) const {
  return psi_rhs(t, psi, quad, nullptr);
}

std::array<double, 2> PseudoInterface::psi_rhs(double t, std::array<double, 2> psi, const QuadSpec& quad,
                                               const std::vector<double>* baseline) const {
  check_time(t);
  const auto nodes = strided_nodes(nodes_, opt_.psi.h_stride);
  const auto mean = mean_velocities(cfg_, snapshot(psi), nodes, t, quad);
  std::vector<double> q(nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const double first = baseline ? (*baseline)[k] : z1_.value(nodes[k]);
    q[k] = mean[k] - first - t * z2_.value(nodes[k]);
  }
  const TabulatedFunction table(nodes, std::move(q), 1.0 + cfg_.alpha);
  const double inf = std::numeric_limits<double>::infinity();
  return {table.integral(-inf, 0.0), table.integral(0.0, inf)};
}

PsiTrajectory PseudoInterface::solve_psi() const {
  PsiTrajectory out;
  out.t = {0.0, cfg_.T};
  out.psi = {{0.0, 0.0}, {0.0, 0.0}};
  out.h = out.psi;
  if (mode_ == SpeedMode::positive_inf) return out;

  const PsiOptions& po = opt_.psi;
  // The t = 0 mean velocity from the same quadrature stands in for z_1, so that
  // h(0, 0) vanishes identically instead of at the level of the quadrature error.
  const auto baseline = mean_velocities(cfg_, snapshot({0.0, 0.0}), strided_nodes(nodes_, po.h_stride), 0.0, po.quad);
  auto rhs = [&](double t, std::array<double, 2> y) { return psi_rhs(t, y, po.quad, &baseline); };
  auto add = [](std::array<double, 2> a, std::array<double, 2> b, double f) {
    return std::array<double, 2>{a[0] + f * b[0], a[1] + f * b[1]};
  };
  auto integrate = [&](int n) {
    PsiTrajectory tr;
    tr.active = true;
    for (int k = 0; k <= n; ++k) tr.t.push_back(cfg_.T * std::pow(static_cast<double>(k) / n, po.time_exponent));
    tr.t.back() = cfg_.T;
    std::array<double, 2> y{0.0, 0.0};
    tr.psi.push_back(y);
    for (int k = 0; k < n; ++k) {
      const double t0 = tr.t[k], dt = tr.t[k + 1] - t0;
      const auto k1 = rhs(t0, y);
      const auto k2 = rhs(t0 + 0.5 * dt, add(y, k1, 0.5 * dt));
      const auto k3 = rhs(t0 + 0.5 * dt, add(y, k2, 0.5 * dt));
      const auto k4 = rhs(tr.t[k + 1], add(y, k3, dt));
      tr.h.push_back(k1);
      for (int c = 0; c < 2; ++c) y[c] += dt / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
      tr.psi.push_back(y);
    }
    tr.h.push_back(rhs(cfg_.T, y));
    return tr;
  };

  int n = std::max(po.initial_steps, 1);
  PsiTrajectory prev = integrate(n);
  out.refinements.emplace_back(n, prev.psi.back());
  for (int r = 0; r < po.max_refinements; ++r) {
    n *= 2;
    PsiTrajectory next = integrate(n);
    const auto a = prev.psi.back(), b = next.psi.back();
    const double change = std::hypot(b[0] - a[0], b[1] - a[1]);
    const double size = std::hypot(b[0], b[1]);
    next.refinements = out.refinements;
    next.refinements.emplace_back(n, b);
    next.self_change = size > 0.0 ? change / size : change;
    if (change <= po.rel_tol * size + po.abs_tol) return next;
    prev = std::move(next);
    out.refinements = prev.refinements;
  }
  std::ostringstream msg;
  msg << "psi integration not self-converged after " << n << " steps (relative change " << prev.self_change << ")";
  throw NumericalError(msg.str());
}

}  // namespace muskat
