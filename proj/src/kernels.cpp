#include "muskat/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace muskat {

const char* to_string(CbarConvention c) { return c == CbarConvention::literal ? "literal" : "doubled"; }

CbarConvention parse_cbar_convention(const std::string& name) {
  if (name == "literal") return CbarConvention::literal;
  if (name == "doubled") return CbarConvention::doubled;
  throw ConfigError("cbar convention must be 'literal' or 'doubled', got '" + name + "'");
}

MixingConfig make_mixing_config(int N, double alpha, double beta, double T, ProfileFunction z0_tilde,
                                ProfileFunction c, const SamplingGrid& grid, CbarConvention cbar) {
  if (N < 1) throw ConfigError("layer count N must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  if (!std::isfinite(beta)) throw ConfigError("beta must be finite");
  if (!(T > 0.0) || !std::isfinite(T)) throw ConfigError("horizon T must be positive");

  MixingConfig cfg;
  cfg.N = N;
  cfg.alpha = alpha;
  cfg.beta = beta;
  cfg.T = T;
  cfg.z0_tilde = std::move(z0_tilde);
  cfg.c = std::move(c);
  cfg.cbar = cbar;

  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double s : grid.nodes()) {
    const double v = cfg.c(s);
    if (!(v > 0.0)) {
      std::ostringstream msg;
      msg << "speed c must be positive on the grid; c(" << s << ") = " << v;
      throw ConfigError(msg.str());
    }
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  cfg.c_max = hi;
  cfg.c_min = lo;
  const double bound = (2.0 * N - 1.0) / N;
  if (!(hi < bound)) {
    std::ostringstream msg;
    msg << "c_max = " << hi << " violates c_max < (2N-1)/N = " << bound << " for N = " << N;
    throw ConfigError(msg.str());
  }

  const double q = cfg.c.decay_exponent();
  cfg.vanishing_speed = q > 0.0;
  if (cfg.vanishing_speed) {
    if (beta != 0.0) throw ConfigError("a speed with inf c = 0 requires beta = 0");
    const double p = 2.0 * alpha / 3.0;
    if (q > p + 1e-12) {
      std::ostringstream msg;
      msg << "speed decays like |s|^-" << q << ", faster than the admissible |s|^-" << p;
      throw ConfigError(msg.str());
    }
    double weighted = std::numeric_limits<double>::infinity();
    for (double s : grid.nodes()) weighted = std::min(weighted, cfg.c(s) * (1.0 + std::pow(std::abs(s), p)));
    if (!(weighted > 0.0)) throw ConfigError("no positive c_min with c >= c_min (1 + |s|^{2 alpha/3})^{-1}");
    cfg.c_min = weighted;
  }
  return cfg;
}

int minimal_layers(double c_max) {
  if (!(c_max > 0.0) || !(c_max < 2.0)) throw ConfigError("minimal_layers needs 0 < c_max < 2");
  int n = static_cast<int>(std::floor(1.0 / (2.0 - c_max))) + 1;
  n = std::max(n - 1, 1);
  while (!((2.0 * n - 1.0) > c_max * n)) ++n;
  return n;
}

double difference_quotient(const CurveView& z, double s, double xi, double t) {
  return difference_quotient([&](double x) { return z.value(x, t); }, [&](double x) { return z.ds(x, t); }, s, xi);
}

namespace {
void check_index(const MixingConfig& cfg, int i) {
  if (i == 0 || std::abs(i) > cfg.N) {
    std::ostringstream msg;
    msg << "interface index " << i << " outside +-1..+-" << cfg.N;
    throw std::out_of_range(msg.str());
  }
}

double ladder_factor(const MixingConfig& cfg, int i) {
  check_index(cfg, i);
  const double f = (2.0 * std::abs(i) - 1.0) / (2.0 * cfg.N - 1.0);
  return i > 0 ? f : -f;
}
}  // namespace

double speed_ladder(const MixingConfig& cfg, int i, double s) { return ladder_factor(cfg, i) * cfg.c(s); }

double speed_ladder_ds(const MixingConfig& cfg, int i, double s) {
  return ladder_factor(cfg, i) * cfg.c.derivative(1, s);
}

std::vector<int> interface_indices(int N) {
  std::vector<int> out;
  for (int i = -N; i <= N; ++i)
    if (i != 0) out.push_back(i);
  return out;
}

double effective_cbar(const MixingConfig& cfg, double s, CbarConvention convention) {
  const auto idx = interface_indices(cfg.N);
  std::vector<double> ci;
  for (int i : idx) ci.push_back(speed_ladder(cfg, i, s));
  double sum = 0.0;
  for (double a : ci)
    for (double b : ci) sum += std::abs(a - b);
  const double literal = sum / (8.0 * cfg.N * cfg.N);
  return convention == CbarConvention::literal ? literal : 2.0 * literal;
}

double closed_form_cbar(const MixingConfig& cfg, double s, CbarConvention convention) {
  const double n = cfg.N;
  const double doubled = (2.0 * n + 1.0) / (3.0 * n) * cfg.c(s);
  return convention == CbarConvention::literal ? 0.5 * doubled : doubled;
}

double cbar_slope(const MixingConfig& cfg, double s) {
  const double n = cfg.N;
  return (2.0 * n + 1.0) / (3.0 * n) * cfg.c.derivative(1, s);
}

double phi_ij(const MixingConfig& cfg, const CurveView& z, int i, int j, double xi, double s, double t) {
  if (std::abs(xi) > 1.0) return phi_ij_rational(cfg, z, i, j, xi, s, t);
  const double dc = speed_ladder(cfg, i, s) - speed_ladder(cfg, j, s);
  if (xi == 0.0) {
    if (i != j && t > 0.0) return 0.0;
    return kernel_K(z.ds(s, t) + speed_ladder_ds(cfg, i, s) * t);
  }
  auto zj = [&](double x) { return z.value(x, t) + speed_ladder(cfg, j, x) * t; };
  auto dzj = [&](double x) { return z.ds(x, t) + speed_ladder_ds(cfg, j, x) * t; };
  return kernel_K(difference_quotient(zj, dzj, s, xi) + dc * t / xi);
}

double phi_ij_rational(const MixingConfig& cfg, const CurveView& z, int i, int j, double xi, double s, double t) {
  const double zi = z.value(s, t) + speed_ladder(cfg, i, s) * t;
  const double zj = z.value(s - xi, t) + speed_ladder(cfg, j, s - xi) * t;
  const double d = zi - zj;
  return xi * xi / (xi * xi + d * d);
}

double phi_sharp(const CurveView& z, double xi, double s, double t) {
  if (xi == 0.0) return 2.0 * kernel_K(z.ds(s, t));
  return 2.0 * kernel_K(difference_quotient(z, s, xi, t));
}

double psi0(const CurveView& z0, const CurveView& z1, double xi, double s) {
  if (xi == 0.0) return 2.0 * kernel_K1(z0.ds(s, 0.0)) * z1.ds(s, 0.0);
  return 2.0 * kernel_K1(difference_quotient(z0, s, xi, 0.0)) * difference_quotient(z1, s, xi, 0.0);
}

WeightKernel constant_weight(double value) {
  return {[value](double, double) { return value; }, [](double, double) { return 0.0; },
          [value](double) { return value; }};
}

WeightKernel sharp_weight(const CurveView& z, double beta, double t) {
  WeightKernel w;
  w.phi = [&z, t](double xi, double s) { return phi_sharp(z, xi, s, t); };
  w.dphi_dxi = [&z, t](double xi, double s) {
    if (std::abs(xi) < 1e-3) {
      const double h = 1e-4;
      return (phi_sharp(z, xi + h, s, t) - phi_sharp(z, xi - h, s, t)) / (2.0 * h);
    }
    const double Z = difference_quotient(z, s, xi, t);
    const double dZ = (z.ds(s - xi, t) - Z) / xi;
    return 2.0 * kernel_K1(Z) * dZ;
  };
  const double limit = 2.0 / (1.0 + beta * beta);
  w.far = [limit](double) { return limit; };
  return w;
}

FarField farfield_decomposition(const WeightKernel& w, double xi, double s) {
  FarField f;
  f.limit = w.far(s);
  const double phi = w.phi(xi, s);
  f.bar = xi * (phi - f.limit);
  f.tilde = xi * w.dphi_dxi(xi, s) - phi;
  return f;
}

namespace {

std::vector<double> near_samples() {
  std::vector<double> out;
  for (int k = -40; k <= 40; ++k) out.push_back(k / 40.0);
  for (int j = 1; j <= 20; ++j) {
    out.push_back(std::ldexp(1.0, -j) * 0.75);
    out.push_back(-std::ldexp(1.0, -j) * 0.75);
  }
  return out;
}

std::vector<double> far_samples() {
  std::vector<double> out;
  for (int k = 1; k <= 80; ++k) {
    const double r = std::pow(10.0, k / 20.0);
    out.push_back(r);
    out.push_back(-r);
  }
  return out;
}

// j-th s-derivative of a two-variable function by nested central differences.
double ds_derivative(const std::function<double(double, double)>& f, int j, double xi, double s, double h) {
  switch (j) {
    case 0:
      return f(xi, s);
    case 1:
      return (f(xi, s + h) - f(xi, s - h)) / (2.0 * h);
    default:
      return (f(xi, s + h) - 2.0 * f(xi, s) + f(xi, s - h)) / (h * h);
  }
}

}  // namespace

WNormEstimate w_norm_estimate(const WeightKernel& w, int k, double alpha, const SamplingGrid& grid,
                              std::span<const double> shifts) {
  if (k < 0 || k > 2) throw std::invalid_argument("W-norm order k must be in 0..2");
  if (grid.size() == 0) throw std::invalid_argument("W-norm needs a non-empty grid");
  const double h = 1e-3;
  const auto near = near_samples();
  const auto far = far_samples();
  auto far_limit = [&](double, double s) { return w.far(s); };

  WNormEstimate est;
  double best = 0.0;
  for (int j = 0; j <= k; ++j) {
    double near_sup = 0.0, far_sup = 0.0;
    for (double s : grid.nodes()) {
      for (double xi : near) near_sup = std::max(near_sup, std::abs(ds_derivative(w.phi, j, xi, s, h)));
      for (double xi : far) {
        const double p = ds_derivative(w.phi, j, xi, s, h);
        const double pinf = ds_derivative(far_limit, j, xi, s, h);
        const double dp = ds_derivative(w.dphi_dxi, j, xi, s, h);
        far_sup = std::max(far_sup, std::abs(xi * (p - pinf)) + std::abs(xi * dp - p));
      }
    }
    if (j == 0) {
      est.near = near_sup;
      est.far = far_sup;
    }
    best = std::max(best, near_sup + far_sup);
  }
  if (k == 0) {
    est.total = best;
    return est;
  }
  double holder = 0.0, far_holder = 0.0;
  for (double s : grid.nodes()) {
    for (double d : shifts) {
      const double scale = std::pow(d, alpha);
      for (double xi : near) {
        const double v = ds_derivative(w.phi, k, xi, s, h);
        holder = std::max(holder, std::abs(ds_derivative(w.phi, k, xi, s - d, h) - v) / scale);
        holder = std::max(holder, std::abs(ds_derivative(w.phi, k, xi - d, s, h) - v) / scale);
      }
      for (double xi : far) {
        auto bar = [&](double x) {
          return xi * (ds_derivative(w.phi, k, xi, x, h) - ds_derivative(far_limit, k, xi, x, h));
        };
        auto tilde = [&](double x) {
          return xi * ds_derivative(w.dphi_dxi, k, xi, x, h) - ds_derivative(w.phi, k, xi, x, h);
        };
        far_holder =
            std::max(far_holder, (std::abs(bar(s - d) - bar(s)) + std::abs(tilde(s - d) - tilde(s))) / scale);
      }
    }
  }
  est.holder = holder + far_holder;
  est.total = best + est.holder;
  return est;
}

}  // namespace muskat
