#include "muskat/subsolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "muskat/operators.hpp"
#include "muskat/parallel.hpp"

namespace muskat {

namespace {

std::vector<double> strided(const std::vector<double>& nodes, int stride) {
  std::vector<double> out;
  const std::size_t step = static_cast<std::size_t>(std::max(stride, 1));
  for (std::size_t k = 0; k < nodes.size(); k += step) out.push_back(nodes[k]);
  if (out.back() != nodes.back()) out.push_back(nodes.back());
  return out;
}

double norm2(std::array<double, 2> v) { return std::hypot(v[0], v[1]); }

/// Ladder weight (2j-1)/(2N-1) of c_j for j >= 1.
double ladder_weight(int j, int N) { return (2.0 * j - 1.0) / (2.0 * N - 1.0); }

double layer_factor(int i, int N) {
  const double r = static_cast<double>(i) / N;
  return 1.0 - r * r;
}

}  // namespace

SubsolutionFields::SubsolutionFields(const PseudoInterface& pi, double t, FieldOptions opt)
    : pi_(pi), t_(t), opt_(std::move(opt)) {
  const MixingConfig& cfg = pi.config();
  if (!(t > 0.0) || t > cfg.T) throw std::out_of_range("subsolution fields need 0 < t <= T");
  limit_ = t < opt_.small_time_fraction * cfg.T;
  nodes_ = strided(pi.nodes(), opt_.stride);
  const int N = cfg.N;
  const auto idx = interface_indices(N);
  const auto rows = velocity_table(cfg, pi, nodes_, t, opt_.quad);
  const std::size_t n = nodes_.size();

  dtz_.resize(n);
  for (std::size_t k = 0; k < n; ++k) dtz_[k] = pi.dt(nodes_[k], t);
  for (std::size_t col = 0; col < idx.size(); ++col) {
    std::vector<double> u(n);
    for (std::size_t k = 0; k < n; ++k) u[k] = rows[k][col];
    u_.emplace_back(nodes_, std::move(u));
  }
  dtz_table_ = CubicSpline(nodes_, dtz_);

  // Node values of a_j^{+-} = c_j/N - (2j-1)/(2N^2) +- (d_t z - u^{(+-j)})/N.
  auto a_term = [&](int j, int sign, std::size_t k) {
    const double s = nodes_[k];
    const double cj = ladder_weight(j, N) * cfg.c(s);
    const double u = rows[k][slot(sign * j)];
    return cj / N - (2.0 * j - 1.0) / (2.0 * N * N) + sign * (dtz_[k] - u) / N;
  };

  std::vector<double> gp(n), gm(n), drift(n);
  for (std::size_t k = 0; k < n; ++k) {
    double sp = 0.0, sm = 0.0, mean = 0.0;
    for (int j = 1; j <= N; ++j) {
      sp += a_term(j, 1, k);
      sm += a_term(j, -1, k);
    }
    for (double u : rows[k]) mean += u;
    mean /= 2.0 * N;
    gp[k] = sp;
    gm[k] = sm;
    drift[k] = dtz_[k] - mean;
  }
  gplus_ = CubicSpline(nodes_, std::move(gp));
  gminus_ = CubicSpline(nodes_, std::move(gm));
  drift_ = CubicSpline(nodes_, std::move(drift));

  // d_{x1} g^{(+-i)} = [1 - (i/N)^2]^{-1} sum_{j > i} a_j^{+-}, i = 1..N-1.
  outer_.resize(2 * static_cast<std::size_t>(std::max(N - 1, 0)));
  for (int sign : {1, -1}) {
    for (int i = 1; i < N; ++i) {
      std::vector<double> g(n);
      for (std::size_t k = 0; k < n; ++k) {
        double sum = 0.0;
        for (int j = i + 1; j <= N; ++j) sum += a_term(j, sign, k);
        g[k] = sum / layer_factor(i, N);
      }
      outer_[outer_slot(sign * i)] = CubicSpline(nodes_, std::move(g));
    }
  }
}

std::size_t SubsolutionFields::slot(int i) const {
  const int N = pi_.config().N;
  if (i == 0 || std::abs(i) > N) throw std::out_of_range("interface index out of range");
  return static_cast<std::size_t>(i < 0 ? i + N : i + N - 1);
}

std::size_t SubsolutionFields::outer_slot(int i) const {
  const int N = pi_.config().N;
  if (i == 0 || std::abs(i) >= N) throw std::out_of_range("outer layer index out of range");
  return static_cast<std::size_t>(i < 0 ? i + N - 1 : i + N - 2);
}

void SubsolutionFields::check_range(double s) const {
  if (s < nodes_.front() || s > nodes_.back()) throw std::out_of_range("abscissa outside the tabulated window");
}

double SubsolutionFields::velocity(int i, double s) const {
  check_range(s);
  return u_[slot(i)].value(s);
}

double SubsolutionFields::h_coeff(int i, double s) const {
  check_range(s);
  const MixingConfig& cfg = pi_.config();
  const int N = cfg.N;
  const int j = std::abs(i);
  const int sign = i > 0 ? 1 : -1;
  const double cj = ladder_weight(j, N) * cfg.c(s);
  const double a = cj / N - (2.0 * j - 1.0) / (2.0 * N * N) + sign * (dtz_table_.value(s) - velocity(i, s)) / N;
  return a / layer_factor(j - 1, N);
}

double SubsolutionFields::g_gradient_outer(int i, double s) const {
  check_range(s);
  const int N = pi_.config().N;
  if (i == 0 || std::abs(i) > N) throw std::out_of_range("outer layer index out of range");
  if (std::abs(i) == N) return 0.0;
  return outer_[outer_slot(i)].value(s);
}

double SubsolutionFields::g_outer(int i, double s) const {
  check_range(s);
  const int N = pi_.config().N;
  if (i == 0 || std::abs(i) > N) throw std::out_of_range("outer layer index out of range");
  if (std::abs(i) == N) return 0.0;
  const CubicSpline& g = outer_[outer_slot(i)];
  return g.integral(s) - g.integral(0.0);
}

double SubsolutionFields::limit_gradient(double s) const {
  const int N = pi_.config().N;
  return -0.5 + pi_.config().c(s) * N / (2.0 * N - 1.0);
}

GHat SubsolutionFields::ghat(double s, double lambda) const {
  check_range(s);
  if (lambda < -1.0 || lambda > 1.0) throw std::out_of_range("lambda outside [-1, 1]");
  const MixingConfig& cfg = pi_.config();
  GHat out;
  const double up = gplus_.integral(s) - gplus_.integral(0.0);
  const double down = gminus_.integral(s) - gminus_.integral(0.0);
  out.value = 0.5 * (1.0 + lambda) * up + 0.5 * (1.0 - lambda) * down;
  out.dlambda = drift_.integral(s) - drift_.integral(0.0);
  out.ds = 0.5 * (1.0 + lambda) * gplus_.value(s) + 0.5 * (1.0 - lambda) * gminus_.value(s);
  if (limit_) {
    out.grad = {limit_gradient(s), 0.0};
    return out;
  }
  const double c1 = speed_ladder(cfg, 1, s);
  const double dc1 = speed_ladder_ds(cfg, 1, s);
  const double dx2 = out.dlambda / (c1 * t_);
  out.grad = {out.ds - (pi_.ds(s, t_) + lambda * t_ * dc1) * dx2, dx2};
  return out;
}

double SubsolutionFields::lambda_of(std::array<double, 2> x) const {
  const double c1 = speed_ladder(pi_.config(), 1, x[0]);
  return std::clamp((x[1] - pi_.value(x[0], t_)) / (c1 * t_), -1.0, 1.0);
}

double SubsolutionFields::layer_potential(int layer, std::array<double, 2> x) const {
  if (layer == 0) return ghat(x[0], lambda_of(x)).value;
  return g_outer(layer, x[0]);
}

std::array<double, 2> SubsolutionFields::layer_gradient(int layer, std::array<double, 2> x) const {
  if (layer == 0) return ghat(x[0], lambda_of(x)).grad;
  return {g_gradient_outer(layer, x[0]), 0.0};
}

void SubsolutionFields::check_proximity(std::array<double, 2> x) const {
  const MixingConfig& cfg = pi_.config();
  const double d = x[1] - pi_.value(x[0], t_);
  for (int j : interface_indices(cfg.N)) {
    if (std::abs(d - speed_ladder(cfg, j, x[0]) * t_) < opt_.guard) {
      std::ostringstream msg;
      msg << "point (" << x[0] << ", " << x[1] << ") lies within " << opt_.guard << " of interface " << j;
      throw ProximityError(msg.str());
    }
  }
}

RegionLabel SubsolutionFields::classify(std::array<double, 2> x) const { return pi_.classify_point(x, t_); }

double SubsolutionFields::rho(std::array<double, 2> x) const { return pi_.density_rho(x, t_); }

std::array<double, 2> SubsolutionFields::gamma(std::array<double, 2> x) const {
  check_proximity(x);
  const RegionLabel label = classify(x);
  if (label.kind != RegionLabel::Kind::layer) return {0.0, 0.0};
  const auto g = layer_gradient(label.index, x);
  return {-g[1], g[0]};
}

std::array<double, 2> SubsolutionFields::m_field(std::array<double, 2> x, std::array<double, 2> u) const {
  const auto gm = gamma(x);
  const double r = rho(x);
  const double w = 1.0 - r * r;
  return {r * u[0] - w * gm[0], r * u[1] - w * (gm[1] + 0.5)};
}

double SubsolutionFields::strict_margin(std::array<double, 2> x) const {
  const double r = rho(x);
  const double w = 1.0 - r * r;
  const auto m = m_field(x, {0.0, 0.0});
  return 0.5 * w - std::hypot(m[0], m[1] + 0.5 * w);
}

double SubsolutionFields::jump_residual(int i, double s) const {
  const int N = pi_.config().N;
  const int j = std::abs(i);
  const int sign = i > 0 ? 1 : -1;
  if (j == 0 || j > N) throw std::out_of_range("interface index out of range");
  check_range(s);
  // Centered differences of the potentials restricted to the interface.
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), s);
  const std::size_t k = std::clamp<std::size_t>(static_cast<std::size_t>(it - nodes_.begin()), 1, nodes_.size() - 1);
  const double step = 0.01 * (nodes_[k] - nodes_[k - 1]);
  const double lo = std::max(s - step, nodes_.front());
  const double hi = std::min(s + step, nodes_.back());
  auto below = [&](double x) {
    if (j == 1) return ghat(x, static_cast<double>(sign)).value;
    return g_outer(sign * (j - 1), x);
  };
  auto above = [&](double x) { return g_outer(sign * j, x); };
  const double d_below = (below(hi) - below(lo)) / (hi - lo);
  const double d_above = (above(hi) - above(lo)) / (hi - lo);
  const double ratio = layer_factor(j, N) / layer_factor(j - 1, N);
  return std::abs(d_below - h_coeff(i, s) - ratio * d_above);
}

SubsolutionFields::Hypotheses SubsolutionFields::hypothesis_residuals(double window) const {
  const MixingConfig& cfg = pi_.config();
  Hypotheses out;
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    const double s = nodes_[k];
    if (std::abs(s) > window) continue;
    const double c = cfg.c(s);
    for (std::size_t col = 0; col < u_.size(); ++col)
      out.r1 = std::max(out.r1, std::abs(dtz_[k] - u_[col].values()[k]) / c);
    const double integral = drift_.integral(s) - drift_.integral(0.0);
    out.r2 = std::max(out.r2, std::abs(integral) / (t_ * std::pow(c, 1.5)));
    out.r3 = std::max(out.r3, std::max(std::abs(pi_.ds(s, t_)), std::abs(cfg.c.derivative(1, s))) / std::sqrt(c));
  }
  return out;
}

// ---------------------------------------------------------------------------
// certification

LadderRow evaluate_time(const PseudoInterface& pi, double t, const CertifyOptions& opt) {
  const SubsolutionFields fields(pi, t, opt.fields);
  const MixingConfig& cfg = pi.config();
  const int N = cfg.N;
  LadderRow row;
  row.t = t;
  row.min_margin = std::numeric_limits<double>::infinity();

  std::vector<double> probes(static_cast<std::size_t>(opt.probe_points));
  for (int k = 0; k < opt.probe_points; ++k)
    probes[static_cast<std::size_t>(k)] =
        opt.probe_points == 1 ? 0.0 : -opt.probe_window + 2.0 * opt.probe_window * k / (opt.probe_points - 1);

  auto record = [&](double margin, double s, double x2, int layer) {
    if (margin < row.min_margin) {
      row.min_margin = margin;
      row.worst_s = s;
      row.worst_x2 = x2;
      row.worst_layer = layer;
    }
  };

  for (double s : probes) {
    const double limit = fields.limit_gradient(s);
    const double z = pi.value(s, t);
    const double c1 = speed_ladder(cfg, 1, s);
    const double sqrt_c = std::sqrt(cfg.c(s));
    for (double lambda : opt.lambdas) {
      const GHat g = fields.ghat(s, lambda);
      record(0.5 - norm2(g.grad), s, z + lambda * c1 * t, 0);
      row.limit_deviation = std::max(row.limit_deviation, std::abs(g.grad[0] - limit));
      row.max_dx2_g0_over_sqrt_c = std::max(row.max_dx2_g0_over_sqrt_c, std::abs(g.grad[1]) / sqrt_c);
    }
    for (int i = 1; i < N; ++i) {
      for (int sign : {1, -1}) {
        const double g = fields.g_gradient_outer(sign * i, s);
        const double lo = speed_ladder(cfg, sign * i, s), hi = speed_ladder(cfg, sign * (i + 1), s);
        record(layer_factor(i, N) * (0.5 - std::abs(g)), s, z + 0.5 * (lo + hi) * t, sign * i);
        row.limit_deviation = std::max(row.limit_deviation, std::abs(g - limit));
      }
    }
    for (int j : interface_indices(N)) row.jump_max = std::max(row.jump_max, fields.jump_residual(j, s));
  }
  const auto hyp = fields.hypothesis_residuals(opt.residual_window);
  row.r1 = hyp.r1;
  row.r2 = hyp.r2;
  row.r3 = hyp.r3;
  row.margin_ok = row.min_margin > opt.safety;
  row.jump_ok = row.jump_max < opt.jump_tol;
  return row;
}

namespace {

bool strictly_decreasing_towards_zero(const std::vector<LadderRow>& ascending, double LadderRow::*field) {
  for (std::size_t k = 1; k < ascending.size(); ++k)
    if (!(ascending[k - 1].*field < ascending[k].*field)) return false;
  return true;
}

std::string describe_failure(const LadderRow& row, double safety, double jump_tol) {
  std::ostringstream msg;
  msg.precision(6);
  if (!row.margin_ok)
    msg << "margin " << row.min_margin << " <= " << safety << " at t=" << row.t << ", s=" << row.worst_s
        << ", x2=" << row.worst_x2 << ", layer " << row.worst_layer;
  else
    msg << "jump residual " << row.jump_max << " >= " << jump_tol << " at t=" << row.t;
  return msg.str();
}

}  // namespace

AdmissibilityReport certify_admissibility(const PseudoInterface& pi, const CertifyOptions& opt) {
  if (opt.levels < 2) throw std::invalid_argument("certification needs at least two ladder levels");
  const double T = pi.config().T;
  AdmissibilityReport rep;
  rep.jump_conditions = 2 * pi.config().N;

  for (int k = opt.levels - 1; k >= 0; --k) rep.ladder.push_back(evaluate_time(pi, std::ldexp(T, -k), opt));

  // A time is accepted when margins and jumps pass and r1, r2 still grow with t,
  // i.e. stay inside the monotone envelope of the smaller ladder times.
  auto local_ok = [](const LadderRow& r) { return r.margin_ok && r.jump_ok; };
  auto grows_from = [](const LadderRow& prev, const LadderRow& r) { return r.r1 > prev.r1 && r.r2 > prev.r2; };
  std::size_t good = 0;
  while (good < rep.ladder.size() && local_ok(rep.ladder[good]) &&
         (good == 0 || grows_from(rep.ladder[good - 1], rep.ladder[good])))
    ++good;
  if (good == 0) {
    rep.failure = describe_failure(rep.ladder.front(), opt.safety, opt.jump_tol);
    rep.limit_deviation = rep.ladder.front().limit_deviation;
    return rep;
  }

  LadderRow last = rep.ladder[good - 1];
  if (good < rep.ladder.size()) {
    double lo = last.t, hi = rep.ladder[good].t;
    for (int it = 0; it < opt.bisection_steps; ++it) {
      const double mid = std::sqrt(lo * hi);
      LadderRow row = evaluate_time(pi, mid, opt);
      rep.bisection.push_back(row);
      if (local_ok(row) && grows_from(last, row)) {
        lo = mid;
        last = row;
      } else {
        hi = mid;
      }
    }
  }
  rep.t_star = last.t;
  rep.margin_at_t_star = last.min_margin;
  rep.half = evaluate_time(pi, 0.5 * rep.t_star, opt);
  rep.margin_at_half = rep.half.min_margin;

  const std::vector<LadderRow> accepted(rep.ladder.begin(), rep.ladder.begin() + static_cast<std::ptrdiff_t>(good));
  std::vector<double> ts, r1, r2;
  for (const auto& r : accepted) {
    rep.jump_max = std::max(rep.jump_max, r.jump_max);
    rep.M = std::max(rep.M, r.r3);
    ts.push_back(r.t);
    r1.push_back(r.r1);
    r2.push_back(r.r2);
  }
  rep.limit_deviation = accepted.front().limit_deviation;
  rep.r1_decreasing = strictly_decreasing_towards_zero(accepted, &LadderRow::r1);
  rep.r2_decreasing = strictly_decreasing_towards_zero(accepted, &LadderRow::r2);
  if (accepted.size() >= 2) {
    rep.r1_slope = loglog_slope(ts, r1);
    rep.r2_slope = loglog_slope(ts, r2);
  }
  rep.certified = rep.half.margin_ok && rep.half.jump_ok && rep.r1_decreasing && rep.r2_decreasing;
  if (!rep.certified) {
    if (!rep.r1_decreasing || !rep.r2_decreasing)
      rep.failure = "hypothesis residuals are not decreasing along the accepted ladder";
    else
      rep.failure = describe_failure(rep.half, opt.safety, opt.jump_tol);
  }
  return rep;
}

}  // namespace muskat
