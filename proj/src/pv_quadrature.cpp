#include "muskat/pv_quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace muskat {

namespace {

// Gauss-Kronrod 15/7 nodes on [-1, 1] (non-negative half) and weights.
constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.0};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss-7 weights at kXgk[1], kXgk[3], kXgk[5], kXgk[7].
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr double kEps = std::numeric_limits<double>::epsilon();

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

/// Vector integrand on a half-line coordinate eta > 0 (already folded if needed).
class Evaluator {
 public:
  Evaluator(const VecIntegrand& g, std::size_t dim, double center, bool fold, int direction = 1)
      : g_(g), dim_(dim), center_(center), fold_(fold), direction_(direction), buf_(dim) {}

  std::size_t dim() const { return dim_; }
  /// Smallest panel width that still resolves distinct abscissae near eta.
  double min_width(double eta) const { return 1024.0 * kEps * (std::abs(center_) + std::abs(eta)); }
  long evaluations() const { return evaluations_; }

  void operator()(double eta, std::span<double> out) {
    if (fold_) {
      // Round the offset so that center +- offset are both exact; the pair then
      // stays antisymmetric after the caller subtracts the centre.
      const double ac = std::abs(center_);
      const double offset = (ac + eta) - ac;
      g_(center_ + offset, out);
      g_(center_ - offset, buf_);
      evaluations_ += 2;
      for (std::size_t c = 0; c < dim_; ++c) out[c] += buf_[c];
    } else {
      g_(center_ + direction_ * eta, out);
      ++evaluations_;
    }
    for (std::size_t c = 0; c < dim_; ++c) {
      if (!std::isfinite(out[c])) {
        std::ostringstream msg;
        msg << "integrand returned a non-finite value near xi = " << center_ + direction_ * eta;
        throw QuadratureError(msg.str());
      }
    }
  }

 private:
  const VecIntegrand& g_;
  std::size_t dim_;
  double center_;
  bool fold_;
  int direction_;
  std::vector<double> buf_;
  long evaluations_ = 0;
};

struct Panel {
  double a = 0.0;
  double b = 0.0;
  int depth = 0;
  double err = 0.0;
  double abs_mass = 0.0;
  std::vector<double> val;
};

void gk15(Evaluator& f, Panel& p) {
  const std::size_t dim = f.dim();
  const double c = 0.5 * (p.a + p.b), h = 0.5 * (p.b - p.a);
  std::vector<double> fc(dim), f1(dim), f2(dim), kron(dim, 0.0), gauss(dim, 0.0);
  double mass = 0.0;
  f(c, fc);
  for (std::size_t d = 0; d < dim; ++d) {
    kron[d] = kWgk[7] * fc[d];
    gauss[d] = kWg[3] * fc[d];
    mass += kWgk[7] * std::abs(fc[d]);
  }
  for (int k = 0; k < 7; ++k) {
    const double dx = h * kXgk[k];
    f(c - dx, f1);
    f(c + dx, f2);
    for (std::size_t d = 0; d < dim; ++d) {
      kron[d] += kWgk[k] * (f1[d] + f2[d]);
      if (k % 2 == 1) gauss[d] += kWg[k / 2] * (f1[d] + f2[d]);
      mass += kWgk[k] * (std::abs(f1[d]) + std::abs(f2[d]));
    }
  }
  p.val.resize(dim);
  double err = 0.0;
  for (std::size_t d = 0; d < dim; ++d) {
    p.val[d] = kron[d] * h;
    err = std::max(err, std::abs((kron[d] - gauss[d]) * h));
  }
  p.abs_mass = mass * h;
  p.err = err;
}

struct RegionResult {
  std::vector<double> value;
  double error = 0.0;
};

/// Fixed-layout refinement of an initial panel list. Pieces are at most fixed_width
/// wide inside r0 and a sixteenth of their distance from the origin beyond it.
std::vector<std::pair<double, double>> fixed_layout(const std::vector<std::pair<double, double>>& initial,
                                                    const QuadSpec& spec) {
  std::vector<std::pair<double, double>> out;
  for (const auto& [a, b] : initial) {
    const double width = b - a;
    const double near = a <= 0.0 && b >= 0.0 ? 0.0 : std::min(std::abs(a), std::abs(b));
    const double limit = near < spec.r0 ? spec.fixed_width : std::max(spec.fixed_width, near / 16.0);
    const int pieces = std::max(spec.fixed_split, static_cast<int>(std::ceil(width / limit)));
    for (int k = 0; k < pieces; ++k) out.emplace_back(a + width * k / pieces, k + 1 == pieces ? b : a + width * (k + 1) / pieces);
  }
  return out;
}

/// Global adaptive bisection over an initial panel set, in the max-norm.
RegionResult adaptive(Evaluator& f, const std::vector<std::pair<double, double>>& initial_panels, const QuadSpec& spec,
                      double tol_scale = 0.0) {
  const std::size_t dim = f.dim();
  const auto initial = spec.adaptive ? initial_panels : fixed_layout(initial_panels, spec);
  std::vector<Panel> panels;
  panels.reserve(initial.size() + 64);
  for (const auto& [a, b] : initial) {
    if (!(b > a)) continue;
    Panel p;
    p.a = a;
    p.b = b;
    gk15(f, p);
    panels.push_back(std::move(p));
  }
  auto by_err = [&](std::size_t x, std::size_t y) {
    if (panels[x].err != panels[y].err) return panels[x].err < panels[y].err;
    return x > y;
  };
  std::vector<std::size_t> heap(panels.size());
  for (std::size_t k = 0; k < heap.size(); ++k) heap[k] = k;
  std::make_heap(heap.begin(), heap.end(), by_err);

  std::vector<double> total(dim, 0.0);
  while (true) {
    std::fill(total.begin(), total.end(), 0.0);
    double err = 0.0, mass = 0.0;
    for (const auto& p : panels) {
      for (std::size_t d = 0; d < dim; ++d) total[d] += p.val[d];
      err += p.err;
      mass += p.abs_mass;
    }
    const double tol = std::max({spec.abs_tol, spec.rel_tol * std::max(max_abs(total), tol_scale), 64.0 * kEps * mass});
    if (err <= tol || !spec.adaptive) return {total, err};
    if (heap.empty() || static_cast<int>(panels.size()) >= spec.max_panels) {
      std::ostringstream msg;
      msg << "adaptive quadrature did not converge: error " << err << " > tolerance " << tol << " with "
          << panels.size() << " panels";
      throw QuadratureError(msg.str());
    }
    std::pop_heap(heap.begin(), heap.end(), by_err);
    const std::size_t worst = heap.back();
    heap.pop_back();
    const Panel parent = panels[worst];
    const double mid = 0.5 * (parent.a + parent.b);
    if (parent.depth >= spec.max_depth || parent.b - parent.a < f.min_width(parent.b)) {
      // Cannot refine further; keep its contribution and let the remaining panels try.
      continue;
    }
    Panel left{parent.a, mid, parent.depth + 1, 0.0, 0.0, {}};
    Panel right{mid, parent.b, parent.depth + 1, 0.0, 0.0, {}};
    gk15(f, left);
    gk15(f, right);
    panels[worst] = std::move(left);
    panels.push_back(std::move(right));
    heap.push_back(worst);
    std::push_heap(heap.begin(), heap.end(), by_err);
    heap.push_back(panels.size() - 1);
    std::push_heap(heap.begin(), heap.end(), by_err);
  }
}

/// Geometric panels [r q^{-(k+1)}, r q^{-k}] down to the grading floor, plus [0, floor].
std::vector<std::pair<double, double>> graded_panels(double lo, double hi, int levels, double ratio) {
  std::vector<std::pair<double, double>> out;
  double b = hi;
  for (int k = 0; k < levels; ++k) {
    const double a = b / ratio;
    if (a <= lo) break;
    out.emplace_back(a, b);
    b = a;
  }
  out.emplace_back(lo, b);
  std::reverse(out.begin(), out.end());
  return out;
}

int grading_levels(double radius, double center, const QuadSpec& spec) {
  if (!spec.adaptive) {
    const double levels = std::ceil(std::log(radius / spec.fixed_floor) / std::log(spec.grading_ratio));
    return static_cast<int>(std::clamp(levels, 1.0, 60.0));
  }
  const double floor_width = std::max({std::pow(spec.alpha * spec.abs_tol, 1.0 / spec.alpha), radius * 1e-12,
                                       std::abs(center) * 1e-10});
  const double levels = std::ceil(std::log(radius / floor_width) / std::log(spec.grading_ratio));
  return static_cast<int>(std::clamp(levels, 1.0, 60.0));
}

/// Tail \int_{start}^{inf} with doubling panels and geometric extrapolation of the remainder.
RegionResult tail_doubling(Evaluator& f, double start, const QuadSpec& spec, std::span<const double> scale_hint) {
  const std::size_t dim = f.dim();
  std::vector<double> total(dim, 0.0), prev_inc(dim, 0.0), inc(dim), extrap(dim), prev_extrap(dim, 0.0);
  double err = 0.0;
  double radius = start;
  const double hint = max_abs(scale_hint);
  for (int k = 1; k <= spec.max_doublings; ++k) {
    const RegionResult piece = adaptive(f, {{radius, 2.0 * radius}}, spec, std::max(hint, max_abs(total)));
    err += piece.error;
    for (std::size_t d = 0; d < dim; ++d) {
      inc[d] = piece.value[d];
      total[d] += inc[d];
      double rem = 0.0;
      if (k >= 2 && prev_inc[d] != 0.0) {
        const double r = inc[d] / prev_inc[d];
        if (r > 0.0 && r < 0.9) rem = inc[d] * r / (1.0 - r);
      }
      extrap[d] = total[d] + rem;
    }
    if (!spec.adaptive) {
      if (k == spec.max_doublings) return {extrap, err + max_abs(inc)};
    } else if (k >= 2) {
      double change = 0.0;
      for (std::size_t d = 0; d < dim; ++d) change = std::max(change, std::abs(extrap[d] - prev_extrap[d]));
      const double tol = std::max(spec.abs_tol, spec.rel_tol * std::max(hint, max_abs(extrap)));
      if (change <= tol) return {extrap, err + change};
    }
    prev_inc = inc;
    prev_extrap = extrap;
    radius *= 2.0;
  }
  std::ostringstream msg;
  msg << "tail did not settle after " << spec.max_doublings << " radius doublings (R = " << radius << ")";
  throw QuadratureError(msg.str());
}

VecQuadResult fold_full_line(const VecIntegrand& g, std::size_t dim, double center, const QuadSpec& spec,
                             bool graded) {
  Evaluator f(g, dim, center, true);
  const int levels = graded ? grading_levels(spec.r0, center, spec) : 5;
  RegionResult near = adaptive(f, graded_panels(0.0, spec.r0, levels, spec.grading_ratio), spec);
  RegionResult tail = tail_doubling(f, spec.r0, spec, near.value);
  VecQuadResult out;
  out.value.resize(dim);
  for (std::size_t d = 0; d < dim; ++d) out.value[d] = near.value[d] + tail.value[d];
  out.error_estimate = near.error + tail.error;
  out.evaluations = f.evaluations();
  return out;
}

VecIntegrand lift(const Integrand& f) {
  return [&f](double x, std::span<double> out) { out[0] = f(x); };
}

}  // namespace

void QuadSpec::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw std::invalid_argument("quadrature tolerances must be positive");
  if (!(r0 > 0.0)) throw std::invalid_argument("quadrature r0 must be positive");
  if (max_doublings < 2) throw std::invalid_argument("quadrature max_doublings must be >= 2");
  if (!(grading_ratio > 1.0)) throw std::invalid_argument("quadrature grading_ratio must exceed 1");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("quadrature alpha must lie in (0, 1]");
  if (max_depth < 1) throw std::invalid_argument("quadrature max_depth must be >= 1");
  if (max_panels < 16) throw std::invalid_argument("quadrature max_panels must be >= 16");
  if (!(fixed_floor > 0.0) || !(fixed_width > 0.0) || fixed_split < 1)
    throw std::invalid_argument("quadrature fixed layout parameters must be positive");
}

VecQuadResult pv_integrate(const VecIntegrand& f, std::size_t dim, double center, const QuadSpec& spec) {
  spec.validate();
  return fold_full_line(f, dim, center, spec, true);
}

QuadResult pv_integrate(const Integrand& f, std::span<const double> singularities, const QuadSpec& spec) {
  spec.validate();
  std::vector<double> pts(singularities.begin(), singularities.end());
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const VecIntegrand g = lift(f);
  if (pts.size() <= 1) {
    const VecQuadResult r = fold_full_line(g, 1, pts.empty() ? 0.0 : pts.front(), spec, !pts.empty());
    return {r.value[0], r.error_estimate, r.evaluations};
  }

  QuadResult out;
  const std::size_t n = pts.size();
  std::vector<double> radius(n);
  for (std::size_t k = 0; k < n; ++k) {
    double gap = std::numeric_limits<double>::infinity();
    if (k > 0) gap = std::min(gap, pts[k] - pts[k - 1]);
    if (k + 1 < n) gap = std::min(gap, pts[k + 1] - pts[k]);
    radius[k] = 0.5 * gap;
  }
  for (std::size_t k = 0; k < n; ++k) {
    Evaluator f_near(g, 1, pts[k], true);
    const RegionResult r =
        adaptive(f_near, graded_panels(0.0, radius[k], grading_levels(radius[k], pts[k], spec), spec.grading_ratio), spec);
    out.value += r.value[0];
    out.error_estimate += r.error;
    out.evaluations += f_near.evaluations();
    if (k + 1 < n) {
      const double a = pts[k] + radius[k], b = pts[k + 1] - radius[k + 1];
      if (b > a) {
        Evaluator f_gap(g, 1, 0.0, false);
        const RegionResult q = adaptive(f_gap, {{a, b}}, spec);
        out.value += q.value[0];
        out.error_estimate += q.error;
        out.evaluations += f_gap.evaluations();
      }
    }
  }
  const double a = pts.front() - radius.front(), b = pts.back() + radius.back();
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  Evaluator f_out(g, 1, mid, true);
  const double outer = half + spec.r0;
  const RegionResult near = adaptive(f_out, {{half, outer}}, spec);
  const RegionResult tail = tail_doubling(f_out, outer, spec, near.value);
  out.value += near.value[0] + tail.value[0];
  out.error_estimate += near.error + tail.error;
  out.evaluations += f_out.evaluations();
  return out;
}

QuadResult integrate_halfline(const Integrand& f, double endpoint, int direction, const QuadSpec& spec) {
  spec.validate();
  if (direction != 1 && direction != -1) throw std::invalid_argument("half-line direction must be +1 or -1");
  const VecIntegrand g = lift(f);
  Evaluator ev(g, 1, endpoint, false, direction);
  const RegionResult near = adaptive(ev, graded_panels(0.0, spec.r0, 5, 2.0), spec);
  const RegionResult tail = tail_doubling(ev, spec.r0, spec, near.value);
  return {near.value[0] + tail.value[0], near.error + tail.error, ev.evaluations()};
}

QuadResult integrate_interval(const Integrand& f, double a, double b, const QuadSpec& spec) {
  spec.validate();
  if (a == b) return {};
  const double sign = b > a ? 1.0 : -1.0;
  const VecIntegrand g = lift(f);
  Evaluator ev(g, 1, 0.0, false);
  const RegionResult r = adaptive(ev, {{std::min(a, b), std::max(a, b)}}, spec);
  return {sign * r.value[0], r.error, ev.evaluations()};
}

}  // namespace muskat
