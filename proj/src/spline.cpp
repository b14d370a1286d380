#include "muskat/spline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace muskat {

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n) throw std::invalid_argument("spline needs matching node and value arrays of size >= 2");
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (!(x_[k + 1] > x_[k])) throw std::invalid_argument("spline nodes must be strictly increasing");
  }
  m_.assign(n, 0.0);
  if (n >= 4) {
    std::vector<double> h(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) h[k] = x_[k + 1] - x_[k];
    // Unknowns M_1..M_{n-2}; M_0 and M_{n-1} are eliminated by the not-a-knot conditions.
    const std::size_t m = n - 2;
    std::vector<double> lo(m, 0.0), di(m, 0.0), up(m, 0.0), rhs(m, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
      const std::size_t i = r + 1;
      lo[r] = h[i - 1];
      di[r] = 2.0 * (h[i - 1] + h[i]);
      up[r] = h[i];
      rhs[r] = 6.0 * ((y_[i + 1] - y_[i]) / h[i] - (y_[i] - y_[i - 1]) / h[i - 1]);
    }
    const double h0 = h[0], h1 = h[1];
    const double ha = h[n - 3], hb = h[n - 2];
    if (m == 2) {
      // n == 4: the spline is the interpolating cubic; solve the 2x2 system directly.
      const double a11 = 3.0 * h0 + 2.0 * h1 + h0 * h0 / h1, a12 = h1 - h0 * h0 / h1;
      const double a21 = ha - hb * hb / ha, a22 = 2.0 * ha + 3.0 * hb + hb * hb / ha;
      const double det = a11 * a22 - a12 * a21;
      m_[1] = (rhs[0] * a22 - a12 * rhs[1]) / det;
      m_[2] = (a11 * rhs[1] - a21 * rhs[0]) / det;
    } else {
      di[0] = 3.0 * h0 + 2.0 * h1 + h0 * h0 / h1;
      up[0] = h1 - h0 * h0 / h1;
      lo[m - 1] = ha - hb * hb / ha;
      di[m - 1] = 2.0 * ha + 3.0 * hb + hb * hb / ha;
      for (std::size_t r = 1; r < m; ++r) {
        const double w = lo[r] / di[r - 1];
        di[r] -= w * up[r - 1];
        rhs[r] -= w * rhs[r - 1];
      }
      m_[m] = rhs[m - 1] / di[m - 1];
      for (std::size_t r = m - 1; r-- > 0;) m_[r + 1] = (rhs[r] - up[r] * m_[r + 2]) / di[r];
    }
    m_[0] = m_[1] + h0 * (m_[1] - m_[2]) / h1;
    m_[n - 1] = m_[n - 2] + hb * (m_[n - 2] - m_[n - 3]) / ha;
  } else if (n == 3) {
    // Single parabola through three points.
    const double d0 = (y_[1] - y_[0]) / (x_[1] - x_[0]);
    const double d1v = (y_[2] - y_[1]) / (x_[2] - x_[1]);
    const double curv = 2.0 * (d1v - d0) / (x_[2] - x_[0]);
    m_.assign(3, curv);
  }
  cumulative_.assign(n, 0.0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double hk = x_[k + 1] - x_[k];
    cumulative_[k + 1] = cumulative_[k] + 0.5 * hk * (y_[k] + y_[k + 1]) - hk * hk * hk / 24.0 * (m_[k] + m_[k + 1]);
  }
}

int CubicSpline::segment(double s) const {
  const int n = static_cast<int>(x_.size());
  if (s <= x_[1]) return 0;
  if (s >= x_[n - 2]) return n - 2;
  const auto it = std::upper_bound(x_.begin(), x_.end(), s);
  return static_cast<int>(it - x_.begin()) - 1;
}

double CubicSpline::value(double s) const {
  const auto k = static_cast<std::size_t>(segment(s));
  const double h = x_[k + 1] - x_[k];
  const double a = (x_[k + 1] - s) / h, b = (s - x_[k]) / h;
  return a * y_[k] + b * y_[k + 1] + ((a * a * a - a) * m_[k] + (b * b * b - b) * m_[k + 1]) * h * h / 6.0;
}

double CubicSpline::d1(double s) const {
  const auto k = static_cast<std::size_t>(segment(s));
  const double h = x_[k + 1] - x_[k];
  const double a = (x_[k + 1] - s) / h, b = (s - x_[k]) / h;
  return (y_[k + 1] - y_[k]) / h - (3.0 * a * a - 1.0) / 6.0 * h * m_[k] + (3.0 * b * b - 1.0) / 6.0 * h * m_[k + 1];
}

double CubicSpline::d2(double s) const {
  const auto k = static_cast<std::size_t>(segment(s));
  const double h = x_[k + 1] - x_[k];
  const double a = (x_[k + 1] - s) / h, b = (s - x_[k]) / h;
  return a * m_[k] + b * m_[k + 1];
}

double CubicSpline::integral(double s) const {
  const auto k = static_cast<std::size_t>(segment(s));
  const double h = x_[k + 1] - x_[k];
  const double a = (x_[k + 1] - s) / h, b = (s - x_[k]) / h;
  const double a2 = a * a, b2 = b * b;
  return cumulative_[k] + h * (0.5 * y_[k] * (1.0 - a2) + 0.5 * y_[k + 1] * b2) +
         h * h * h / 6.0 * (m_[k] * (-0.25 - 0.25 * a2 * a2 + 0.5 * a2) + m_[k + 1] * (0.25 * b2 * b2 - 0.5 * b2));
}

// ---------------------------------------------------------------------------

TabulatedFunction::TabulatedFunction(std::vector<double> x, std::vector<double> y, double p_min, double p_max)
    : spline_(std::move(x), std::move(y)) {
  const double xl = spline_.front(), xr = spline_.back();
  if (!(xl < 0.0 && xr > 0.0)) throw std::invalid_argument("tabulation window must contain the origin");
  left_ = fit_tail(-xl, spline_.value(xl), -spline_.d1(xl), p_min, p_max);
  right_ = fit_tail(xr, spline_.value(xr), spline_.d1(xr), p_min, p_max);
}

TabulatedFunction::Tail TabulatedFunction::fit_tail(double edge, double value, double slope_outward, double p_min,
                                                    double p_max) {
  Tail tail;
  tail.edge = edge;
  tail.value = value;
  tail.p = p_min;
  if (value != 0.0) {
    // value * (edge/r)^p has outward log-slope -p/edge.
    const double p = -edge * slope_outward / value;
    if (std::isfinite(p)) tail.p = std::clamp(p, p_min, p_max);
  }
  return tail;
}

double TabulatedFunction::value(double s) const {
  if (s < spline_.front()) return left_.value * std::pow(left_.edge / -s, left_.p);
  if (s > spline_.back()) return right_.value * std::pow(right_.edge / s, right_.p);
  return spline_.value(s);
}

double TabulatedFunction::d1(double s) const {
  if (s < spline_.front()) return left_.p / -s * left_.value * std::pow(left_.edge / -s, left_.p);
  if (s > spline_.back()) return -right_.p / s * right_.value * std::pow(right_.edge / s, right_.p);
  return spline_.d1(s);
}

double TabulatedFunction::d2(double s) const {
  if (s < spline_.front()) return left_.p * (left_.p + 1.0) / (s * s) * left_.value * std::pow(left_.edge / -s, left_.p);
  if (s > spline_.back())
    return right_.p * (right_.p + 1.0) / (s * s) * right_.value * std::pow(right_.edge / s, right_.p);
  return spline_.d2(s);
}

namespace {
// \int_edge^r value (edge/u)^p du for r >= edge.
double tail_mass(double edge, double value, double p, double r) {
  if (value == 0.0) return 0.0;
  if (std::isinf(r)) {
    if (!(p > 1.0)) throw std::domain_error("tail is not integrable");
    return value * edge / (p - 1.0);
  }
  if (p == 1.0) return value * edge * std::log(r / edge);
  return value * edge / (p - 1.0) * (1.0 - std::pow(edge / r, p - 1.0));
}
}  // namespace

double TabulatedFunction::integral(double a, double b) const {
  if (a > b) return -integral(b, a);
  // Antiderivative normalised to vanish at the left window edge.
  auto F = [&](double x) {
    if (x < spline_.front()) return -tail_mass(left_.edge, left_.value, left_.p, -x);
    if (x > spline_.back()) return spline_.integral(spline_.back()) + tail_mass(right_.edge, right_.value, right_.p, x);
    return spline_.integral(x);
  };
  return F(b) - F(a);
}

}  // namespace muskat
