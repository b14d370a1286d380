#pragma once

#include <vector>

namespace muskat {

/// Not-a-knot cubic spline through (x_k, y_k) with exact derivatives and
/// antiderivative. Evaluation outside [x_0, x_{n-1}] extends the end cubics.
class CubicSpline {
 public:
  CubicSpline() = default;
  CubicSpline(std::vector<double> x, std::vector<double> y);

  bool empty() const { return x_.empty(); }
  const std::vector<double>& nodes() const { return x_; }
  const std::vector<double>& values() const { return y_; }
  double front() const { return x_.front(); }
  double back() const { return x_.back(); }

  double value(double s) const;
  double d1(double s) const;
  double d2(double s) const;
  /// \int_{x_0}^{s} of the spline; s may be anywhere inside [x_0, x_{n-1}].
  double integral(double s) const;

 private:
  int segment(double s) const;

  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> m_;        // second derivatives at the nodes
  std::vector<double> cumulative_;  // integral from x_0 to x_k
};

/// Spline on a finite window plus algebraic tails A/|s|^p beyond it.
///
/// The tail exponent p is matched to the logarithmic slope at each window edge
/// and clamped to [p_min, p_max]; a zero edge value gives a zero tail.
class TabulatedFunction {
 public:
  TabulatedFunction() = default;
  TabulatedFunction(std::vector<double> x, std::vector<double> y, double p_min, double p_max = 4.0);

  bool empty() const { return spline_.empty(); }
  const CubicSpline& spline() const { return spline_; }
  const std::vector<double>& nodes() const { return spline_.nodes(); }
  const std::vector<double>& values() const { return spline_.values(); }

  double value(double s) const;
  double d1(double s) const;
  double d2(double s) const;
  /// \int_a^b, tails included; a = -inf or b = +inf needs a tail exponent above 1.
  double integral(double a, double b) const;

  double left_exponent() const { return left_.p; }
  double right_exponent() const { return right_.p; }

 private:
  struct Tail {
    double edge = 1.0;   // |s| at the window edge
    double value = 0.0;  // function value at the edge
    double p = 2.0;
  };
  static Tail fit_tail(double edge, double value, double slope_outward, double p_min, double p_max);

  CubicSpline spline_;
  Tail left_;
  Tail right_;
};

}  // namespace muskat
