#pragma once

#include <array>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace muskat {

/// Value and derivatives of orders 1..3 at a point.
using Jet = std::array<double, 4>;

/// Closed-form scalar function of one variable.
///
/// Built from a small set of primitives (bumps, ramps, constants) combined by
/// sums and products. Every node supplies exact derivatives up to order three,
/// so nothing downstream ever differentiates numerically. Instances are
/// immutable and cheap to copy (shared expression tree).
class ProfileFunction {
 public:
  enum class Kind { constant, linear_ramp, rational_bump, gaussian, compact_bump, sum, product };

  /// The zero function.
  ProfileFunction();

  static ProfileFunction constant(double a);
  static ProfileFunction linear_ramp(double slope);
  /// a / (1 + ((s - s0)/w)^2)^p
  static ProfileFunction rational_bump(double a, double s0, double w, double p = 1.0);
  /// a exp(-((s - s0)/w)^2)
  static ProfileFunction gaussian(double a, double s0, double w);
  /// a exp(1 - 1/(1 - u^2)) for |u| < 1, u = (s - s0)/w; peak value a, support [s0 - w, s0 + w].
  static ProfileFunction compact_bump(double a, double s0, double w);
  static ProfileFunction sum(std::vector<ProfileFunction> terms);
  static ProfileFunction product(std::vector<ProfileFunction> factors);

  ProfileFunction scaled(double factor) const;

  double operator()(double s) const { return jet(s)[0]; }
  /// Derivative of order 0..3.
  double derivative(int order, double s) const;
  Jet jet(double s) const;

  Kind kind() const;
  /// True when the function is identically constant (no s-dependence).
  bool is_constant() const;
  /// Algebraic decay rate q with |f(s)| ~ |s|^{-q}; +inf for exponential or
  /// compact decay, 0 for functions tending to a nonzero constant, -1 for ramps.
  double decay_exponent() const;
  /// Whether (1 + |s|^{1+alpha}) f stays bounded, i.e. the decay flag for C^{k,alpha}_*.
  bool decays_in_weighted_class(double alpha) const;

 private:
  struct Node;
  explicit ProfileFunction(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

/// Build a profile from a JSON description such as
/// `{"type": "rational_bump", "a": 0.1, "s0": 0, "w": 1}` or
/// `{"type": "sum", "terms": [...]}`.
/// Throws std::invalid_argument on unknown primitives, unknown keys,
/// non-positive widths or non-finite parameters.
ProfileFunction make_profile(const nlohmann::json& desc);

/// Abscissae on [-S, S]; uniform, or graded toward 0 through s = S sinh(g u)/sinh(g).
class SamplingGrid {
 public:
  SamplingGrid(double half_width, int points, double grading = 0.0);

  double half_width() const { return half_width_; }
  int size() const { return static_cast<int>(nodes_.size()); }
  double grading() const { return grading_; }
  const std::vector<double>& nodes() const { return nodes_; }
  double operator[](int k) const { return nodes_[static_cast<std::size_t>(k)]; }

  /// Index k with nodes[k] <= s < nodes[k+1], clamped to [0, size-2].
  int locate(double s) const;

  /// Every `stride`-th node, endpoints always kept.
  std::vector<double> strided(int stride) const;

  /// Same interval, twice the spacing density (nested: n -> 2n - 1).
  SamplingGrid refined() const { return SamplingGrid(half_width_, 2 * size() - 1, grading_); }

 private:
  double half_width_;
  double grading_;
  std::vector<double> nodes_;
};

/// Default norm grid: [-40, 40] with 2001 uniform points.
SamplingGrid default_norm_grid();
/// Default shift magnitudes {2^-j : j = 0..12}.
std::vector<double> default_shifts();

/// max over the grid of (1 + |s|^{1+alpha}) |f(s)|.
double weighted_sup_norm(const std::function<double(double)>& f, double alpha, const SamplingGrid& grid);

/// Single Hölder quotient (1 + |s|^{1+alpha}) |f(s - xi) - f(s)| / |xi|^alpha.
double holder_quotient(const std::function<double(double)>& f, double alpha, double s, double xi);

/// max over grid x {+-xi} of the Hölder quotient. Shift magnitudes must lie in (0, 1].
double weighted_holder_seminorm(const std::function<double(double)>& f, double alpha, const SamplingGrid& grid,
                                std::span<const double> shifts);

/// max_{j<=k} ||d^j f||_0^* + [d^k f]_alpha^*, k in 0..3.
double weighted_ck_norm(const ProfileFunction& f, int k, double alpha, const SamplingGrid& grid,
                        std::span<const double> shifts);

}  // namespace muskat
