#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace muskat {

/// Any numerical procedure that failed to reach its tolerance.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when an integral cannot be brought within tolerance, or when the
/// integrand returns a non-finite value.
class QuadratureError : public NumericalError {
 public:
  explicit QuadratureError(const std::string& what) : NumericalError(what) {}
};

struct QuadSpec {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  /// Radius of the near region; the tail starts here and doubles outward.
  double r0 = 32.0;
  int max_doublings = 20;
  /// Ratio between consecutive panel endpoints of the graded mesh toward a singularity.
  double grading_ratio = 2.0;
  /// Hölder exponent of the integrand's numerator; sets how deep the graded mesh goes.
  double alpha = 0.5;
  int max_depth = 48;
  int max_panels = 4000;
  /// When false the panel layout is fixed in advance: no bisection, the graded mesh
  /// stops at `fixed_floor`, and the tail always uses all `max_doublings` shells.
  /// The result is then a smooth function of any parameter of the integrand.
  bool adaptive = true;
  double fixed_floor = 1e-10;
  /// Fixed layout only: panels inside r0 are cut into pieces no wider than this (beyond r0,
  /// a sixteenth of their distance), and every panel into at least `fixed_split` parts.
  double fixed_width = 1.0;
  int fixed_split = 2;

  void validate() const;
};

struct QuadResult {
  double value = 0.0;
  double error_estimate = 0.0;
  long evaluations = 0;
};

struct VecQuadResult {
  std::vector<double> value;
  double error_estimate = 0.0;
  long evaluations = 0;
};

using Integrand = std::function<double(double)>;
/// Writes all components of a vector-valued integrand at xi into out.
using VecIntegrand = std::function<void(double xi, std::span<double> out)>;

/// Symmetric-limit integral over the real line: panels are paired around each
/// listed singularity (at most one 1/xi-type pole per point) and around
/// +-R at infinity, with R doubled until the extrapolated tail settles.
QuadResult pv_integrate(const Integrand& f, std::span<const double> singularities, const QuadSpec& spec = {});

/// Vector-valued variant with a single pairing centre; error is in the max-norm.
VecQuadResult pv_integrate(const VecIntegrand& f, std::size_t dim, double center, const QuadSpec& spec = {});

/// \int from endpoint to +inf (direction = +1) or to -inf (direction = -1).
QuadResult integrate_halfline(const Integrand& f, double endpoint, int direction, const QuadSpec& spec = {});

/// Adaptive Gauss-Kronrod on a bounded interval.
QuadResult integrate_interval(const Integrand& f, double a, double b, const QuadSpec& spec = {});

}  // namespace muskat
