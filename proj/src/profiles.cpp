#include "muskat/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace muskat {

struct ProfileFunction::Node {
  Kind kind = Kind::constant;
  double a = 0.0;
  double s0 = 0.0;
  double w = 1.0;
  double p = 1.0;
  std::vector<ProfileFunction> children;
};

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw std::invalid_argument(std::string("profile parameter '") + what + "' is not finite");
}

void require_width(double w) {
  require_finite(w, "w");
  if (w <= 0.0) throw std::invalid_argument("profile width must be positive");
}

// Jets in the scaled variable u; the caller applies the 1/w^k chain factors.
Jet rational_jet(double u, double p) {
  const double r = 1.0 + u * u;
  const double q0 = p == 1.0 ? 1.0 / r : std::pow(r, -p);
  const double q1 = q0 / r;      // r^{-p-1}
  const double q2 = q1 / r;      // r^{-p-2}
  const double q3 = q2 / r;      // r^{-p-3}
  return {q0, -2.0 * p * u * q1, -2.0 * p * q1 + 4.0 * p * (p + 1.0) * u * u * q2,
          12.0 * p * (p + 1.0) * u * q2 - 8.0 * p * (p + 1.0) * (p + 2.0) * u * u * u * q3};
}

Jet gaussian_jet(double u) {
  const double e = std::exp(-u * u);
  return {e, -2.0 * u * e, (4.0 * u * u - 2.0) * e, (12.0 * u - 8.0 * u * u * u) * e};
}

Jet compact_jet(double u) {
  if (std::abs(u) >= 1.0) return {0.0, 0.0, 0.0, 0.0};
  const double d = 1.0 - u * u;
  const double g1 = -2.0 * u / (d * d);
  const double g2 = -2.0 * (1.0 + 3.0 * u * u) / (d * d * d);
  const double g3 = -24.0 * u * (1.0 + u * u) / (d * d * d * d);
  const double e = std::exp(1.0 - 1.0 / d);
  return {e, g1 * e, (g2 + g1 * g1) * e, (g3 + 3.0 * g1 * g2 + g1 * g1 * g1) * e};
}

Jet scale_jet(const Jet& j, double a, double w) {
  return {a * j[0], a * j[1] / w, a * j[2] / (w * w), a * j[3] / (w * w * w)};
}

}  // namespace

ProfileFunction::ProfileFunction() : ProfileFunction(constant(0.0)) {}

ProfileFunction::ProfileFunction(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

ProfileFunction ProfileFunction::constant(double a) {
  require_finite(a, "a");
  auto n = std::make_shared<Node>();
  n->kind = Kind::constant;
  n->a = a;
  return ProfileFunction(std::move(n));
}

ProfileFunction ProfileFunction::linear_ramp(double slope) {
  require_finite(slope, "slope");
  auto n = std::make_shared<Node>();
  n->kind = Kind::linear_ramp;
  n->a = slope;
  return ProfileFunction(std::move(n));
}

ProfileFunction ProfileFunction::rational_bump(double a, double s0, double w, double p) {
  require_finite(a, "a");
  require_finite(s0, "s0");
  require_width(w);
  require_finite(p, "p");
  if (p <= 0.0) throw std::invalid_argument("rational_bump exponent must be positive");
  auto n = std::make_shared<Node>();
  n->kind = Kind::rational_bump;
  n->a = a;
  n->s0 = s0;
  n->w = w;
  n->p = p;
  return ProfileFunction(std::move(n));
}

ProfileFunction ProfileFunction::gaussian(double a, double s0, double w) {
  require_finite(a, "a");
  require_finite(s0, "s0");
  require_width(w);
  auto n = std::make_shared<Node>();
  n->kind = Kind::gaussian;
  n->a = a;
  n->s0 = s0;
  n->w = w;
  return ProfileFunction(std::move(n));
}

ProfileFunction ProfileFunction::compact_bump(double a, double s0, double w) {
  require_finite(a, "a");
  require_finite(s0, "s0");
  require_width(w);
  auto n = std::make_shared<Node>();
  n->kind = Kind::compact_bump;
  n->a = a;
  n->s0 = s0;
  n->w = w;
  return ProfileFunction(std::move(n));
}

ProfileFunction ProfileFunction::sum(std::vector<ProfileFunction> terms) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::sum;
  n->children = std::move(terms);
  return ProfileFunction(std::move(n));
}

ProfileFunction ProfileFunction::product(std::vector<ProfileFunction> factors) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::product;
  n->a = 1.0;
  n->children = std::move(factors);
  return ProfileFunction(std::move(n));
}

ProfileFunction ProfileFunction::scaled(double factor) const {
  return product({constant(factor), *this});
}

ProfileFunction::Kind ProfileFunction::kind() const { return node_->kind; }

Jet ProfileFunction::jet(double s) const {
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::constant:
      return {n.a, 0.0, 0.0, 0.0};
    case Kind::linear_ramp:
      return {n.a * s, n.a, 0.0, 0.0};
    case Kind::rational_bump:
      return scale_jet(rational_jet((s - n.s0) / n.w, n.p), n.a, n.w);
    case Kind::gaussian:
      return scale_jet(gaussian_jet((s - n.s0) / n.w), n.a, n.w);
    case Kind::compact_bump:
      return scale_jet(compact_jet((s - n.s0) / n.w), n.a, n.w);
    case Kind::sum: {
      Jet acc{0.0, 0.0, 0.0, 0.0};
      for (const auto& c : n.children) {
        const Jet j = c.jet(s);
        for (int k = 0; k < 4; ++k) acc[k] += j[k];
      }
      return acc;
    }
    case Kind::product: {
      Jet acc{1.0, 0.0, 0.0, 0.0};
      for (const auto& c : n.children) {
        const Jet g = c.jet(s);
        const Jet f = acc;
        acc[0] = f[0] * g[0];
        acc[1] = f[1] * g[0] + f[0] * g[1];
        acc[2] = f[2] * g[0] + 2.0 * f[1] * g[1] + f[0] * g[2];
        acc[3] = f[3] * g[0] + 3.0 * f[2] * g[1] + 3.0 * f[1] * g[2] + f[0] * g[3];
      }
      return acc;
    }
  }
  return {0.0, 0.0, 0.0, 0.0};
}

double ProfileFunction::derivative(int order, double s) const {
  if (order < 0 || order > 3) throw std::out_of_range("profile derivative order must be in 0..3");
  return jet(s)[static_cast<std::size_t>(order)];
}

bool ProfileFunction::is_constant() const {
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::constant:
      return true;
    case Kind::linear_ramp:
    case Kind::rational_bump:
    case Kind::gaussian:
    case Kind::compact_bump:
      return n.a == 0.0;
    case Kind::sum:
      return std::all_of(n.children.begin(), n.children.end(), [](const auto& c) { return c.is_constant(); });
    case Kind::product:
      return std::all_of(n.children.begin(), n.children.end(), [](const auto& c) { return c.is_constant(); }) ||
             std::any_of(n.children.begin(), n.children.end(),
                         [](const auto& c) { return c.is_constant() && c(0.0) == 0.0; });
  }
  return false;
}

double ProfileFunction::decay_exponent() const {
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::constant:
      return n.a == 0.0 ? kInf : 0.0;
    case Kind::linear_ramp:
      return n.a == 0.0 ? kInf : -1.0;
    case Kind::rational_bump:
      return n.a == 0.0 ? kInf : 2.0 * n.p;
    case Kind::gaussian:
    case Kind::compact_bump:
      return kInf;
    case Kind::sum: {
      double q = kInf;
      for (const auto& c : n.children) q = std::min(q, c.decay_exponent());
      return q;
    }
    case Kind::product: {
      double q = 0.0;
      for (const auto& c : n.children) {
        const double qc = c.decay_exponent();
        if (qc == kInf) return kInf;
        q += qc;
      }
      return q;
    }
  }
  return 0.0;
}

bool ProfileFunction::decays_in_weighted_class(double alpha) const { return decay_exponent() >= 1.0 + alpha; }

namespace {

double get_number(const nlohmann::json& d, const char* key, double fallback, bool required) {
  if (!d.contains(key)) {
    if (required) throw std::invalid_argument(std::string("profile is missing '") + key + "'");
    return fallback;
  }
  if (!d.at(key).is_number()) throw std::invalid_argument(std::string("profile field '") + key + "' must be a number");
  return d.at(key).get<double>();
}

void check_keys(const nlohmann::json& d, std::initializer_list<const char*> allowed) {
  std::set<std::string> ok(allowed.begin(), allowed.end());
  ok.insert("type");
  for (auto it = d.begin(); it != d.end(); ++it) {
    if (!ok.count(it.key())) throw std::invalid_argument("unknown profile key '" + it.key() + "'");
  }
}

}  // namespace

ProfileFunction make_profile(const nlohmann::json& desc) {
  if (!desc.is_object() || !desc.contains("type") || !desc.at("type").is_string())
    throw std::invalid_argument("profile description must be an object with a string 'type'");
  const std::string type = desc.at("type").get<std::string>();
  if (type == "constant") {
    check_keys(desc, {"a"});
    return ProfileFunction::constant(get_number(desc, "a", 0.0, true));
  }
  if (type == "linear_ramp") {
    check_keys(desc, {"slope"});
    return ProfileFunction::linear_ramp(get_number(desc, "slope", 0.0, true));
  }
  if (type == "rational_bump") {
    check_keys(desc, {"a", "s0", "w", "p"});
    return ProfileFunction::rational_bump(get_number(desc, "a", 1.0, true), get_number(desc, "s0", 0.0, false),
                                          get_number(desc, "w", 1.0, false), get_number(desc, "p", 1.0, false));
  }
  if (type == "gaussian" || type == "compact_bump") {
    check_keys(desc, {"a", "s0", "w"});
    const double a = get_number(desc, "a", 1.0, true);
    const double s0 = get_number(desc, "s0", 0.0, false);
    const double w = get_number(desc, "w", 1.0, false);
    return type == "gaussian" ? ProfileFunction::gaussian(a, s0, w) : ProfileFunction::compact_bump(a, s0, w);
  }
  if (type == "sum" || type == "product") {
    const char* key = type == "sum" ? "terms" : "factors";
    check_keys(desc, {key});
    if (!desc.contains(key) || !desc.at(key).is_array())
      throw std::invalid_argument(std::string("profile '") + type + "' needs an array '" + key + "'");
    std::vector<ProfileFunction> parts;
    for (const auto& child : desc.at(key)) parts.push_back(make_profile(child));
    return type == "sum" ? ProfileFunction::sum(std::move(parts)) : ProfileFunction::product(std::move(parts));
  }
  throw std::invalid_argument("unknown profile primitive '" + type + "'");
}

// ---------------------------------------------------------------------------

SamplingGrid::SamplingGrid(double half_width, int points, double grading)
    : half_width_(half_width), grading_(grading) {
  if (!(half_width > 0.0) || !std::isfinite(half_width)) throw std::invalid_argument("grid half-width must be positive");
  if (points < 3) throw std::invalid_argument("grid needs at least 3 points");
  if (grading < 0.0 || !std::isfinite(grading)) throw std::invalid_argument("grid grading must be >= 0");
  nodes_.resize(static_cast<std::size_t>(points));
  const double du = 2.0 / (points - 1);
  for (int k = 0; k < points; ++k) {
    const double u = -1.0 + k * du;
    nodes_[static_cast<std::size_t>(k)] =
        grading_ > 0.0 ? half_width * std::sinh(grading_ * u) / std::sinh(grading_) : half_width * u;
  }
  nodes_.front() = -half_width;
  nodes_.back() = half_width;
  if (points % 2 == 1) nodes_[static_cast<std::size_t>(points / 2)] = 0.0;
}

int SamplingGrid::locate(double s) const {
  const int n = size();
  double u = grading_ > 0.0 ? std::asinh(s * std::sinh(grading_) / half_width_) / grading_ : s / half_width_;
  int k = static_cast<int>(std::floor((u + 1.0) * 0.5 * (n - 1)));
  k = std::clamp(k, 0, n - 2);
  while (k > 0 && s < nodes_[static_cast<std::size_t>(k)]) --k;
  while (k < n - 2 && s >= nodes_[static_cast<std::size_t>(k + 1)]) ++k;
  return k;
}

std::vector<double> SamplingGrid::strided(int stride) const {
  if (stride < 1) throw std::invalid_argument("stride must be >= 1");
  std::vector<double> out;
  for (int k = 0; k < size(); k += stride) out.push_back(nodes_[static_cast<std::size_t>(k)]);
  if (out.back() != nodes_.back()) out.push_back(nodes_.back());
  return out;
}

SamplingGrid default_norm_grid() { return SamplingGrid(40.0, 2001); }

std::vector<double> default_shifts() {
  std::vector<double> out;
  for (int j = 0; j <= 12; ++j) out.push_back(std::ldexp(1.0, -j));
  return out;
}

namespace {
double weight(double s, double alpha) { return 1.0 + std::pow(std::abs(s), 1.0 + alpha); }
}  // namespace

double weighted_sup_norm(const std::function<double(double)>& f, double alpha, const SamplingGrid& grid) {
  double best = 0.0;
  for (double s : grid.nodes()) best = std::max(best, weight(s, alpha) * std::abs(f(s)));
  return best;
}

double holder_quotient(const std::function<double(double)>& f, double alpha, double s, double xi) {
  if (xi == 0.0) throw std::invalid_argument("Hölder shift must be nonzero");
  return weight(s, alpha) * std::abs(f(s - xi) - f(s)) / std::pow(std::abs(xi), alpha);
}

double weighted_holder_seminorm(const std::function<double(double)>& f, double alpha, const SamplingGrid& grid,
                                std::span<const double> shifts) {
  if (shifts.empty()) throw std::invalid_argument("Hölder seminorm needs at least one shift");
  for (double xi : shifts) {
    if (!(xi > 0.0 && xi <= 1.0)) throw std::invalid_argument("Hölder shift magnitudes must lie in (0, 1]");
  }
  double best = 0.0;
  for (double s : grid.nodes()) {
    const double fs = f(s);
    const double w = weight(s, alpha);
    for (double xi : shifts) {
      const double scale = w / std::pow(xi, alpha);
      best = std::max(best, scale * std::abs(f(s - xi) - fs));
      best = std::max(best, scale * std::abs(f(s + xi) - fs));
    }
  }
  return best;
}

double weighted_ck_norm(const ProfileFunction& f, int k, double alpha, const SamplingGrid& grid,
                        std::span<const double> shifts) {
  if (k < 0 || k > 3) throw std::invalid_argument("weighted C^k norm needs k in 0..3");
  double sup_part = 0.0;
  for (int j = 0; j <= k; ++j) {
    sup_part = std::max(sup_part, weighted_sup_norm([&](double s) { return f.derivative(j, s); }, alpha, grid));
  }
  return sup_part + weighted_holder_seminorm([&](double s) { return f.derivative(k, s); }, alpha, grid, shifts);
}

}  // namespace muskat
