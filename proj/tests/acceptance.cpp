// Acceptance run: one PASS/FAIL line per criterion.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>

#include "muskat/commands.hpp"
#include "muskat/operators.hpp"

using namespace muskat;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<double> uniform(double lo, double hi, int n) {
  std::vector<double> out;
  for (int k = 0; k < n; ++k) out.push_back(lo + (hi - lo) * k / (n - 1));
  return out;
}

const RunConfig& defaults() {
  static const RunConfig rc = parse_run_config(nlohmann::json::object());
  return rc;
}

const PseudoInterface& canonical() {
  static const PseudoInterface pi = PseudoInterface::build(make_mixing_config(defaults()), defaults().interface);
  return pi;
}

MixingConfig expansion_config(int N) {
  // Built directly: the expansion does not need the admissibility gate, which rejects c = 1 at N = 1.
  MixingConfig cfg;
  cfg.N = N;
  cfg.alpha = 0.5;
  cfg.T = 1.0;
  cfg.z0_tilde = ProfileFunction::rational_bump(0.1, 0.0, 1.0);
  cfg.c = ProfileFunction::constant(1.0);
  cfg.c_min = cfg.c_max = 1.0;
  return cfg;
}

Outcome kernel_identity() {
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0, closest_half = INFINITY;
  for (double a : {0.0, 0.5, -0.5, 1.0, -1.0, 2.0}) {
    const double v = sigma_integral(a, defaults().quad).value;
    const double full = sigma_integral_exact(a);
    worst = std::max(worst, std::abs(v - full) / (full != 0.0 ? std::abs(full) : 2.0 * std::numbers::pi));
    if (sigma(a) != 0.0) closest_half = std::min(closest_half, std::abs(v - 0.5 * full) / std::abs(0.5 * full));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  // The identities report must flag the -pi sigma constant.
  const auto rep = run_identities(defaults(), "acceptance_out/identities");
  bool flagged = rep.at("sigma_integral").at("rows").size() == 6;
  for (const auto& row : rep.at("sigma_integral").at("rows"))
    flagged = flagged && row.contains("minus_pi_sigma") && row.at("verdict").get<std::string>() != "mismatch";
  return {worst < 1e-6 && closest_half > 1e-6 && flagged && secs < 5.0,
          fmt("max rel err vs -2pi sigma %.2e; -pi sigma off by >= %.2f rel; %.2f s", worst, closest_half, secs)};
}

Outcome hilbert_pair() {
  const auto start = std::chrono::steady_clock::now();
  const WeightKernel two = constant_weight(2.0);
  auto df = [](double s) { return 1.0 / (1.0 + s * s); };
  double sup = 0.0;
  for (double s : uniform(-10.0, 10.0, 201))
    sup = std::max(sup, std::abs(t_phi(two, df, s, defaults().quad).value - s / (1.0 + s * s)));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {sup < 1e-5 && secs < 10.0, fmt("sup err %.2e on 201 points; %.2f s", sup, secs)};
}

Outcome cbar_equivalence() {
  MixingConfig probe;
  probe.c = ProfileFunction::rational_bump(0.9, 0.3, 1.0, 0.5);
  double diff = 0.0;
  for (int N = 1; N <= 6; ++N) {
    probe.N = N;
    for (double s : {0.0, 0.3, 1.0, 5.0})
      diff = std::max(diff, std::abs(effective_cbar(probe, s, CbarConvention::literal) -
                                     (2.0 * N + 1.0) / (6.0 * N) * probe.c(s)));
  }
  std::vector<double> ts;
  for (int k = 6; k <= 11; ++k) ts.push_back(std::ldexp(1.0, -k));
  const double probes[] = {0.0, 0.5, -0.5};
  double worst = 0.0, literal_gap = INFINITY;
  for (int N = 1; N <= 3; ++N) {
    const PseudoInterface pi = PseudoInterface::build(expansion_config(N), defaults().interface);
    const double doubled = (2.0 * N + 1.0) / (3.0 * N);
    for (const CbarFit& fit : fit_cbar_coefficient(pi, ts, probes, defaults().quad)) {
      worst = std::max(worst, std::abs(fit.chat - doubled) / doubled);
      literal_gap = std::min(literal_gap, std::abs(fit.chat - 0.5 * doubled) / (0.5 * doubled));
    }
  }
  return {diff < 1e-12 && worst < 0.02,
          fmt("brute vs (2N+1)/(6N) c %.1e; fit vs (2N+1)/(3N) %.2e rel; literal off by %.2f", diff, worst,
              literal_gap)};
}

Outcome expansion_rates() {
  const PseudoInterface& pi = canonical();
  std::vector<double> nodes;
  for (std::size_t k = 0; k < pi.nodes().size(); k += 4)
    if (std::abs(pi.nodes()[k]) <= 20.0) nodes.push_back(pi.nodes()[k]);
  std::vector<double> ts, first, second;
  for (int k = 4; k <= 9; ++k) {
    const double t = std::ldexp(1.0, -k);
    const auto [a, b] = expansion_residuals(pi, t, nodes, CbarConvention::doubled, defaults().quad);
    ts.push_back(t);
    first.push_back(a.value);
    second.push_back(b.value);
  }
  const double s1 = loglog_slope(ts, first), s2 = loglog_slope(ts, second);
  return {s1 >= 0.4 && s2 >= 1.4, fmt("slopes %.3f (need >= 0.4), %.3f (need >= 1.4)", s1, s2)};
}

Outcome trace_consistency() {
  const PseudoInterface& pi = canonical();
  const MixingConfig& cfg = pi.config();
  const double t = 1e-2;
  double worst = 0.0;
  for (double s : uniform(-4.75, 4.75, 20)) {
    const double x2 = pi.ladder_interface(1, s, t);
    const double un = normal_velocity(cfg, pi, 1, s, t, defaults().quad);
    for (double d : {1e-4, -1e-4}) {
      const auto u = plane_velocity(cfg, pi, {s, x2 + d}, t, defaults().quad);
      worst = std::max(worst, std::abs(-pi.ds(s, t) * u[0] + u[1] - un));
    }
  }
  return {worst < 1e-3, fmt("max trace mismatch %.2e over 20 probes, both sides", worst)};
}

nlohmann::json validate_report(const fs::path& dir) {
  static std::map<std::string, nlohmann::json> cache;
  auto& slot = cache[dir.string()];
  if (slot.is_null()) slot = run_validate(defaults(), dir);
  return slot;
}

Outcome certification() {
  const auto rep = validate_report("acceptance_out/validate_a").at("report");
  const double t_star = rep.at("t_star");
  const double half = rep.at("margin_at_half_t_star");
  const double dev = rep.at("limit_gradient_deviation");
  const double jump = rep.at("jump_max");
  const bool dec = rep.at("r1_decreasing").get<bool>() && rep.at("r2_decreasing").get<bool>();
  return {t_star > 0.0 && half > 0.1 && dev < 1e-2 && jump < 1e-6 && dec,
          fmt("t* = %.4f, margin at t*/2 = %.4f, limit gradient dev %.1e, jump %.1e, r1/r2 decreasing %s", t_star,
              half, dev, jump, dec ? "yes" : "no")};
}

Outcome psi_ode() {
  bool zero = !canonical().psi().active;
  for (double t : {0.0, 0.25, 0.5, 1.0}) zero = zero && canonical().psi().value(t) == std::array<double, 2>{0, 0};

  RunConfig rc = defaults();
  rc.speed = {{"type", "rational_bump"}, {"a", 0.5}, {"s0", 0.0}, {"w", 1.0}, {"p", 1.0 / 6.0}};
  rc.N = 1;
  rc.T = 0.25;
  const PseudoInterface pi = PseudoInterface::build(make_mixing_config(rc), rc.interface);
  const PsiTrajectory& psi = pi.psi();
  bool shrinking = psi.active;
  double prev = INFINITY, last = 0.0, first = 0.0;
  for (int k = 0; k <= 10; ++k) {
    const double t = rc.T * std::ldexp(1.0, -k);
    const auto v = psi.value(t);
    const double ratio = std::max(std::abs(v[0]), std::abs(v[1])) / t;
    if (k == 0) first = ratio;
    shrinking = shrinking && ratio < prev;
    prev = last = ratio;
  }
  shrinking = shrinking && last < 0.05 * first;
  return {zero && pi.mode() == SpeedMode::vanishing && psi.self_change < 1e-6 && shrinking,
          fmt("bounded speed psi == 0: %s; vanishing speed self-change %.1e, |psi|/t from %.2e to %.2e",
              zero ? "yes" : "no", psi.self_change, first, last)};
}

Outcome offset_scalings() {
  const ProfileFunction z = ProfileFunction::rational_bump(0.1, 0.0, 1.0);
  const ProfileFunction f = ProfileFunction::gaussian(1.0, 0.0, 1.0);
  const auto& quad = defaults().quad;
  const double c1[] = {1.0, 0.5, 0.25, 0.125};
  const auto nodes = uniform(-10.0, 10.0, 41);
  const double sing1 = offset_kernel_scaling(z, f, 0.5, c1, nodes, quad).slope;
  double sing2 = 0.0;
  for (double s : {0.0, 0.5, 1.5}) sing2 = std::max(sing2, symmetric_kernel_limit(z, f, s, 1e-3, quad).rel_error);
  const double c3[] = {1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128, 1.0 / 256, 1.0 / 512};
  double rate = INFINITY;
  for (double s : {0.5, 1.0, 2.0}) rate = std::min(rate, offset_integral_convergence(z, s, c3, quad).slope);
  return {sing1 >= 0.4 && sing2 < 1e-2 && rate >= 0.4,
          fmt("offset kernel slope %.3f, symmetric limit rel err %.1e, offset integral slope %.3f", sing1, sing2,
              rate)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  validate_report("acceptance_out/validate_a");
  validate_report("acceptance_out/validate_b");
  bool same = true;
  for (const char* name : {"report.json", "ladder.csv", "margins.csv"}) {
    const std::string a = slurp(fs::path("acceptance_out/validate_a") / name);
    same = same && !a.empty() && a == slurp(fs::path("acceptance_out/validate_b") / name);
  }
  return {same, same ? "report.json, ladder.csv and margins.csv byte-identical" : "outputs differ"};
}

}  // namespace

int main() {
  fs::create_directories("acceptance_out");
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"kernel identity", kernel_identity},   {"hilbert pair", hilbert_pair},
      {"cbar equivalence", cbar_equivalence}, {"expansion rates", expansion_rates},
      {"trace consistency", trace_consistency}, {"certification", certification},
      {"psi ode", psi_ode},                   {"offset scalings", offset_scalings},
      {"determinism", determinism}};
  int failed = 0, index = 0;
  for (const auto& [name, run] : criteria) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %d (%s): %s  [%s; %.1f s]\n", index, name, o.pass ? "PASS" : "FAIL", o.detail.c_str(),
                secs);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d of 9 criteria passed\n", 9 - failed);
  return failed == 0 ? 0 : 1;
}
