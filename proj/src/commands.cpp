#include "muskat/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>

#include "muskat/operators.hpp"
#include "muskat/parallel.hpp"

namespace muskat {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json base_report(const char* command, const RunConfig& rc) {
  return {{"format", kOutputFormat}, {"command", command}, {"config", to_json(rc)}};
}

json series_json(const ScalingSeries& s) { return {{"c", s.c}, {"value", s.value}, {"slope", s.slope}}; }

PseudoInterface build_interface(const RunConfig& rc, const MixingConfig& cfg) {
  return PseudoInterface::build(cfg, rc.interface);
}

json mixing_json(const MixingConfig& cfg, const PseudoInterface* pi) {
  json j = {{"N", cfg.N},
            {"alpha", cfg.alpha},
            {"beta", cfg.beta},
            {"T", cfg.T},
            {"c_min", cfg.c_min},
            {"c_max", cfg.c_max},
            {"vanishing_speed", cfg.vanishing_speed},
            {"cbar", to_string(cfg.cbar)},
            {"speed_gradient", cfg.speed_gradient_term}};
  if (pi) j["mode"] = to_string(pi->mode());
  return j;
}

std::vector<double> uniform(double lo, double hi, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) out[static_cast<std::size_t>(k)] = n == 1 ? lo : lo + (hi - lo) * k / (n - 1);
  return out;
}

}  // namespace

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "# " << kOutputFormat << "\n";
  for (std::size_t k = 0; k < header.size(); ++k) out << (k ? "," : "") << header[k];
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << format_number(row[k]);
    out << "\n";
  }
}

void write_json(const std::filesystem::path& path, const json& doc) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << doc.dump(2) << "\n";
}

json to_json(const LadderRow& r) {
  return {{"t", r.t},
          {"min_margin", r.min_margin},
          {"worst_s", r.worst_s},
          {"worst_x2", r.worst_x2},
          {"worst_layer", r.worst_layer},
          {"jump_max", r.jump_max},
          {"r1", r.r1},
          {"r2", r.r2},
          {"r3", r.r3},
          {"limit_deviation", r.limit_deviation},
          {"max_dx2_g0_over_sqrt_c", r.max_dx2_g0_over_sqrt_c},
          {"margin_ok", r.margin_ok},
          {"jump_ok", r.jump_ok}};
}

json to_json(const AdmissibilityReport& rep) {
  json ladder = json::array(), bisection = json::array();
  for (const auto& r : rep.ladder) ladder.push_back(to_json(r));
  for (const auto& r : rep.bisection) bisection.push_back(to_json(r));
  json j = {{"certified", rep.certified},
            {"t_star", rep.t_star},
            {"margin_at_t_star", rep.margin_at_t_star},
            {"margin_at_half_t_star", rep.margin_at_half},
            {"jump_max", rep.jump_max},
            {"jump_conditions_checked", rep.jump_conditions},
            {"M", rep.M},
            {"r1_slope", rep.r1_slope},
            {"r2_slope", rep.r2_slope},
            {"r1_decreasing", rep.r1_decreasing},
            {"r2_decreasing", rep.r2_decreasing},
            {"limit_gradient_deviation", rep.limit_deviation},
            {"failure", rep.failure},
            {"ladder", ladder},
            {"bisection", bisection}};
  if (rep.t_star > 0.0) j["half"] = to_json(rep.half);
  return j;
}

// ---------------------------------------------------------------------------

json run_identities(const RunConfig& rc, const std::filesystem::path& out) {
  const auto& opt = rc.identities;
  const QuadSpec& quad = rc.quad;
  json rep = base_report("identities", rc);

  // sigma-integral family
  json rows = json::array();
  std::vector<std::vector<double>> csv;
  double max_rel = 0.0;
  for (double a : opt.sigma_points) {
    const double value = sigma_integral(a, quad).value;
    const double full = sigma_integral_exact(a);
    const double half = 0.5 * full;
    // Relative to 2 pi sigma(0) where the exact value vanishes.
    const double rel_full = std::abs(value - full) / (full != 0.0 ? std::abs(full) : 2.0 * std::numbers::pi);
    const double rel_half = std::abs(value - half) / (half != 0.0 ? std::abs(half) : std::numbers::pi);
    max_rel = std::max(max_rel, rel_full);
    std::string verdict = "mismatch";
    if (rel_full < 1e-6) verdict = rel_half < 1e-6 ? "matches both (sigma(a) = 0)" : "matches -2*pi*sigma(a)";
    rows.push_back({{"a", a},
                    {"quadrature", value},
                    {"minus_two_pi_sigma", full},
                    {"minus_pi_sigma", half},
                    {"rel_err_two_pi", rel_full},
                    {"rel_err_pi", rel_half},
                    {"verdict", verdict}});
    csv.push_back({a, value, full, half, rel_full, rel_half});
  }
  rep["sigma_integral"] = {
      {"rows", rows},
      {"max_rel_err", max_rel},
      {"note", "the integral equals -2*pi*sigma(a); the constant -pi*sigma(a) is off by a factor 2 wherever "
               "sigma(a) != 0"}};
  write_csv(out / "sigma_identity.csv",
            {"a", "quadrature", "minus_two_pi_sigma", "minus_pi_sigma", "rel_err_two_pi", "rel_err_pi"}, csv);

  // Hilbert pair with the constant weight 2.
  {
    const WeightKernel two = constant_weight(2.0);
    auto df = [](double s) { return 1.0 / (1.0 + s * s); };
    const auto grid = uniform(-opt.hilbert_half_width, opt.hilbert_half_width, opt.hilbert_points);
    std::vector<double> err(grid.size());
    parallel_for(grid.size(), [&](std::size_t k) {
      const double s = grid[k];
      err[k] = std::abs(t_phi(two, df, s, quad).value - s / (1.0 + s * s));
    });
    const double at_one = t_phi(two, df, 1.0, quad).value;
    rep["hilbert_pair"] = {{"sup_err", *std::max_element(err.begin(), err.end())},
                           {"value_at_1", at_one},
                           {"expected_at_1", 0.5},
                           {"points", opt.hilbert_points}};
  }

  // Parity checks: each of these integrals vanishes identically.
  {
    auto zero_df = [](double) { return 0.0; };
    auto ramp_df = [](double) { return 0.7; };
    const WeightKernel two = constant_weight(2.0);
    const double zero[] = {0.0};
    const double even_offset =
        pv_integrate([](double xi) { return kernel_K(1.0 / xi) / xi; }, zero, quad).value / (2.0 * std::numbers::pi);
    const double offset_one =
        pv_integrate([](double xi) { return kernel_K(1.0 + 1.0 / xi) / xi; }, zero, quad).value /
        (2.0 * std::numbers::pi);
    rep["parity"] = {{"t_phi_constant_f", t_phi(two, zero_df, 0.3, quad).value},
                     {"t_phi_ramp_f", t_phi(two, ramp_df, 0.3, quad).value},
                     {"offset_integral_a0", even_offset},
                     {"offset_integral_a1", offset_one},
                     {"offset_integral_a1_expected", offset_integral_exact(1.0) / (2.0 * std::numbers::pi)}};
  }

  // Small-offset scalings.
  {
    const ProfileFunction z =
        ProfileFunction::sum({ProfileFunction::linear_ramp(rc.beta), make_profile(rc.profile)});
    const ProfileFunction f = make_profile(opt.test_function);
    const auto nodes = uniform(-opt.offset_half_width, opt.offset_half_width, opt.offset_points);
    const ScalingSeries one = offset_kernel_scaling(z, f, rc.alpha, opt.offset_c, nodes, quad);
    json sym = json::array();
    double sym_max = 0.0;
    for (double s : opt.symmetric_probes) {
      const SymmetricLimit l = symmetric_kernel_limit(z, f, s, opt.symmetric_c, quad);
      sym_max = std::max(sym_max, l.rel_error);
      sym.push_back({{"s", l.s}, {"c", l.c}, {"ratio", l.ratio}, {"target", l.target}, {"rel_error", l.rel_error}});
    }
    json conv = json::array();
    double conv_min = std::numeric_limits<double>::infinity();
    for (double s : opt.integral_probes) {
      const ScalingSeries r = offset_integral_convergence(z, s, opt.integral_c, quad);
      conv_min = std::min(conv_min, r.slope);
      json e = series_json(r);
      e["s"] = s;
      conv.push_back(e);
    }
    rep["scaling"] = {{"alpha", rc.alpha},
                      {"offset_kernel", series_json(one)},
                      {"symmetric_kernel", {{"samples", sym}, {"max_rel_error", sym_max}}},
                      {"offset_integral", {{"probes", conv}, {"min_slope", conv_min}}}};
  }

  // Brute-force cbar against the closed forms, both conventions.
  {
    json rows_c = json::array();
    double max_diff = 0.0;
    MixingConfig probe;
    probe.c = make_profile(rc.speed);
    for (int N = 1; N <= opt.max_layers; ++N) {
      probe.N = N;
      for (double s : {0.0, 1.0}) {
        const double lit = effective_cbar(probe, s, CbarConvention::literal);
        const double dbl = effective_cbar(probe, s, CbarConvention::doubled);
        const double lit_cf = closed_form_cbar(probe, s, CbarConvention::literal);
        const double dbl_cf = closed_form_cbar(probe, s, CbarConvention::doubled);
        max_diff = std::max({max_diff, std::abs(lit - lit_cf), std::abs(dbl - dbl_cf)});
        rows_c.push_back({{"N", N},
                          {"s", s},
                          {"literal", lit},
                          {"literal_closed_form", lit_cf},
                          {"doubled", dbl},
                          {"doubled_closed_form", dbl_cf}});
      }
    }
    rep["cbar"] = {{"rows", rows_c}, {"max_abs_diff", max_diff}};
  }

  write_json(out / "identities.json", rep);
  return rep;
}

json run_expand(const RunConfig& rc, const std::filesystem::path& out) {
  const MixingConfig cfg = make_mixing_config(rc);
  const PseudoInterface pi = build_interface(rc, cfg);
  const auto& opt = rc.expand;
  json rep = base_report("expand", rc);
  rep["mixing"] = mixing_json(cfg, &pi);

  std::vector<double> nodes;
  for (std::size_t k = 0; k < pi.nodes().size(); k += static_cast<std::size_t>(opt.stride))
    if (std::abs(pi.nodes()[k]) <= opt.window) nodes.push_back(pi.nodes()[k]);
  const CbarConvention other = cfg.cbar == CbarConvention::doubled ? CbarConvention::literal : CbarConvention::doubled;

  std::vector<std::vector<double>> csv;
  std::vector<double> ts, first, second;
  json ladder = json::array();
  {
    const auto zero = expansion_residuals(pi, 0.0, nodes, cfg.cbar, rc.quad);
    csv.push_back({0.0, zero.first.value, zero.second.value, 0.0});
    ladder.push_back({{"t", 0.0}, {"first", zero.first.value}, {"second", zero.second.value}, {"second_other", 0.0}});
  }
  for (int k : opt.levels) {
    const double t = std::ldexp(cfg.T, -k);
    const auto [r1, r2] = expansion_residuals(pi, t, nodes, cfg.cbar, rc.quad);
    const auto alt = expansion_residual_second(pi, t, nodes, other, rc.quad);
    ts.push_back(t);
    first.push_back(r1.value);
    second.push_back(r2.value);
    csv.push_back({t, r1.value, r2.value, alt.value});
    ladder.push_back({{"t", t},
                      {"first", r1.value},
                      {"first_argmax_s", r1.argmax_s},
                      {"second", r2.value},
                      {"second_argmax_s", r2.argmax_s},
                      {"second_other", alt.value}});
  }
  write_csv(out / "residuals.csv",
            {"t", "first", "second", std::string("second_") + to_string(other)}, csv);
  rep["residuals"] = {{"convention", to_string(cfg.cbar)},
                      {"other_convention", to_string(other)},
                      {"ladder", ladder},
                      {"first_slope", ts.size() >= 2 ? loglog_slope(ts, first) : 0.0},
                      {"second_slope", ts.size() >= 2 ? loglog_slope(ts, second) : 0.0},
                      {"first_expected_min", cfg.alpha - 0.1},
                      {"second_expected_min", 1.0 + cfg.alpha - 0.1}};

  std::vector<double> fit_t;
  for (int k : opt.cbar_levels) fit_t.push_back(std::ldexp(cfg.T, -k));
  try {
    const auto fits = fit_cbar_coefficient(pi, fit_t, opt.cbar_probes, rc.quad);
    json rows = json::array();
    std::vector<std::vector<double>> fcsv;
    for (const auto& f : fits) {
      const double dbl = closed_form_cbar(cfg, f.s, CbarConvention::doubled);
      const double lit = closed_form_cbar(cfg, f.s, CbarConvention::literal);
      rows.push_back({{"s", f.s},
                      {"chat", f.chat},
                      {"doubled_prediction", dbl},
                      {"literal_prediction", lit},
                      {"rel_err_doubled", std::abs(f.chat - dbl) / dbl},
                      {"rel_err_literal", std::abs(f.chat - lit) / lit},
                      {"fit_slope", f.slope},
                      {"fit_residual", f.residual},
                      {"samples", f.samples}});
      fcsv.push_back({f.s, f.chat, dbl, lit, f.residual});
    }
    rep["cbar_fit"] = {{"t", fit_t}, {"probes", rows}};
    write_csv(out / "cbar_fit.csv", {"s", "chat", "doubled_prediction", "literal_prediction", "fit_residual"}, fcsv);
  } catch (const std::domain_error& e) {
    rep["cbar_fit"] = {{"skipped", e.what()}};
  }

  write_json(out / "expand.json", rep);
  return rep;
}

json run_fields(const RunConfig& rc, double t, const std::filesystem::path& out) {
  const MixingConfig cfg = make_mixing_config(rc);
  if (!(t > 0.0) || t > cfg.T) throw ConfigError("fields needs 0 < t <= T");
  const PseudoInterface pi = build_interface(rc, cfg);
  const SubsolutionFields fields(pi, t, rc.certify.fields);
  const auto& opt = rc.fields;
  const auto x1 = uniform(opt.x1_min, opt.x1_max, opt.x1_points);
  const auto x2 = uniform(opt.x2_min, opt.x2_max, opt.x2_points);

  std::vector<std::vector<double>> rows(x1.size() * x2.size());
  parallel_for(rows.size(), [&](std::size_t k) {
    const std::array<double, 2> x{x1[k / x2.size()], x2[k % x2.size()]};
    const RegionLabel label = fields.classify(x);
    double region = 0.0;
    switch (label.kind) {
      case RegionLabel::Kind::minus: region = -1.0; break;
      case RegionLabel::Kind::layer: region = 0.0; break;
      case RegionLabel::Kind::plus: region = 1.0; break;
      case RegionLabel::Kind::interface: region = 2.0; break;
    }
    const double rho = fields.rho(x);
    std::vector<double> row{x[0], x[1], region, static_cast<double>(label.index), rho};
    try {
      const auto u = plane_velocity(cfg, pi, x, t, rc.quad, rc.certify.fields.guard);
      const auto g = fields.gamma(x);
      const auto m = fields.m_field(x, u);
      row.insert(row.end(), {u[0], u[1], g[0], g[1], m[0], m[1], fields.strict_margin(x)});
    } catch (const ProximityError&) {
      row[2] = 2.0;
      row.insert(row.end(), 7, kNaN);
    }
    rows[k] = std::move(row);
  });
  write_csv(out / "fields.csv",
            {"x1", "x2", "region", "index", "rho", "u1", "u2", "gamma1", "gamma2", "m1", "m2", "margin"}, rows);

  std::ofstream gp(out / "fields.gp");
  gp << "# " << kOutputFormat << "\n"
     << "set datafile separator ','\n"
     << "set datafile missing 'nan'\n"
     << "set terminal pngcairo size 1200,500\n"
     << "set output 'fields.png'\n"
     << "set multiplot layout 1,2\n"
     << "set xlabel 'x1'\nset ylabel 'x2'\n"
     << "set view map\n"
     << "set title 'density rho at t = " << format_number(t) << "'\n"
     << "splot 'fields.csv' every ::2 using 1:2:5 with image notitle\n"
     << "set title 'strict margin'\n"
     << "splot 'fields.csv' every ::2 using 1:2:12 with image notitle\n"
     << "unset multiplot\n";

  double min_mix = std::numeric_limits<double>::infinity(), max_u = 0.0;
  int counts[3] = {0, 0, 0}, near = 0;
  for (const auto& r : rows) {
    if (r[2] == 2.0) {
      ++near;
      continue;
    }
    counts[static_cast<int>(r[2]) + 1]++;
    if (r[2] == 0.0) min_mix = std::min(min_mix, r[11]);
    max_u = std::max(max_u, std::hypot(r[5], r[6]));
  }
  json rep = base_report("fields", rc);
  rep["mixing"] = mixing_json(cfg, &pi);
  rep["t"] = t;
  rep["points"] = {{"minus", counts[0]}, {"mixing", counts[1]}, {"plus", counts[2]}, {"near_interface", near}};
  rep["min_margin_mixing"] = counts[1] > 0 ? json(min_mix) : json(nullptr);
  rep["max_speed"] = max_u;
  write_json(out / "fields.json", rep);
  return rep;
}

json run_validate(const RunConfig& rc, const std::filesystem::path& out) {
  const MixingConfig cfg = make_mixing_config(rc);
  const PseudoInterface pi = build_interface(rc, cfg);
  const AdmissibilityReport cert = certify_admissibility(pi, rc.certify);
  json rep = base_report("validate", rc);
  rep["mixing"] = mixing_json(cfg, &pi);
  rep["conventions"] = {{"cbar", to_string(cfg.cbar)},
                        {"speed_gradient", cfg.speed_gradient_term},
                        {"sigma_integral_constant", "-2*pi*sigma(a)"}};
  rep["limit_gradient"] = -0.5 + cfg.c(0.0) * cfg.N / (2.0 * cfg.N - 1.0);
  rep["report"] = to_json(cert);

  std::vector<std::vector<double>> ladder;
  for (const auto* set : {&cert.ladder, &cert.bisection})
    for (const auto& r : *set) ladder.push_back({r.t, r.min_margin, r.jump_max, r.r1, r.r2, r.r3, r.limit_deviation});
  write_csv(out / "ladder.csv", {"t", "min_margin", "jump_max", "r1", "r2", "r3", "limit_deviation"}, ladder);

  if (cert.t_star > 0.0) {
    // Margin table at t*/2 on the probe set: layer 0 through lambda, outer layers at their midlines.
    const double t = 0.5 * cert.t_star;
    const SubsolutionFields fields(pi, t, rc.certify.fields);
    const auto probes = uniform(-rc.certify.probe_window, rc.certify.probe_window, rc.certify.probe_points);
    std::vector<std::vector<double>> margins;
    for (double s : probes) {
      const double z = pi.value(s, t);
      for (double lambda : rc.certify.lambdas) {
        const GHat g = fields.ghat(s, lambda);
        margins.push_back({s, z + lambda * speed_ladder(cfg, 1, s) * t, 0.0, 0.5 - std::hypot(g.grad[0], g.grad[1])});
      }
      for (int i = 1; i < cfg.N; ++i) {
        for (int sign : {1, -1}) {
          const double mid = 0.5 * (speed_ladder(cfg, sign * i, s) + speed_ladder(cfg, sign * (i + 1), s)) * t;
          const double r = static_cast<double>(i) / cfg.N;
          margins.push_back({s, z + mid, static_cast<double>(sign * i),
                             (1.0 - r * r) * (0.5 - std::abs(fields.g_gradient_outer(sign * i, s)))});
        }
      }
    }
    write_csv(out / "margins.csv", {"x1", "x2", "layer", "margin"}, margins);
  }
  write_json(out / "report.json", rep);
  return rep;
}

json run_evolve(const RunConfig& rc, const std::filesystem::path& out) {
  const MixingConfig cfg = make_mixing_config(rc);
  const PseudoInterface pi = build_interface(rc, cfg);
  const PsiTrajectory& tr = pi.psi();
  std::vector<std::vector<double>> rows;
  std::vector<double> times = tr.t;
  if (!tr.active) times = uniform(0.0, cfg.T, 9);
  for (double t : times) {
    const auto p = tr.value(t);
    const auto h = tr.derivative(t);
    rows.push_back({t, p[0], p[1], h[0], h[1]});
  }
  write_csv(out / "trajectory.csv", {"t", "psi1", "psi2", "h1", "h2"}, rows);

  json refinements = json::array();
  for (const auto& [n, p] : tr.refinements) refinements.push_back({{"steps", n}, {"psi_T", {p[0], p[1]}}});
  const auto end = tr.value(cfg.T);
  json rep = base_report("evolve", rc);
  rep["mixing"] = mixing_json(cfg, &pi);
  rep["active"] = tr.active;
  rep["psi_T"] = {end[0], end[1]};
  rep["refinements"] = refinements;
  rep["self_change"] = tr.self_change;
  write_json(out / "evolve.json", rep);
  return rep;
}

}  // namespace muskat
