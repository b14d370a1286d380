#include "muskat/run_config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace muskat {

namespace {

using nlohmann::json;

void check_object(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError("'" + where + "' must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!ok.count(key)) throw ConfigError("unknown key '" + key + "' in '" + where + "'");
  }
}

double number(const json& j, const char* key, const std::string& where, double fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number()) throw ConfigError("'" + where + "." + key + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError("'" + where + "." + key + "' must be finite");
  return x;
}

int integer(const json& j, const char* key, const std::string& where, int fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer()) throw ConfigError("'" + where + "." + key + "' must be an integer");
  return v.get<int>();
}

bool boolean(const json& j, const char* key, const std::string& where, bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_boolean()) throw ConfigError("'" + where + "." + key + "' must be true or false");
  return j.at(key).get<bool>();
}

template <class T>
std::vector<T> list(const json& j, const char* key, const std::string& where, std::vector<T> fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_array() || v.empty()) throw ConfigError("'" + where + "." + key + "' must be a non-empty array");
  std::vector<T> out;
  for (const auto& x : v) {
    if constexpr (std::is_integral_v<T>) {
      if (!x.is_number_integer()) throw ConfigError("'" + where + "." + key + "' must hold integers");
    } else {
      if (!x.is_number() || !std::isfinite(x.get<double>()))
        throw ConfigError("'" + where + "." + key + "' must hold finite numbers");
    }
    out.push_back(x.get<T>());
  }
  return out;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

json checked_profile(const json& desc, const std::string& where) {
  try {
    (void)make_profile(desc);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("'" + where + "': " + e.what());
  }
  return desc;
}

void parse_quadrature(const json& j, QuadSpec& q) {
  check_object(j, "quadrature", {"rel_tol", "abs_tol", "r0", "max_doublings", "grading_ratio", "max_depth", "max_panels"});
  q.rel_tol = number(j, "rel_tol", "quadrature", q.rel_tol);
  q.abs_tol = number(j, "abs_tol", "quadrature", q.abs_tol);
  q.r0 = number(j, "r0", "quadrature", q.r0);
  q.max_doublings = integer(j, "max_doublings", "quadrature", q.max_doublings);
  q.grading_ratio = number(j, "grading_ratio", "quadrature", q.grading_ratio);
  q.max_depth = integer(j, "max_depth", "quadrature", q.max_depth);
  q.max_panels = integer(j, "max_panels", "quadrature", q.max_panels);
  try {
    q.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

void parse_run(const json& j, RunConfig& rc) {
  check_object(j, "run", {"identities", "expand", "fields", "validate", "evolve"});
  if (j.contains("identities")) {
    const json& s = j.at("identities");
    const std::string w = "run.identities";
    check_object(s, w,
                 {"sigma_points", "hilbert_half_width", "hilbert_points", "test_function", "offset_c", "offset_half_width",
                  "offset_points", "symmetric_c", "symmetric_probes", "integral_c", "integral_probes", "max_layers"});
    auto& o = rc.identities;
    o.sigma_points = list<double>(s, "sigma_points", w, o.sigma_points);
    o.hilbert_half_width = number(s, "hilbert_half_width", w, o.hilbert_half_width);
    o.hilbert_points = integer(s, "hilbert_points", w, o.hilbert_points);
    if (s.contains("test_function")) o.test_function = checked_profile(s.at("test_function"), w + ".test_function");
    o.offset_c = list<double>(s, "offset_c", w, o.offset_c);
    o.offset_half_width = number(s, "offset_half_width", w, o.offset_half_width);
    o.offset_points = integer(s, "offset_points", w, o.offset_points);
    o.symmetric_c = number(s, "symmetric_c", w, o.symmetric_c);
    o.symmetric_probes = list<double>(s, "symmetric_probes", w, o.symmetric_probes);
    o.integral_c = list<double>(s, "integral_c", w, o.integral_c);
    o.integral_probes = list<double>(s, "integral_probes", w, o.integral_probes);
    o.max_layers = integer(s, "max_layers", w, o.max_layers);
    require(o.hilbert_points >= 2 && o.offset_points >= 1 && o.max_layers >= 1, "run.identities sizes must be positive");
    require(o.symmetric_c > 0.0, "run.identities.symmetric_c must be positive");
    for (double c : o.offset_c) require(c > 0.0, "run.identities.offset_c must be positive");
    for (double c : o.integral_c) require(c > 0.0, "run.identities.integral_c must be positive");
  }
  if (j.contains("expand")) {
    const json& s = j.at("expand");
    const std::string w = "run.expand";
    check_object(s, w, {"levels", "stride", "window", "cbar_probes", "cbar_levels"});
    auto& o = rc.expand;
    o.levels = list<int>(s, "levels", w, o.levels);
    o.stride = integer(s, "stride", w, o.stride);
    o.window = number(s, "window", w, o.window);
    o.cbar_probes = list<double>(s, "cbar_probes", w, o.cbar_probes);
    o.cbar_levels = list<int>(s, "cbar_levels", w, o.cbar_levels);
    require(o.stride >= 1 && o.window > 0.0, "run.expand stride and window must be positive");
    for (int k : o.levels) require(k >= 0, "run.expand.levels must be >= 0");
    for (int k : o.cbar_levels) require(k >= 0, "run.expand.cbar_levels must be >= 0");
  }
  if (j.contains("fields")) {
    const json& s = j.at("fields");
    const std::string w = "run.fields";
    check_object(s, w, {"t", "x1_min", "x1_max", "x1_points", "x2_min", "x2_max", "x2_points"});
    auto& o = rc.fields;
    o.t = number(s, "t", w, o.t);
    o.x1_min = number(s, "x1_min", w, o.x1_min);
    o.x1_max = number(s, "x1_max", w, o.x1_max);
    o.x1_points = integer(s, "x1_points", w, o.x1_points);
    o.x2_min = number(s, "x2_min", w, o.x2_min);
    o.x2_max = number(s, "x2_max", w, o.x2_max);
    o.x2_points = integer(s, "x2_points", w, o.x2_points);
    require(o.x1_max > o.x1_min && o.x2_max > o.x2_min, "run.fields ranges must be increasing");
    require(o.x1_points >= 2 && o.x2_points >= 2, "run.fields needs at least 2 points per axis");
  }
  if (j.contains("validate")) {
    const json& s = j.at("validate");
    const std::string w = "run.validate";
    check_object(s, w,
                 {"levels", "bisection_steps", "safety", "jump_tol", "probe_window", "probe_points", "lambdas",
                  "residual_window", "stride", "guard"});
    auto& o = rc.certify;
    o.levels = integer(s, "levels", w, o.levels);
    o.bisection_steps = integer(s, "bisection_steps", w, o.bisection_steps);
    o.safety = number(s, "safety", w, o.safety);
    o.jump_tol = number(s, "jump_tol", w, o.jump_tol);
    o.probe_window = number(s, "probe_window", w, o.probe_window);
    o.probe_points = integer(s, "probe_points", w, o.probe_points);
    o.lambdas = list<double>(s, "lambdas", w, o.lambdas);
    o.residual_window = number(s, "residual_window", w, o.residual_window);
    o.fields.stride = integer(s, "stride", w, o.fields.stride);
    o.fields.guard = number(s, "guard", w, o.fields.guard);
    require(o.levels >= 2, "run.validate.levels must be >= 2");
    require(o.bisection_steps >= 0 && o.probe_points >= 1 && o.fields.stride >= 1,
            "run.validate counts must be positive");
    require(o.safety >= 0.0 && o.jump_tol > 0.0 && o.fields.guard > 0.0, "run.validate tolerances must be positive");
    for (double l : o.lambdas) require(l >= -1.0 && l <= 1.0, "run.validate.lambdas must lie in [-1, 1]");
  }
  if (j.contains("evolve")) {
    const json& s = j.at("evolve");
    const std::string w = "run.evolve";
    check_object(s, w, {"initial_steps", "max_refinements", "rel_tol", "abs_tol", "time_exponent", "h_stride"});
    auto& o = rc.interface.psi;
    o.initial_steps = integer(s, "initial_steps", w, o.initial_steps);
    o.max_refinements = integer(s, "max_refinements", w, o.max_refinements);
    o.rel_tol = number(s, "rel_tol", w, o.rel_tol);
    o.abs_tol = number(s, "abs_tol", w, o.abs_tol);
    o.time_exponent = number(s, "time_exponent", w, o.time_exponent);
    o.h_stride = integer(s, "h_stride", w, o.h_stride);
    require(o.initial_steps >= 1 && o.max_refinements >= 1 && o.h_stride >= 1, "run.evolve counts must be positive");
    require(o.rel_tol > 0.0 && o.abs_tol >= 0.0 && o.time_exponent >= 1.0, "run.evolve tolerances are invalid");
  }
}

}  // namespace

RunConfig parse_run_config(const json& doc) {
  check_object(doc, "config", {"profile", "speed", "mixing", "quadrature", "grids", "run", "conventions"});
  RunConfig rc;
  if (doc.contains("profile")) rc.profile = checked_profile(doc.at("profile"), "profile");
  if (doc.contains("speed")) rc.speed = checked_profile(doc.at("speed"), "speed");
  if (doc.contains("mixing")) {
    const json& m = doc.at("mixing");
    check_object(m, "mixing", {"N", "alpha", "beta", "T"});
    if (m.contains("N")) {
      const json& n = m.at("N");
      if (n.is_string() && n.get<std::string>() == "auto")
        rc.N.reset();
      else if (n.is_number_integer() && n.get<int>() >= 1)
        rc.N = n.get<int>();
      else
        throw ConfigError("'mixing.N' must be a positive integer or \"auto\"");
    }
    rc.alpha = number(m, "alpha", "mixing", rc.alpha);
    rc.beta = number(m, "beta", "mixing", rc.beta);
    rc.T = number(m, "T", "mixing", rc.T);
  }
  if (doc.contains("quadrature")) parse_quadrature(doc.at("quadrature"), rc.quad);
  rc.quad.alpha = rc.alpha;
  if (doc.contains("grids")) {
    const json& g = doc.at("grids");
    check_object(g, "grids", {"half_width", "points", "grading"});
    rc.grid_half_width = number(g, "half_width", "grids", rc.grid_half_width);
    rc.grid_points = integer(g, "points", "grids", rc.grid_points);
    rc.grid_grading = number(g, "grading", "grids", rc.grid_grading);
    require(rc.grid_half_width > 0.0 && rc.grid_points >= 3 && rc.grid_grading >= 0.0, "'grids' values are invalid");
  }
  if (doc.contains("conventions")) {
    const json& c = doc.at("conventions");
    check_object(c, "conventions", {"cbar", "speed_gradient"});
    if (c.contains("cbar")) {
      if (!c.at("cbar").is_string()) throw ConfigError("'conventions.cbar' must be \"literal\" or \"doubled\"");
      try {
        rc.cbar = parse_cbar_convention(c.at("cbar").get<std::string>());
      } catch (const std::exception& e) {
        throw ConfigError(std::string("'conventions.cbar': ") + e.what());
      }
    }
    rc.speed_gradient = boolean(c, "speed_gradient", "conventions", rc.speed_gradient);
  }
  if (doc.contains("run")) parse_run(doc.at("run"), rc);

  rc.interface.table.window = rc.grid_half_width;
  rc.interface.table.points = rc.grid_points;
  rc.interface.table.grading = rc.grid_grading;
  rc.interface.table.quad = rc.quad;
  rc.interface.psi.quad.alpha = rc.alpha;
  rc.certify.fields.quad = rc.quad;
  return rc;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_run_config(doc);
}

json to_json(const RunConfig& rc) {
  json mixing = {{"alpha", rc.alpha}, {"beta", rc.beta}, {"T", rc.T}};
  mixing["N"] = rc.N ? json(*rc.N) : json("auto");
  const auto& id = rc.identities;
  const auto& ex = rc.expand;
  const auto& fi = rc.fields;
  const auto& ce = rc.certify;
  const auto& ps = rc.interface.psi;
  return {
      {"profile", rc.profile},
      {"speed", rc.speed},
      {"mixing", mixing},
      {"quadrature",
       {{"rel_tol", rc.quad.rel_tol},
        {"abs_tol", rc.quad.abs_tol},
        {"r0", rc.quad.r0},
        {"max_doublings", rc.quad.max_doublings},
        {"grading_ratio", rc.quad.grading_ratio},
        {"max_depth", rc.quad.max_depth},
        {"max_panels", rc.quad.max_panels}}},
      {"grids", {{"half_width", rc.grid_half_width}, {"points", rc.grid_points}, {"grading", rc.grid_grading}}},
      {"run",
       {{"identities",
         {{"sigma_points", id.sigma_points},
          {"hilbert_half_width", id.hilbert_half_width},
          {"hilbert_points", id.hilbert_points},
          {"test_function", id.test_function},
          {"offset_c", id.offset_c},
          {"offset_half_width", id.offset_half_width},
          {"offset_points", id.offset_points},
          {"symmetric_c", id.symmetric_c},
          {"symmetric_probes", id.symmetric_probes},
          {"integral_c", id.integral_c},
          {"integral_probes", id.integral_probes},
          {"max_layers", id.max_layers}}},
        {"expand",
         {{"levels", ex.levels},
          {"stride", ex.stride},
          {"window", ex.window},
          {"cbar_probes", ex.cbar_probes},
          {"cbar_levels", ex.cbar_levels}}},
        {"fields",
         {{"t", fi.t},
          {"x1_min", fi.x1_min},
          {"x1_max", fi.x1_max},
          {"x1_points", fi.x1_points},
          {"x2_min", fi.x2_min},
          {"x2_max", fi.x2_max},
          {"x2_points", fi.x2_points}}},
        {"validate",
         {{"levels", ce.levels},
          {"bisection_steps", ce.bisection_steps},
          {"safety", ce.safety},
          {"jump_tol", ce.jump_tol},
          {"probe_window", ce.probe_window},
          {"probe_points", ce.probe_points},
          {"lambdas", ce.lambdas},
          {"residual_window", ce.residual_window},
          {"stride", ce.fields.stride},
          {"guard", ce.fields.guard}}},
        {"evolve",
         {{"initial_steps", ps.initial_steps},
          {"max_refinements", ps.max_refinements},
          {"rel_tol", ps.rel_tol},
          {"abs_tol", ps.abs_tol},
          {"time_exponent", ps.time_exponent},
          {"h_stride", ps.h_stride}}}}},
      {"conventions", {{"cbar", to_string(rc.cbar)}, {"speed_gradient", rc.speed_gradient}}},
  };
}

MixingConfig make_mixing_config(const RunConfig& rc) {
  const SamplingGrid grid(rc.grid_half_width, rc.grid_points, rc.grid_grading);
  ProfileFunction z0 = make_profile(rc.profile);
  ProfileFunction c = make_profile(rc.speed);
  int N = 0;
  if (rc.N) {
    N = *rc.N;
  } else {
    double c_max = 0.0;
    for (double s : grid.nodes()) c_max = std::max(c_max, c(s));
    if (!(c_max > 0.0 && c_max < 2.0)) throw ConfigError("\"auto\" layer count needs 0 < c_max < 2");
    N = minimal_layers(c_max);
  }
  MixingConfig cfg = make_mixing_config(N, rc.alpha, rc.beta, rc.T, std::move(z0), std::move(c), grid, rc.cbar);
  cfg.speed_gradient_term = rc.speed_gradient;
  return cfg;
}

}  // namespace muskat
