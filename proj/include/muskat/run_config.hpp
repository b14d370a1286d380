#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "muskat/kernels.hpp"
#include "muskat/pseudo_interface.hpp"
#include "muskat/subsolution.hpp"

namespace muskat {

struct IdentitiesOptions {
  std::vector<double> sigma_points{0.0, 0.5, -0.5, 1.0, -1.0, 2.0};
  double hilbert_half_width = 10.0;
  int hilbert_points = 81;
  /// Test function f for the small-offset scalings.
  nlohmann::json test_function = {{"type", "gaussian"}, {"a", 1.0}, {"s0", 0.0}, {"w", 1.0}};
  std::vector<double> offset_c{1.0, 0.5, 0.25, 0.125};
  double offset_half_width = 10.0;
  int offset_points = 41;
  double symmetric_c = 1e-3;
  std::vector<double> symmetric_probes{0.0, 0.5, 1.5};
  std::vector<double> integral_c{1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128, 1.0 / 256, 1.0 / 512};
  std::vector<double> integral_probes{0.5, 1.0, 2.0};
  int max_layers = 6;
};

struct ExpandOptions {
  /// Residual ladder t = T 2^-k.
  std::vector<int> levels{4, 5, 6, 7, 8, 9};
  int stride = 4;
  double window = 20.0;
  std::vector<double> cbar_probes{0.0, 0.5, -0.5};
  std::vector<int> cbar_levels{6, 7, 8, 9, 10, 11};
};

struct FieldsOptions {
  double t = 0.01;
  double x1_min = -5.0, x1_max = 5.0;
  int x1_points = 41;
  double x2_min = -0.5, x2_max = 0.5;
  int x2_points = 41;
};

struct RunConfig {
  nlohmann::json profile = {{"type", "rational_bump"}, {"a", 0.1}, {"s0", 0.0}, {"w", 1.0}};
  nlohmann::json speed = {{"type", "constant"}, {"a", 1.0}};
  std::optional<int> N = 2;  // empty: smallest admissible layer count
  double alpha = 0.5;
  double beta = 0.0;
  double T = 1.0;
  QuadSpec quad = [] {
    QuadSpec q;
    q.rel_tol = 1e-10;
    q.abs_tol = 1e-14;
    return q;
  }();
  /// Working grid for speed gates and norms.
  double grid_half_width = 40.0;
  int grid_points = 801;
  double grid_grading = 4.0;
  PseudoInterfaceOptions interface;
  IdentitiesOptions identities;
  ExpandOptions expand;
  FieldsOptions fields;
  CertifyOptions certify;
  CbarConvention cbar = CbarConvention::doubled;
  bool speed_gradient = true;
};

/// Strict parse: every section is optional, unknown keys are rejected with ConfigError.
RunConfig parse_run_config(const nlohmann::json& doc);
RunConfig load_run_config(const std::filesystem::path& path);
/// Canonical configuration rendered back to JSON (all defaults).
nlohmann::json to_json(const RunConfig& rc);

/// Resolves N ("auto" via minimal_layers) and applies the speed gates.
MixingConfig make_mixing_config(const RunConfig& rc);

}  // namespace muskat
