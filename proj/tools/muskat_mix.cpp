#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "muskat/commands.hpp"
#include "muskat/operators.hpp"
#include "muskat/parallel.hpp"

namespace fs = std::filesystem;
using namespace muskat;

int main(int argc, char** argv) {
  CLI::App app{"Mixing-zone subsolutions for the unstable Muskat problem with variable mixing speed"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir = ".";
  int threads = 0;
  double t = -1.0;
  app.add_option("--config", config_path, "JSON run configuration (defaults are used when omitted)");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--threads", threads, "Worker threads (default: MUSKAT_THREADS or 1)")->check(CLI::NonNegativeNumber);

  auto* identities = app.add_subcommand("identities", "Kernel identities, Hilbert pair and small-offset scalings");
  auto* expand = app.add_subcommand("expand", "Expansion residual ladders and the cbar fit");
  auto* fields = app.add_subcommand("fields", "Sample rho, u, gamma, m and the strict margin on a grid");
  fields->add_option("--t", t, "Sampling time (default: run.fields.t)");
  auto* validate = app.add_subcommand("validate", "Certify the subsolution and report the admissible horizon");
  auto* evolve = app.add_subcommand("evolve", "Solve the psi correction ODE");

  CLI11_PARSE(app, argc, argv);

  try {
    if (threads > 0) set_thread_count(threads);
    const RunConfig rc = config_path.empty() ? parse_run_config(nlohmann::json::object()) : load_run_config(config_path);
    const fs::path out(out_dir);
    fs::create_directories(out);

    if (*identities) {
      run_identities(rc, out);
    } else if (*expand) {
      run_expand(rc, out);
    } else if (*fields) {
      run_fields(rc, t > 0.0 ? t : rc.fields.t, out);
    } else if (*validate) {
      const auto rep = run_validate(rc, out);
      if (!rep.at("report").at("certified").get<bool>()) {
        std::cerr << "not certified: " << rep.at("report").at("failure").get<std::string>() << "\n";
        return exit_uncertified;
      }
    } else if (*evolve) {
      run_evolve(rc, out);
    }
    return exit_ok;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return exit_config;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return exit_numerical;
  } catch (const ProximityError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return exit_numerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_failure;
  }
}
