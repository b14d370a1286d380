#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "muskat/commands.hpp"
#include "muskat/parallel.hpp"

using namespace muskat;
using nlohmann::json;

TEST_CASE("defaults round-trip through JSON") {
  const RunConfig rc = parse_run_config(json::object());
  CHECK(rc.N == 2);
  CHECK(rc.cbar == CbarConvention::doubled);
  const json doc = to_json(rc);
  CHECK(to_json(parse_run_config(doc)) == doc);
}

TEST_CASE("strict parsing") {
  CHECK_THROWS_AS(parse_run_config({{"mixing", {{"Q", 2}}}}), ConfigError);
  CHECK_THROWS_AS(parse_run_config({{"extras", 1}}), ConfigError);
  CHECK_THROWS_AS(parse_run_config({{"mixing", {{"N", 0}}}}), ConfigError);
  CHECK_THROWS_AS(parse_run_config({{"mixing", {{"N", "many"}}}}), ConfigError);
  CHECK_THROWS_AS(parse_run_config({{"conventions", {{"cbar", "tripled"}}}}), ConfigError);
  CHECK_THROWS_AS(parse_run_config({{"profile", {{"type", "gaussian"}, {"w", -1.0}}}}), ConfigError);
  CHECK_THROWS_AS(parse_run_config({{"quadrature", {{"rel_tol", "small"}}}}), ConfigError);
}

TEST_CASE("layer count resolution and gates") {
  RunConfig rc = parse_run_config({{"mixing", {{"N", "auto"}}}});
  CHECK_FALSE(rc.N.has_value());
  CHECK(make_mixing_config(rc).N == 2);
  rc = parse_run_config({{"speed", {{"type", "constant"}, {"a", 1.6}}}, {"mixing", {{"N", "auto"}}}});
  CHECK(make_mixing_config(rc).N == 3);
  rc = parse_run_config({{"speed", {{"type", "constant"}, {"a", 1.95}}}, {"mixing", {{"N", 2}}}});
  CHECK_THROWS_AS(make_mixing_config(rc), ConfigError);
  rc = parse_run_config({{"speed", {{"type", "rational_bump"}, {"a", 0.5}, {"s0", 0.0}, {"w", 1.0}, {"p", 1.0 / 6}}},
                         {"mixing", {{"N", 1}, {"beta", 0.3}}}});
  CHECK_THROWS_AS(make_mixing_config(rc), ConfigError);
}

TEST_CASE("csv output is versioned with 17 significant digits") {
  const auto path = std::filesystem::temp_directory_path() / "muskat_csv_test.csv";
  write_csv(path, {"a", "b"}, {{0.1, 1.0 / 3.0}, {std::nan(""), -2.0}});
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == "# muskat-mix/1\na,b\n0.10000000000000001,0.33333333333333331\nnan,-2\n");
  std::filesystem::remove(path);
}

TEST_CASE("parallel_for is deterministic and reports the first failure") {
  const int saved = thread_count();
  std::vector<double> one(1000), four(1000);
  set_thread_count(1);
  parallel_for(one.size(), [&](std::size_t k) { one[k] = std::sin(0.01 * k); });
  set_thread_count(4);
  parallel_for(four.size(), [&](std::size_t k) { four[k] = std::sin(0.01 * k); });
  CHECK(one == four);
  std::atomic<int> visited{0};
  try {
    parallel_for(100, [&](std::size_t k) {
      ++visited;
      if (k == 17 || k == 80) throw std::runtime_error(std::to_string(k));
    });
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "17");
  }
  set_thread_count(saved);
}
