#include <doctest.h>

#include <fstream>
#include <sstream>

#include "specscen/pipeline.hpp"

namespace cli = specscen::cli;
namespace eval = specscen::eval;
namespace world = specscen::world;
using std::filesystem::path;
using nlohmann::json;

namespace {

path scratch(const std::string& name) {
  const path p = cli::fs::temp_directory_path() / ("specscen_unit_" + name);
  cli::fs::remove_all(p);
  cli::fs::create_directories(p);
  return p;
}

cli::RunConfig small_config(const path& out) {
  cli::RunConfig c;
  c.specs = {path(SPECSCEN_SOURCE_DIR) / "specs" / "phi3.spec"};
  c.scenes_per_rg = 1;
  c.paths_per_scene = 1;
  c.duration = 6.0;
  c.permutations = 20;
  c.out = out;
  return c;
}

std::string slurp(const path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Relative path -> contents, for every regular file under `root`.
std::map<std::string, std::string> snapshot(const path& root) {
  std::map<std::string, std::string> m;
  for (const auto& e : cli::fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) m[cli::fs::relative(e.path(), root).generic_string()] = slurp(e.path());
  return m;
}

}  // namespace

TEST_CASE("run configuration parsing") {
  const json j = {{"specs", {"a.spec"}},
                  {"world", {{"grid", {{"blocks_x", 1}, {"blocks_y", 3}, {"control", "signal"}}}}},
                  {"budgets", {{"Car", 2}}},
                  {"speed_law", {{"v0", 5.0}, {"printed_sign", true}}},
                  {"seed", 42},
                  {"out", "results"}};
  const auto c = cli::RunConfig::from_json(j, "/base");
  REQUIRE(c.specs.size() == 1);
  CHECK(c.specs[0] == path("/base/a.spec"));
  CHECK(c.grid.blocks_x == 1);
  CHECK(c.grid.blocks_y == 3);
  CHECK(c.grid.control == world::Control::Signal);
  CHECK(c.budgets.at("Car") == 2);
  CHECK(c.speed_law.printed_sign);
  CHECK(c.speed_law.v0 == 5.0);
  CHECK(c.seed == 42);
  CHECK(c.out == path("/base/results"));
  CHECK(c.scenes_per_rg == 2);

  const auto again = cli::RunConfig::from_json(c.to_json());
  CHECK(again.to_json() == c.to_json());
}

TEST_CASE("run configuration errors") {
  const std::string spec = (path(SPECSCEN_SOURCE_DIR) / "specs" / "phi3.spec").string();
  auto checked = [&](json j) {
    j["specs"] = {spec};
    cli::RunConfig::from_json(j).validate();
  };
  CHECK_NOTHROW(checked(json::object()));
  CHECK_THROWS_AS(checked({{"sedd", 3}}), cli::ConfigError);
  CHECK_THROWS_AS(checked({{"seed", "one"}}), cli::ConfigError);
  CHECK_THROWS_AS(checked({{"rate", -1.0}}), cli::ConfigError);
  CHECK_THROWS_AS(checked({{"agent", "reckless"}}), cli::ConfigError);
  CHECK_THROWS_AS(checked({{"multiplier", 3}}), cli::ConfigError);
  CHECK_THROWS_AS(checked({{"speed_law", {{"v_min", 20.0}}}}), cli::ConfigError);
  CHECK_THROWS_AS(cli::RunConfig::from_json({{"specs", json::array()}}).validate(), cli::ConfigError);
  CHECK_THROWS_AS(cli::RunConfig::from_json({{"specs", {"/nonexistent.spec"}}}).validate(), cli::ConfigError);
  CHECK_THROWS_AS(cli::load_run_config("/nonexistent/config.json"), cli::ConfigError);
}

TEST_CASE("simulating nothing is a no-op") {
  const auto o = cli::cmd_simulate_scripts({}, "follower", 1);
  CHECK(o.exit_code() == 0);
  CHECK(o.reports.empty());
}

TEST_CASE("generate is deterministic and run-all reports coverage") {
  const path a = scratch("gen_a");
  const path b = scratch("gen_b");
  auto ca = small_config(a);
  auto cb = small_config(b);
  CHECK(cli::cmd_generate(ca).exit_code() == 0);
  CHECK(cli::cmd_generate(cb).exit_code() == 0);
  const auto sa = snapshot(a);
  CHECK(sa.count("phi3/world.json") == 1);
  CHECK(sa.count("phi3/rgs/index.json") == 1);
  CHECK(sa == snapshot(b));

  const auto o = cli::cmd_run_all(ca);
  REQUIRE(o.reports.size() == 1);
  const auto& r = o.reports[0];
  CHECK(r.spec == "phi3");
  CHECK(r.total_configurations == 7);
  CHECK(r.cov1_denominator() >= 1);
  CHECK(cli::fs::exists(a / "phi3" / "reports" / "coverage.json"));
  CHECK(cli::fs::exists(a / "phi3" / "reports" / "curve.csv"));

  // Evaluating again from the stored traces gives the same report.
  const auto e = cli::cmd_evaluate(ca);
  REQUIRE(e.reports.size() == 1);
  CHECK(eval::dump_report(e.reports) == eval::dump_report(o.reports));

  cli::fs::remove_all(a);
  cli::fs::remove_all(b);
}
