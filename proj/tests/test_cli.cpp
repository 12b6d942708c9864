#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "h2kin/mechanism.hpp"
#include "units.hpp"

namespace fs = std::filesystem;
using namespace h2kin::cli;

namespace {

fs::path scratch_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("h2kin_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// Runs the executable with `args`, stdout and stderr to `log`; returns the exit code.
int run(const std::string& args, const fs::path& log) {
  std::string cmd = std::string(H2KIN_EXE) + " " + args + " > \"" + log.string() + "\" 2>&1";
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("quantities with unit suffixes") {
  CHECK(parse_quantity("1atm", Quantity::Pressure) == 101325.0);
  CHECK(parse_quantity("2.5 bar", Quantity::Pressure) == 2.5e5);
  CHECK(parse_quantity("5um", Quantity::Length) == doctest::Approx(5e-6));
  CHECK(parse_quantity("5\xC2\xB5m", Quantity::Length) == doctest::Approx(5e-6));
  CHECK(parse_quantity("0.2mm", Quantity::Length) == doctest::Approx(2e-4));
  CHECK(parse_quantity("35cm/s", Quantity::Velocity) == doctest::Approx(0.35));
  CHECK(parse_quantity("20ms", Quantity::Time) == doctest::Approx(0.02));
  CHECK(parse_quantity("1200K", Quantity::Temperature) == 1200.0);
  CHECK(parse_quantity("1200", Quantity::Temperature) == 1200.0);
  CHECK(parse_quantity("1.5", Quantity::Dimensionless) == 1.5);
}

TEST_CASE("bare numbers and foreign units are rejected where a unit is required") {
  CHECK_THROWS_AS(parse_quantity("1", Quantity::Pressure), UnitError);
  CHECK_THROWS_AS(parse_quantity("5", Quantity::Length), UnitError);
  CHECK_THROWS_AS(parse_quantity("5K", Quantity::Length), UnitError);
  CHECK_THROWS_AS(parse_quantity("abc", Quantity::Temperature), UnitError);
  CHECK_THROWS_AS(parse_quantity("1.5m", Quantity::Dimensionless), UnitError);
}

TEST_CASE("lists and ranges") {
  auto T = parse_list("1000:1400:50", Quantity::Temperature);
  REQUIRE(T.size() == 9);
  CHECK(T.front() == 1000.0);
  CHECK(T.back() == doctest::Approx(1400.0));
  auto phi = parse_list("0.5,1,4.5", Quantity::Dimensionless);
  CHECK(phi == std::vector<double>{0.5, 1.0, 4.5});
  CHECK(parse_list("0.5:4.5:0.5", Quantity::Dimensionless).size() == 9);
  CHECK_THROWS_AS(parse_list("1:2", Quantity::Dimensionless), UnitError);
  CHECK_THROWS_AS(parse_list("2:1:0.1", Quantity::Dimensionless), UnitError);
}

TEST_CASE("spacing ladder") {
  auto dx = parse_spacing_list("0.2um:200um");
  std::vector<double> expect{0.2, 0.25, 0.4, 0.5, 1, 2, 2.5, 4, 5, 10, 20, 25, 40, 50, 100, 200};
  REQUIRE(dx.size() == expect.size());
  for (std::size_t i = 0; i < dx.size(); ++i) CHECK(dx[i] == doctest::Approx(expect[i] * 1e-6));
  CHECK(parse_spacing_list("2.5um,5um,40um").size() == 3);
}

TEST_CASE("version and mechanism summary") {
  fs::path dir = scratch_dir("info");
  CHECK(run("--version", dir / "v.txt") == 0);
  CHECK(slurp(dir / "v.txt") == std::string(H2KIN_VERSION) + "\n");
  CHECK(run("mech-info --builtin skeletal", dir / "a.txt") == 0);
  std::string out = slurp(dir / "a.txt");
  CHECK(out.find("species 9, reactions 14, bath gas N2") != std::string::npos);
  CHECK(out.find("validation: ok") != std::string::npos);
  CHECK(run("mech-info --builtin skeletal", dir / "b.txt") == 0);
  CHECK(slurp(dir / "b.txt") == out);
}

TEST_CASE("mechanism errors map to exit codes") {
  fs::path dir = scratch_dir("mech");
  std::string text(h2kin::builtin_skeletal_text());

  std::string bad_syntax = text;
  bad_syntax.replace(bad_syntax.find("5.08e+4"), 7, "5.08q4");
  std::ofstream(dir / "syntax.mech") << bad_syntax;
  CHECK(run("mech-info --mech " + (dir / "syntax.mech").string(), dir / "s.txt") == 2);
  CHECK(slurp(dir / "s.txt").find("line 72") != std::string::npos);

  std::string bad_eff = text;
  bad_eff.replace(bad_eff.find("EFF H:1.0 H2:2.5"), 16, "EFF H:-1.0 H2:2.5");
  std::ofstream(dir / "eff.mech") << bad_eff;
  CHECK(run("mech-info --mech " + (dir / "eff.mech").string(), dir / "e.txt") == 3);
  CHECK(run("ignite --T0 1200K --mech " + (dir / "eff.mech").string() + " --out " + dir.string(), dir / "e2.txt") ==
        3);

  CHECK(run("ignite --mech " + (dir / "missing.mech").string(), dir / "m.txt") == 2);
}

TEST_CASE("argument and range errors") {
  fs::path dir = scratch_dir("args");
  CHECK(run("no-such-command", dir / "a.txt") == 2);
  CHECK(run("ignite --P 1 --out " + dir.string(), dir / "b.txt") == 2);
  CHECK(run("ignite --T0 -5K --out " + dir.string(), dir / "c.txt") == 3);
  CHECK(run("flame --phi 0 --out " + dir.string(), dir / "d.txt") == 3);
  CHECK(run("flame --cells 20 --out " + dir.string(), dir / "e.txt") == 3);
  CHECK(run("flame-sweep --phi 0.5,-1 --out " + dir.string(), dir / "f.txt") == 3);
  CHECK(run("grid-study --dx 5 --out " + dir.string(), dir / "g.txt") == 2);
  CHECK_FALSE(fs::exists(dir / "flame.json"));
}

TEST_CASE("ignite writes a config-echoing JSON and a trajectory") {
  fs::path dir = scratch_dir("ignite");
  REQUIRE(run("ignite --T0 1200 --P 1atm --phi 1.0 --mech skeletal --out " + dir.string(), dir / "log.txt") == 0);
  auto j = nlohmann::json::parse(slurp(dir / "ignite.json"));
  CHECK(j["version"] == H2KIN_VERSION);
  CHECK(j["config"]["T0_K"] == 1200.0);
  CHECK(j["config"]["P_Pa"] == 101325.0);
  CHECK(j["result"]["status"] == "ignited");
  CHECK(j["result"]["delay_s"].get<double>() == doctest::Approx(3.7158e-5).epsilon(0.02));
  std::string csv = slurp(dir / "ignite_trajectory.csv");
  CHECK(csv.rfind("t_s,T_K,P_Pa,Y_H2", 0) == 0);
}

TEST_CASE("inert composition is reported as not ignited with exit 0") {
  fs::path dir = scratch_dir("inert");
  CHECK(run("ignite --T0 1200 --X N2:1 --t-end 1ms --out " + dir.string(), dir / "log.txt") == 0);
  auto j = nlohmann::json::parse(slurp(dir / "ignite.json"));
  CHECK(j["result"]["status"] == "not-ignited");
  CHECK(j["result"]["delay_s"].is_null());
}

TEST_CASE("ignition sweep is monotone and byte-identical across runs and job counts") {
  fs::path a = scratch_dir("sweep_a"), b = scratch_dir("sweep_b");
  REQUIRE(run("ignite-sweep --T0 1000:1400:50 --out " + a.string(), a / "log.txt") == 0);
  REQUIRE(run("ignite-sweep --T0 1000:1400:50 --jobs 3 --out " + b.string(), b / "log.txt") == 0);
  CHECK(slurp(a / "ignite_sweep.csv") == slurp(b / "ignite_sweep.csv"));
  CHECK(slurp(a / "ignite_sweep.json") == slurp(b / "ignite_sweep.json"));
  auto j = nlohmann::json::parse(slurp(a / "ignite_sweep.json"));
  REQUIRE(j["rows"].size() == 9);
  for (std::size_t i = 1; i < 9; ++i) CHECK(j["rows"][i]["delay_s"].get<double>() < j["rows"][i - 1]["delay_s"].get<double>());

  REQUIRE(run("report " + (a / "ignite_sweep.json").string() + " --out " + (a / "report").string(), a / "r.txt") == 0);
  auto rep = nlohmann::json::parse(slurp(a / "report" / "report.json"));
  CHECK(rep["verdicts"][0]["passed"] == true);
  CHECK(run("report " + (a / "ignite_trajectory.csv").string() + " --out " + a.string(), a / "r2.txt") == 2);
}

TEST_CASE("flame failure modes have distinct exit codes") {
  fs::path dir = scratch_dir("flame");
  CHECK(run("flame --phi 0.05 --out " + dir.string(), dir / "ext.txt") == 5);
  auto j = nlohmann::json::parse(slurp(dir / "flame.json"));
  CHECK(j["result"]["status"] == "extinction");
  CHECK(j["config"]["phi"] == 0.05);
  CHECK(run("flame --phi 0.5 --u-in 3.5m/s --no-follow --out " + dir.string(), dir / "blow.txt") == 6);
  CHECK(run("flame --phi 1 --u-in 0.5m/s --no-follow --out " + dir.string(), dir / "flash.txt") == 7);
}
