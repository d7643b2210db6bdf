#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "coulomb2d/cli.hpp"

using namespace c2d;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / "coulomb2d_cli_test" / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

json read_report(const fs::path& file) {
  std::ifstream in(file);
  return json::parse(in);
}

const json& check_named(const json& report, const std::string& name) {
  for (const auto& c : report["checks"])
    if (c["name"] == name) return c;
  throw std::runtime_error("no check " + name);
}

int run_binary(const std::string& args) {
  const std::string cmd = std::string(COULOMB2D_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Cli, BinaryExitCodes) {
  const auto dir = fresh_dir("binary");
  EXPECT_EQ(run_binary("--help"), 0);
  EXPECT_EQ(run_binary("constants --out " + dir.string()), 0);
  EXPECT_TRUE(fs::exists(dir / "constants.json"));
  EXPECT_EQ(run_binary("constants --bogus"), 2);
  EXPECT_EQ(run_binary("no-such-command"), 2);
  EXPECT_EQ(run_binary(""), 2);
}

TEST(Cli, MalformedConfigNamesThePath) {
  const auto dir = fresh_dir("malformed");
  const auto cfg = dir / "bad.json";
  std::ofstream(cfg) << "{\"L\": [1, 2,}";
  auto r = run_cli({"check-lemma-halfplane", "--config", cfg.string(), "--out", dir.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find(cfg.string()), std::string::npos);

  std::ofstream(cfg) << R"({"tolerances": {"no_such": 1}})";
  r = run_cli({"check-lemma-halfplane", "--config", cfg.string(), "--out", dir.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("config.tolerances.no_such"), std::string::npos);

  std::ofstream(cfg) << R"({"density": {"kind": "gaussian", "C": 1, "A": -1}, "nuclei": {"z": 1, "positions": [[0, 0], [2, 0]]}})";
  r = run_cli({"check-lieb-yau", "--config", cfg.string(), "--out", dir.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("density.A"), std::string::npos) << r.err;

  std::ofstream(cfg) << R"({"unknown_key": 3})";
  r = run_cli({"constants", "--config", cfg.string(), "--out", dir.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("config.unknown_key"), std::string::npos);
}

TEST(Cli, RangeChecksOnOptions) {
  EXPECT_EQ(run_cli({"verify-bound", "--n", "4"}).code, 2);
  EXPECT_EQ(run_cli({"verify-xi", "--trials", "0"}).code, 2);
  EXPECT_EQ(run_cli({"check-lemma-halfplane", "--L", "-1", "--out", fresh_dir("neg").string()}).code, 2);
}

TEST(Cli, ConstantsReportAndSidecar) {
  const auto dir = fresh_dir("constants");
  const auto r = run_cli({"constants", "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.out << r.err;
  const auto rep = read_report(dir / "constants.json");
  EXPECT_EQ(rep["schema"], cli::report_schema);
  EXPECT_EQ(rep["command"], "constants");
  EXPECT_TRUE(rep["summary"]["pass"].get<bool>());
  EXPECT_NEAR(check_named(rep, "beta")["value"].get<double>(), 5.9045, 5e-5);
  EXPECT_NEAR(check_named(rep, "C_LSY")["value"].get<double>(), 481.27, 0.01);
  const auto cells = io::read_cell_constants(dir / "cell_constants.json");
  ASSERT_TRUE(cells.has_value());
  EXPECT_NEAR(cells->c_nuc, 4.0 * std::log(1.0 + std::sqrt(2.0)), 1e-8);
}

TEST(Cli, HalfplaneSinglePoint) {
  const auto dir = fresh_dir("halfplane");
  ASSERT_EQ(run_cli({"check-lemma-halfplane", "--L", "1", "--out", dir.string()}).code, 0);
  const auto rep = read_report(dir / "check-lemma-halfplane.json");
  ASSERT_EQ(rep["checks"].size(), 1u);
  EXPECT_NEAR(rep["checks"][0]["expected"].get<double>(), 4.28319, 1e-5);
  EXPECT_EQ(rep["checks"][0]["relation"], "rel");
}

TEST(Cli, VerifyBoundSingleA) {
  const auto dir = fresh_dir("bound");
  const auto r = run_cli({"verify-bound", "--A", "1", "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.out;
  const auto rep = read_report(dir / "verify-bound.json");
  EXPECT_NEAR(check_named(rep, "A_1:E_psi")["value"].get<double>(), -1.2533, 1e-4);
  std::ifstream csv(dir / "verify-bound.csv");
  std::string header, row;
  std::getline(csv, header);
  std::getline(csv, row);
  EXPECT_EQ(header, "A,E_psi,rhs_new,rhs_lsy,margin");
  EXPECT_EQ(std::count(row.begin(), row.end(), ','), 4);
}

TEST(Cli, FailingToleranceGivesExitOne) {
  const auto dir = fresh_dir("fail");
  const auto cfg = dir / "tight.json";
  std::ofstream(cfg) << R"({"tolerances": {"golden_rel": 0}})";
  const auto r = run_cli({"verify-bound", "--A", "1", "--config", cfg.string(), "--out", dir.string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("FAIL A_1:golden_section_epsilon"), std::string::npos);
}

TEST(Cli, ReportsAreDeterministicExceptWallTime) {
  const auto d1 = fresh_dir("det1"), d2 = fresh_dir("det2");
  ASSERT_EQ(run_cli({"check-uncertainty", "--trials", "5", "--out", d1.string()}).code, 0);
  ASSERT_EQ(run_cli({"check-uncertainty", "--trials", "5", "--out", d2.string()}).code, 0);
  auto a = read_report(d1 / "check-uncertainty.json"), b = read_report(d2 / "check-uncertainty.json");
  EXPECT_TRUE(a.contains("wall_time_s"));
  a.erase("wall_time_s");
  b.erase("wall_time_s");
  a["config"].erase("out");
  b["config"].erase("out");
  EXPECT_EQ(a.dump(), b.dump());
  // A different seed changes the trials.
  const auto d3 = fresh_dir("det3");
  ASSERT_EQ(run_cli({"check-uncertainty", "--trials", "5", "--seed", "7", "--out", d3.string()}).code, 0);
  auto c = read_report(d3 / "check-uncertainty.json");
  EXPECT_NE(a["checks"].dump(), c["checks"].dump());
}

TEST(Cli, StabilitySinglePointCsv) {
  const auto dir = fresh_dir("stability");
  ASSERT_EQ(run_cli({"stability", "--a", "2", "--b", "2", "--out", dir.string()}).code, 0);
  std::ifstream csv(dir / "stability.csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "a,b,sigma,z_c,min_M_over_p");
}
