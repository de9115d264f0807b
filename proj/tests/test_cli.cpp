// End-to-end checks of the command-line tool: exit codes, report and CSV
// artifacts, manifest validation and seeded determinism.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "biflat/report.hpp"

using namespace biflat;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(BIFLAT_CLI_PATH) + " " + args +
                          " > /tmp/biflat_cli_stdout.json 2> /dev/null";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("verify subcommand passes and writes a report") {
  const int rc = run_cli(
      "verify --model epsilon --n 3 --eps 0.5 --points 10 --seed 7 "
      "--output /tmp/biflat_verify.json");
  CHECK(rc == 0);
  const Json rep = load_manifest("/tmp/biflat_verify.json");
  CHECK(rep["pass"] == true);
  CHECK(rep["tool"] == "biflat");
  CHECK(rep["seed"] == 7);
  CHECK(rep["checks"].size() >= 14);
  std::remove("/tmp/biflat_verify.json");
}

TEST_CASE("lame eigen reports the +-2 eigenvalues for C1=1, C2=-4") {
  const int rc = run_cli(
      "lame eigen --n 2 --C1 1 --C2 -4 --output /tmp/biflat_eigen.json");
  CHECK(rc == 0);
  const Json rep = load_manifest("/tmp/biflat_eigen.json");
  const auto& vals = rep["results"]["eigenvalues"];
  REQUIRE(vals.size() == 2);
  CHECK(std::abs(vals[0]["re"].get<double>() + 2.0) < 1e-10);
  CHECK(std::abs(vals[1]["re"].get<double>() - 2.0) < 1e-10);
  CHECK(std::abs(vals[0]["im"].get<double>()) < 1e-10);
  std::remove("/tmp/biflat_eigen.json");
}

TEST_CASE("ode3 integrate emits the fixed CSV schema with constant columns") {
  const int rc = run_cli(
      "ode3 integrate --z0 0.5 --z1 0.6 --F0 1,1,1,1,1,1 "
      "--csv /tmp/biflat_traj.csv");
  CHECK(rc == 0);

  std::ifstream in("/tmp/biflat_traj.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "z,F12,F13,F21,F23,F31,F32,mR2,D,sigma_res");

  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> v;
    while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
    REQUIRE(v.size() == 10);
    CHECK(std::abs(v[7] - 3.0) < 1e-9);  // mR2 constant
    CHECK(std::abs(v[8]) < 1e-9);        // D constant zero
  }
  CHECK(rows > 10);
}

TEST_CASE("identical manifests produce byte-identical csv bodies") {
  Json manifest = {{"command", "ode3-integrate"},
                   {"z0", 0.45},
                   {"z1", 0.6},
                   {"F0", {0.8, -0.5, 0.6, 0.4, 0.9, -0.2}},
                   {"seed", 11},
                   {"csv", "/tmp/biflat_det_a.csv"}};
  write_report_atomic("/tmp/biflat_manifest.json", manifest);
  CHECK(run_cli("run /tmp/biflat_manifest.json") == 0);
  manifest["csv"] = "/tmp/biflat_det_b.csv";
  write_report_atomic("/tmp/biflat_manifest.json", manifest);
  CHECK(run_cli("run /tmp/biflat_manifest.json") == 0);

  const std::string a = slurp("/tmp/biflat_det_a.csv");
  const std::string b = slurp("/tmp/biflat_det_b.csv");
  CHECK(!a.empty());
  CHECK(a == b);
  std::remove("/tmp/biflat_det_a.csv");
  std::remove("/tmp/biflat_det_b.csv");
  std::remove("/tmp/biflat_manifest.json");
}

TEST_CASE("manifest with an unknown key is rejected with exit 2") {
  Json manifest = {{"command", "ode3-integrate"},
                   {"z0", 0.45},
                   {"z1", 0.6},
                   {"F0", {1, 1, 1, 1, 1, 1}},
                   {"seed", 11},
                   {"surprise", true}};
  write_report_atomic("/tmp/biflat_manifest.json", manifest);
  CHECK(run_cli("run /tmp/biflat_manifest.json") == 2);
  std::remove("/tmp/biflat_manifest.json");
}

TEST_CASE("manifest without a seed is rejected with exit 2") {
  Json manifest = {{"command", "ode3-integrate"},
                   {"z0", 0.45},
                   {"z1", 0.6},
                   {"F0", {1, 1, 1, 1, 1, 1}}};
  write_report_atomic("/tmp/biflat_manifest.json", manifest);
  CHECK(run_cli("run /tmp/biflat_manifest.json") == 2);
  std::remove("/tmp/biflat_manifest.json");
}

TEST_CASE("domain errors exit with code 2") {
  CHECK(run_cli("ode3 integrate --z0 0.5 --z1 1.5 --F0 1,1,1,1,1,1") == 2);
}

TEST_CASE("tolerance override through the environment forces exit 1") {
  const std::string cmd =
      std::string("BIFLAT_TOL_FD=1e-30 ") + BIFLAT_CLI_PATH +
      " verify --model epsilon --n 3 --eps 0.5 --points 3 --seed 7"
      " --output /tmp/biflat_fail.json > /dev/null 2> /dev/null";
  const int rc = WEXITSTATUS(std::system(cmd.c_str()));
  CHECK(rc == 1);
  // the report is still written
  const Json rep = load_manifest("/tmp/biflat_fail.json");
  CHECK(rep["pass"] == false);
  CHECK(rep["tolerances"]["fd"] == 1e-30);
  std::remove("/tmp/biflat_fail.json");
}

TEST_CASE("the shipped example manifests execute cleanly") {
  for (const std::string name : {"verify-epsilon.json", "trajectory.json",
                                 "reconstruct.json", "commute.json"}) {
    const std::string cmd = std::string("cd /tmp && ") + BIFLAT_CLI_PATH +
                            " run " + BIFLAT_MANIFEST_DIR + "/" + name +
                            " > /dev/null 2> /dev/null";
    CHECK_MESSAGE(WEXITSTATUS(std::system(cmd.c_str())) == 0, name);
  }
}
