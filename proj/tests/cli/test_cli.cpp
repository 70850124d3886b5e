#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <nlohmann/json.hpp>

#include "modkin/core_math.hpp"

using nlohmann::json;

namespace {

struct Run {
  int exit_code = -1;
  std::string out;  // stdout and stderr interleaved
};

Run run_modkin(const std::string& args) {
  const std::string cmd = std::string("\"") + MODKIN_CLI_PATH + "\" " + args + " 2>&1";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

const double kPrinted[12] = {-0.3535, 0.3827, 0.8535, 309.059,  -0.1464, -0.9239,
                             0.3535,  -142.581, 0.9239, 0.0,     0.3827,  145.67};

std::filesystem::path temp_file(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST_CASE("fk golden pose, text output") {
  const Run r = run_modkin("--robot paper-hybrid4 fk 22,23,22,23");
  REQUIRE(r.exit_code == 0);
  const auto at = r.out.find("pose:");
  REQUIRE(at != std::string::npos);
  std::istringstream rows(r.out.substr(at + 5));
  double m[16];
  for (double& v : m) rows >> v;
  REQUIRE(rows);
  for (int i = 0; i < 12; ++i) CHECK(std::abs(m[i] - kPrinted[i]) < 1e-3);
  CHECK(m[15] == 1.0);
}

TEST_CASE("fk golden pose, structured output") {
  const Run r = run_modkin("--robot paper-hybrid4 --format structured fk 22 23 22 23");
  REQUIRE(r.exit_code == 0);
  const json j = json::parse(r.out);
  const auto m = j.at("pose").at("matrix").get<std::vector<double>>();
  REQUIRE(m.size() == 16);
  for (int i = 0; i < 12; ++i) CHECK(std::abs(m[i] - kPrinted[i]) < 1e-3);
  const auto& serial = j.at("serial_joints");
  CHECK(serial[0].at("theta_deg").get<double>() == doctest::Approx(22.5).epsilon(1e-9));
  CHECK(std::abs(serial[0].at("d_mm").get<double>() - 250.0) < 1e-6);
}

TEST_CASE("dof of the parallel preset") {
  Run r = run_modkin("--robot paper-parallel dof");
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.rfind("dof: 6\n", 0) == 0);

  r = run_modkin("dof --topology parallel --format structured");
  REQUIRE(r.exit_code == 0);
  CHECK(json::parse(r.out).at("dof") == 6);
}

TEST_CASE("ik outside the workspace") {
  Run r = run_modkin("--robot paper-module ik --tip 1000,0");
  CHECK(r.exit_code == 4);
  CHECK(r.out.find("out_of_workspace") != std::string::npos);
  CHECK(r.out.find("outer reach") != std::string::npos);

  r = run_modkin("--robot paper-module ik --tip 5,5");
  CHECK(r.exit_code == 4);
  CHECK(r.out.find("inner reach") != std::string::npos);
}

TEST_CASE("ik round trip through structured output") {
  const Run fk = run_modkin("--robot paper-hybrid6 --format structured fk 10,40,-20,15,30,35");
  REQUIRE(fk.exit_code == 0);
  const json f = json::parse(fk.out);
  std::string pose;
  for (double v : f.at("pose").at("matrix")) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g,", v);
    pose += buf;
  }
  pose.pop_back();
  const double d6 = f.at("serial_joints")[2].at("d_mm").get<double>();
  char d6s[40];
  std::snprintf(d6s, sizeof d6s, "%.17g", d6);
  const Run ik = run_modkin("--robot paper-hybrid6 --format structured ik --d6 " + std::string(d6s) +
                        " --pose=" + pose);
  REQUIRE(ik.exit_code == 0);
  const auto act = json::parse(ik.out).at("actuators_deg").get<std::vector<double>>();
  const double want[6] = {10, 40, -20, 15, 30, 35};
  REQUIRE(act.size() == 6);
  for (int i = 0; i < 6; ++i) CHECK(std::abs(act[i] - want[i]) < 1e-6);
}

TEST_CASE("radians") {
  const double r22 = modkin::deg_to_rad(22.0), r23 = modkin::deg_to_rad(23.0);
  char args[200];
  std::snprintf(args, sizeof args, "--robot paper-module --radians --format structured fk %.17g,%.17g",
                r22, r23);
  const Run r = run_modkin(args);
  REQUIRE(r.exit_code == 0);
  const json j = json::parse(r.out);
  CHECK(j.at("module").at("theta_rad").get<double>() == doctest::Approx(modkin::deg_to_rad(22.5)));
}

TEST_CASE("exit codes") {
  CHECK(run_modkin("").exit_code == 2);
  CHECK(run_modkin("fk 1,2").exit_code == 2);
  CHECK(run_modkin("--robot paper-hybrid4 fk 1,2").exit_code == 2);
  CHECK(run_modkin("--robot paper-hybrid4 fk 1,x,3,4").exit_code == 2);
  CHECK(run_modkin("--robot nope fk 1,2").exit_code == 3);
  CHECK(run_modkin("--robot paper-module fk 0,175").exit_code == 4);
  CHECK(run_modkin("--robot paper-module --degrees --radians fk 0,1").exit_code == 2);
  CHECK(run_modkin("--help").exit_code == 0);
}

TEST_CASE("config file") {
  const auto good = temp_file("modkin_cli_robot.json", R"({
    "schema_version": 1, "name": "short-module", "kind": "module",
    "modules": [{"a_mm": 80, "c_mm": 10}]
  })");
  Run r = run_modkin("--config " + good.string() + " --format structured fk 0,0");
  REQUIRE(r.exit_code == 0);
  CHECK(json::parse(r.out).at("module").at("l_t_mm").get<double>() == 170.0);

  const auto bad = temp_file("modkin_cli_bad.json", R"({"name": "x", "kind": "module",
    "modules": [{"a_mm": -1}]})");
  r = run_modkin("--config " + bad.string() + " fk 0,0");
  CHECK(r.exit_code == 3);
  CHECK(r.out.find("modules[0].a_mm") != std::string::npos);

  const auto broken = temp_file("modkin_cli_broken.json", "{ not json");
  CHECK(run_modkin("--config " + broken.string() + " --robot x fk 0,0").exit_code == 3);
}

TEST_CASE("show lists presets") {
  const Run r = run_modkin("show");
  REQUIRE(r.exit_code == 0);
  for (const char* name : {"paper-module", "paper-hybrid4", "paper-hybrid6", "paper-parallel"}) {
    CHECK(r.out.find(name) != std::string::npos);
  }
}
