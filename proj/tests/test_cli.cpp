#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "helpers.hpp"

using namespace mtl;

namespace {

const std::filesystem::path kScratch = std::filesystem::temp_directory_path() / "mtl_test_cli";

std::string cfg(const std::string& name) { return std::string(MTL_SOURCE_DIR) + "/configs/" + name + ".cfg"; }

int run(const std::string& args, const std::string& tag) {
  const std::string cmd = std::string(MTL_CLI) + " " + args + " > " + (kScratch / (tag + ".out")).string() + " 2> " +
                          (kScratch / (tag + ".err")).string();
  std::filesystem::create_directories(kScratch);
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string output(const std::string& tag) { return read_file(kScratch / (tag + ".out")); }

}  // namespace

TEST_CASE("validate prints the audit") {
  const std::string dir = (kScratch / "validate").string();
  CHECK(run("validate " + cfg("three_wave_1d") + " --out " + dir, "validate") == 0);
  const std::string out = output("validate");
  CHECK(out.find("gauge invariances: 1") != std::string::npos);
  CHECK(out.find("synchronous: yes") != std::string::npos);
  CHECK(std::filesystem::exists(std::filesystem::path(dir) / "audit.json"));
}

TEST_CASE("analyze below the threshold is inconclusive") {
  const std::string dir = (kScratch / "low").string();
  CHECK(run("analyze " + cfg("quadratic_sync_1d") + " --set sigma=1 --out " + dir, "low") == kExitInconclusive);
  CHECK(output("low").find("INCONCLUSIVE") != std::string::npos);
  const Json report = Json::parse(read_file(std::filesystem::path(dir) / "report.json"));
  CHECK(report["verdict"] == "INCONCLUSIVE");
}

TEST_CASE("analyze above the threshold, then reuse the profile") {
  const std::string dir = (kScratch / "high").string();
  CHECK(run("analyze " + cfg("quadratic_sync_1d") + " --set sigma=40 --out " + dir, "high") == 0);
  CHECK(run("groundstate " + cfg("quadratic_sync_1d") + " --set sigma=40 --out " + dir, "gs") == 0);
  const std::string again = (kScratch / "again").string();
  CHECK(run("analyze " + cfg("quadratic_sync_1d") + " --set sigma=40 --profile " + dir + "/profile.mtl1 --out " + again,
            "again") == 0);
  const Json a = Json::parse(read_file(std::filesystem::path(dir) / "report.json"));
  const Json b = Json::parse(read_file(std::filesystem::path(again) / "report.json"));
  CHECK(a["matrix"] == b["matrix"]);
  CHECK(a["verdict"] == b["verdict"]);
}

TEST_CASE("three-wave analyze at d = 1") {
  const std::string dir = (kScratch / "three").string();
  const int code = run("analyze " + cfg("three_wave_1d") + " --out " + dir, "three");
  const Json report = Json::parse(read_file(std::filesystem::path(dir) / "report.json"));
  CHECK(code == (report["verdict"] == "UNSTABLE" ? 0 : kExitInconclusive));
  CHECK(report["eigenvalues"].size() == 3);
}

TEST_CASE("decoupled system warns about multiple gauge invariances") {
  const std::filesystem::path path = kScratch / "decoupled.cfg";
  std::filesystem::create_directories(kScratch);
  write_file_atomic(path, R"(
[system]
dimension = 1
lambda = 1, 1
omega = 1, 1

[system.term.self_u]
coefficient = -1/2
p = 2, 0
q = 2, 0

[system.term.self_v]
coefficient = -1/2
p = 0, 2
q = 0, 2
)");
  CHECK(run("validate " + path.string() + " --out " + (kScratch / "dec").string(), "dec") == 0);
  CHECK(output("dec").find("multiple gauge invariances: mass-transfer mechanism vacuous") != std::string::npos);
}

TEST_CASE("config errors exit 4 and leave error.json") {
  const std::filesystem::path path = kScratch / "broken.cfg";
  std::filesystem::create_directories(kScratch);
  write_file_atomic(path, "[system]\ndimension = 1\nlambda = 1\nomega = 1\nbogus = 2\n");
  const std::string dir = (kScratch / "broken").string();
  CHECK(run("analyze " + path.string() + " --out " + dir, "broken") == kExitConfigError);
  const Json err = Json::parse(read_file(std::filesystem::path(dir) / "error.json"));
  CHECK(err["exit_code"] == kExitConfigError);
  CHECK(err["kind"] == "config");
  CHECK(err["message"].get<std::string>().find("unknown key 'bogus'") != std::string::npos);
  CHECK(run("analyze " + cfg("quadratic_sync_1d") + " --set nosuch=1 --out " + dir, "nosuch") == kExitConfigError);
  CHECK(run("frobnicate", "usage") == kExitConfigError);
}

TEST_CASE("simulate writes trace and events") {
  const std::string dir = (kScratch / "sim").string();
  CHECK(run("simulate " + cfg("quadratic_sync_1d") +
                " --set sigma=40 --set simulate.final_time=0.5 --set simulate.stop_at_threshold=false --out " + dir,
            "sim") == 0);
  const std::string csv = read_file(std::filesystem::path(dir) / "trace.csv");
  CHECK(csv.rfind("time,mass,hamiltonian,mass_1,mass_2,orbit_distance,virial,virial_rate\n", 0) == 0);
  CHECK(Json::parse(read_file(std::filesystem::path(dir) / "events.json")).is_array());
}

TEST_CASE("sweep finds the d = 1 threshold") {
  const std::string dir = (kScratch / "sweep").string();
  CHECK(run("sweep " + cfg("quadratic_sync_1d") + " --set criterion.sweep_min=20 --set criterion.sweep_max=40 " +
                "--set criterion.sweep_steps=4 --out " + dir,
            "sweep") == 0);
  const Json sweep = Json::parse(read_file(std::filesystem::path(dir) / "sweep.json"));
  REQUIRE(sweep["threshold"].is_number());
  CHECK(std::abs(sweep["threshold"].get<double>() - *quadratic_threshold_oracle(1).threshold) <= 1e-3);
}
