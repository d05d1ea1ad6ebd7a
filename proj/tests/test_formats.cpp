#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "helpers.hpp"
#include "mtl/error.hpp"

using namespace mtl;

namespace {

// Set MTL_UPDATE_GOLDEN=1 to rewrite the files after an intentional format change.
void check_golden(const std::string& name, const std::string& actual) {
  const std::filesystem::path path = std::filesystem::path(MTL_GOLDEN_DIR) / name;
  if (std::getenv("MTL_UPDATE_GOLDEN")) write_file_atomic(path, actual);
  REQUIRE(std::filesystem::exists(path));
  const std::string expected = read_file(path);
  CHECK(expected.size() == actual.size());
  CHECK(expected == actual);
}

ProfileFile small_profile() {
  ProfileFile f;
  f.grid = Grid{1, 2.0, 16};
  f.components = 2;
  f.omega = {1.0, 2.0};
  f.residuals = {{1e-12, 3e-13}, {2.5e-12, 4e-13}};
  for (int j = 0; j < 2; ++j) {
    RealField p(16);
    for (int i = 0; i < 16; ++i) p[i] = (j + 1) / (1.0 + (i - 8) * (i - 8));
    f.profiles.push_back(p);
  }
  return f;
}

SimulationTrace small_trace() {
  SimulationTrace t;
  t.times = {0.0, 0.5};
  t.total_mass = {3.0, 3.0000000000000004};
  t.hamiltonian = {-1.25, -1.2499999};
  t.component_masses = {{1.0, 1.1}, {1.0, 0.95}};
  t.orbit_distance = {1e-3, 2e-3};
  t.virial = {4.0, 4.5};
  t.virial_rate = {0.0, 1.0 / 3.0};
  t.virial_second = {NAN, NAN};
  t.gradient_norm = {1.0, 1.0};
  t.events = {{0.5, EventKind::ThresholdExit, "orbit distance above epsilon", 2e-3}};
  return t;
}

}  // namespace

TEST_CASE("MTL1 profile format") {
  const ProfileFile f = small_profile();
  const std::string bytes = encode_profile(f);
  check_golden("profile.mtl1", bytes);
  const ProfileFile back = decode_profile(bytes);
  CHECK(back.grid == f.grid);
  CHECK(back.omega == f.omega);
  CHECK(back.profiles == f.profiles);
  CHECK(back.residuals[1].l2 == f.residuals[1].l2);
  CHECK(encode_profile(back) == bytes);

  CHECK_THROWS_AS(decode_profile("MTL2" + bytes.substr(4)), Error);
  CHECK_THROWS_AS(decode_profile(bytes.substr(0, bytes.size() - 8)), Error);
  std::string extra = bytes;
  extra.insert(extra.find("points"), "colour blue\n");
  CHECK_THROWS_AS(decode_profile(extra), Error);
}

TEST_CASE("profile file round trip through disk") {
  const auto dir = std::filesystem::temp_directory_path() / "mtl_test_formats";
  const ProfileFile f = small_profile();
  write_profile(dir / "p.mtl1", f);
  CHECK(read_profile(dir / "p.mtl1").profiles == f.profiles);
  std::filesystem::remove_all(dir);
}

TEST_CASE("report JSON format") {
  const test::Solved s = test::solve("quadratic_sync_1d", {"sigma=40"});
  const std::string text = dump_json(report_to_json(s.cfg.spec, s.gs.state, s.report)) + "\n";
  check_golden("report.json", text);
  const Json j = Json::parse(text);
  CHECK(j["format"] == "mtl-report/1");
  CHECK(j["verdict"] == "UNSTABLE");
  CHECK(j["provenance"]["spec_hash"] == spec_hash_hex(s.cfg.spec));
}

TEST_CASE("spec hash distinguishes systems") {
  CHECK(spec_hash(test::shipped("quadratic_sync_1d").spec) == spec_hash(builtin_config("quadratic_sync_1d").spec));
  CHECK(spec_hash(test::shipped("quadratic_sync_1d").spec) !=
        spec_hash(test::shipped("quadratic_sync_1d", {"sigma=2"}).spec));
  CHECK(spec_hash_hex(test::shipped("rabi_2d").spec).size() == 16);
}

TEST_CASE("trace CSV format") {
  check_golden("trace.csv", trace_to_csv(small_trace()));
}

TEST_CASE("events JSON format") {
  check_golden("events.json", dump_json(events_to_json(small_trace().events)) + "\n");
}

TEST_CASE("config format") {
  const RunConfig cfg = parse_config(std::filesystem::path(MTL_GOLDEN_DIR) / "example.cfg");
  check_golden("example.audit.json", dump_json(audit(cfg)) + "\n");
}

TEST_CASE("JSON number formatting") {
  Json j;
  j["a"] = 0.1;
  j["b"] = std::vector<double>{1.0, -2.5e-300};
  j["c"] = std::numeric_limits<double>::infinity();
  j["n"] = 3;
  CHECK(dump_json(j, 0).find("0.10000000000000001") != std::string::npos);
  CHECK(dump_json(j, 2).find("\"c\": null") != std::string::npos);
  CHECK(format_double(1.0) == "1");
}
