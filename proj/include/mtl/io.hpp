#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "mtl/criterion.hpp"
#include "mtl/dynamics.hpp"
#include "mtl/groundstate.hpp"

namespace mtl {

using Json = nlohmann::ordered_json;

/// Contents of an MTL1 profile file.
struct ProfileFile {
  Grid grid;
  int components = 0;
  std::vector<double> omega;
  std::vector<ResidualNorms> residuals;
  std::vector<RealField> profiles;
};

std::string encode_profile(const ProfileFile& file);
ProfileFile decode_profile(const std::string& bytes);
ProfileFile profile_from_bound_state(const BoundState& bs);
void write_profile(const std::filesystem::path& path, const ProfileFile& file);
ProfileFile read_profile(const std::filesystem::path& path);

/// JSON text with every floating-point number printed as %.17g.
std::string dump_json(const Json& j, int indent = 2);

/// FNV-1a over a canonical rendering of the system.
std::uint64_t spec_hash(const SystemSpec& spec);
std::string spec_hash_hex(const SystemSpec& spec);

Json report_to_json(const SystemSpec& spec, const BoundState& bs, const InstabilityReport& report);
Json structural_to_json(const SystemSpec& spec, const StructuralVerdict& v);

/// Columns: time, mass, hamiltonian, mass_1..mass_m, orbit_distance,
/// virial, virial_rate.
std::string trace_to_csv(const SimulationTrace& trace);
Json events_to_json(const std::vector<Event>& events);

std::string format_double(double v);

/// Write via a temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

}  // namespace mtl
