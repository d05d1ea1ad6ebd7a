#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "mtl/config.hpp"
#include "mtl/io.hpp"

namespace mtl {

enum ExitCode : int {
  kExitCompleted = 0,
  kExitInternal = 1,
  kExitInconclusive = 2,
  kExitSolverFailure = 3,
  kExitConfigError = 4,
};

struct CommandOptions {
  std::filesystem::path config;
  std::vector<std::string> overrides;
  std::optional<std::filesystem::path> out;      // overrides [output] directory
  std::optional<std::filesystem::path> profile;  // analyze/simulate: reuse an MTL1 file
};

/// Scalar profiles keyed by (grid, frequency, coupling, exponent) so a sweep
/// solves the scalar problem once.
class ScalarCache {
 public:
  const RealField* find(const Grid& grid, double frequency, double coupling, int exponent) const;
  void store(const Grid& grid, double frequency, double coupling, int exponent, RealField profile);

 private:
  using Key = std::tuple<int, double, int, double, double, int>;
  std::map<Key, RealField> profiles_;
};

/// A certified bound state together with the grid machinery it lives on.
struct GroundState {
  std::unique_ptr<Spectral> spectral;
  BoundState state;
  Json info;  // solver diagnostics
  std::vector<std::string> warnings;
};

/// Runs the configured solver. Throws SolverError / PreconditionError.
GroundState compute_ground_state(const RunConfig& config, ScalarCache* cache = nullptr);

/// Identity residuals for a bound state as JSON.
Json identity_report(const SystemSpec& spec, const Spectral& spectral, const BoundState& bs);

/// Gauge, synchronicity and structural audit printed by `validate`.
Json audit(const RunConfig& config, std::vector<std::string>* warnings = nullptr);

int run_validate(const RunConfig& config, const std::filesystem::path& dir, std::ostream& out);
int run_groundstate(const RunConfig& config, const std::filesystem::path& dir, std::ostream& out);
int run_analyze(const RunConfig& config, const std::filesystem::path& dir, std::ostream& out);
int run_simulate(const RunConfig& config, const std::filesystem::path& dir, std::ostream& out);
int run_sweep(const RunConfig& config, const std::filesystem::path& dir, std::ostream& out);

int cmd_validate(const CommandOptions& options, std::ostream& out);
int cmd_groundstate(const CommandOptions& options, std::ostream& out);
int cmd_analyze(const CommandOptions& options, std::ostream& out);
int cmd_simulate(const CommandOptions& options, std::ostream& out);
int cmd_sweep(const CommandOptions& options, std::ostream& out);

/// Dispatches one command, mapping exceptions to exit codes and writing
/// error.json into the output directory on failure.
int run_command(const std::string& command, const CommandOptions& options, std::ostream& out, std::ostream& err);

std::filesystem::path output_directory(const RunConfig& config, const CommandOptions& options);

}  // namespace mtl
