#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mtl/criterion.hpp"
#include "mtl/dynamics.hpp"
#include "mtl/groundstate.hpp"
#include "mtl/model.hpp"
#include "mtl/rational.hpp"

namespace mtl {

/// Value of a config expression; `exact` is set while every operation stayed
/// inside the rationals.
struct Scalar {
  double value = 0.0;
  std::optional<Rational> exact;
};

/// Evaluates +, -, *, /, ^, parentheses, sqrt(), abs() and pi over the given
/// variables. Throws ConfigError.
Scalar evaluate_expression(const std::string& text, const std::map<std::string, Scalar>& variables);

enum class SolverMethod { Synchronous, ClosedForm, Petviashvili, File };
std::string to_string(SolverMethod m);

struct GridConfig {
  std::optional<double> half_width;  // nullopt = auto
  std::optional<int> points;         // nullopt = auto
};

struct SolverConfig {
  SolverMethod method = SolverMethod::Synchronous;
  std::filesystem::path profile;
  PetviashviliOptions petviashvili;
  double certification = 1e-8;
  std::uint64_t seed = 1;
  std::vector<double> guess_amplitudes;  // Gaussian guess per component (petviashvili)
  int maximizer = 0;                     // which synchronous maximizer to use
};

struct SweepConfig {
  std::string parameter;
  double lo = 0.0;
  double hi = 1.0;
  int steps = 16;
  double width = 1e-3;
};

struct CriterionConfig {
  VerdictOptions tolerances;
  std::optional<SweepConfig> sweep;
};

struct SimulateConfig {
  EvolveOptions evolve;
  double t0 = 1e-2;
  bool perturb = true;  // false: start from the bound state itself
};

struct OutputConfig {
  std::filesystem::path directory = "out";
  std::vector<std::string> formats{"json", "csv", "mtl1"};
  bool wants(const std::string& format) const;
};

struct RunConfig {
  SystemSpec spec;
  GridConfig grid;
  SolverConfig solver;
  CriterionConfig criterion;
  SimulateConfig simulate;
  OutputConfig output;
  std::map<std::string, Scalar> parameters;
  std::vector<std::string> term_names;  // section suffix per term
  std::vector<int> term_lines;
  std::string text;  // source text, kept for re-parsing with more overrides
  std::filesystem::path base_directory;
  std::vector<std::string> overrides;

  /// "auto" entries resolved from the slowest decay rate of the system.
  Grid resolve_grid() const;
};

/// Parses the text schema. `overrides` are "name=value" (a [parameters]
/// entry) or "section.key=value". Errors are collected with line numbers
/// and thrown together as one ConfigError.
RunConfig parse_config_text(const std::string& text, const std::vector<std::string>& overrides = {},
                            const std::filesystem::path& base_directory = {});
RunConfig parse_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

/// Same text with additional overrides appended.
RunConfig reparse(const RunConfig& config, const std::vector<std::string>& extra_overrides);

/// Smallest eigenvalue of diag(lambda_j omega_j) plus the quadratic couplings.
double linear_decay_rate(const SystemSpec& spec);

}  // namespace mtl
