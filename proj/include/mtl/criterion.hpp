#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mtl/groundstate.hpp"
#include "mtl/linalg.hpp"
#include "mtl/rational.hpp"

namespace mtl {

enum class Verdict { Unstable, Inconclusive, Degenerate };
std::string to_string(Verdict v);

struct StructuralVerdict {
  std::string check;  // "supercritical", "critical_I", "critical_II"
  bool applies = false;
  std::string reason;
  std::vector<int> pair;  // components (0-based) playing the roles of 1 and m
  std::vector<std::pair<std::string, double>> inputs;
};

/// Coefficients of Gamma'(0): scaling rate and one mass rate per component,
/// in the original component order.
struct Direction {
  double lambda_prime = 0.0;
  std::vector<double> gamma_prime;
};

struct InstabilityReport {
  int reference = 0;               // component used as "m"
  std::vector<int> order;          // original indices, reference last
  std::vector<double> k_ratios;    // original component order, k_reference = 1
  Matrix matrix;                   // rows: lambda', then gamma'_j for j in order[0..m-2]
  EigenDecomposition eigen;
  Verdict verdict = Verdict::Inconclusive;
  double tolerance = 0.0;
  double min_eigenvalue = 0.0;
  double determinant = 0.0;
  std::vector<StructuralVerdict> structural;
  std::optional<Direction> direction;
};

/// Mass-transfer matrix from the cached integrals, with `reference` as component m.
Matrix assemble_matrix(const SystemSpec& spec, const std::vector<double>& k, const std::vector<double>& term_integrals,
                       int reference);
Matrix assemble_matrix(const SystemSpec& spec, const BoundState& bs);

/// Ratios relative to the reference component chosen for the report.
std::vector<double> compute_k_ratios(const SystemSpec& spec, const BoundState& bs, int* reference = nullptr);

double determinant(const Matrix& m);

/// Eigenvalue tolerance tau = max(floor, relative * ||A||_F).
struct VerdictOptions {
  double floor = 1e-10;
  double relative = 1e-8;
};

/// Full verdict. Throws PreconditionError for an uncertified bound state.
InstabilityReport verdict(const SystemSpec& spec, const BoundState& bs, const VerdictOptions& options = {});

/// Maps an eigenvector (in matrix coordinates) to Gamma'(0) coefficients,
/// closing the reference rate with the mass constraint.
Direction direction_from_vector(const InstabilityReport& report, const std::vector<double>& v);
std::vector<double> vector_from_direction(const InstabilityReport& report, const Direction& dir);

StructuralVerdict check_supercritical(const SystemSpec& spec);
/// bs may be null for structural use (e.g. d >= 4); then the nonvanishing
/// of the named components is assumed.
std::vector<StructuralVerdict> check_critical_I(const SystemSpec& spec, const BoundState* bs);
std::vector<StructuralVerdict> check_critical_II(const SystemSpec& spec, const BoundState* bs);

struct DirectionField {
  std::vector<RealField> psi;
  double mass_tangency = 0.0;      // relative
  double quadratic_form = 0.0;     // from the matrix
  double finite_difference = 0.0;  // second derivative of H along Gamma
};

/// Gamma(t): gamma_j lambda^{d/2} Q_j(lambda x) with lambda = 1 + lambda' t,
/// gamma_j = 1 + gamma'_j t off the reference, and gamma_reference chosen from
/// the sampled masses so that the total mass equals M(Q).
FieldState gamma_curve(const SystemSpec& spec, const Spectral& spectral, const BoundState& bs, int reference,
                       const Direction& dir, double t);
/// Largest |t| for which gamma_curve is defined along the given sign.
double feasible_amplitude(const SystemSpec& spec, const BoundState& bs, int reference, const Direction& dir,
                          double sign);

/// Second derivative of H(Gamma(t)) at 0 by Richardson-extrapolated central
/// differences on the grid fields.
double hamiltonian_second_derivative(const SystemSpec& spec, const Spectral& spectral, const BoundState& bs,
                                     int reference, const Direction& dir, double h = 1e-2);

DirectionField unstable_direction_field(const SystemSpec& spec, const Spectral& spectral, const BoundState& bs,
                                        const InstabilityReport& report);
/// Same construction for an arbitrary direction (no verdict requirement).
DirectionField direction_field(const SystemSpec& spec, const Spectral& spectral, const BoundState& bs,
                               const InstabilityReport& report, const Direction& dir);

struct SweepPoint {
  double parameter = 0.0;
  bool missing = false;
  double min_eigenvalue = 0.0;
  Verdict verdict = Verdict::Inconclusive;
  std::string error;
};

struct SweepResult {
  std::vector<SweepPoint> points;  // sorted by parameter
  std::optional<std::pair<double, double>> bracket;
  std::optional<double> threshold;
};

using SweepEvaluator = std::function<SweepPoint(double)>;

/// Uniform samples on [lo, hi] then bisection of the first sign change of
/// the minimal eigenvalue down to `width`.
SweepResult sweep_parameter(const SweepEvaluator& eval, double lo, double hi, int steps, double width = 1e-3);

/// Exact oracle for the synchronous quadratic system with beta = omega(1 - 2 sigma):
/// sigma^2 det(A) / (int Q1^2 Q2)^2 as a quadratic polynomial in sigma with
/// rational coefficients, built from the closed-form two-by-two entries.
struct QuadraticThresholdOracle {
  int dimension = 1;
  std::vector<Rational> coefficients;  // c0 + c1 sigma + c2 sigma^2
  std::optional<double> threshold;     // positive root where det changes sign
  double statement_candidate = 0.0;    // root of 3(4-d)(1+4s) = (1-2s)^2
  double proof_candidate = 0.0;        // root of (2s-1)^2 = 3(4-d)
};

QuadraticThresholdOracle quadratic_threshold_oracle(int dimension);
/// sigma^2 det(A) in units of (int Q1^2 Q2)^2, exact.
Rational quadratic_scaled_determinant(int dimension, const Rational& sigma);

}  // namespace mtl
