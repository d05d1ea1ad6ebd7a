#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mtl/grid.hpp"
#include "mtl/rational.hpp"
#include "mtl/spectral.hpp"

namespace mtl {

/// n(u) = c * Re prod_j u_j^{p_j} conj(u_j)^{q_j}.
struct MonomialTerm {
  double coefficient = 0.0;
  std::vector<std::pair<int, int>> exponents;  // (p_j, q_j) per component

  int beta(int j) const { return exponents[j].first + exponents[j].second; }
  int alpha() const;
  /// p_j == q_j for every j, so n = c * prod |u_j|^{beta_j}.
  bool is_modulus_only() const;
  /// Quadratic term of the form |u_j|^2.
  std::optional<int> diagonal_quadratic_component() const;
  /// Human-readable polynomial, e.g. "-1 * Re(conj(u1)^2 u2)".
  std::string describe(const std::vector<std::string>& labels) const;
};

struct SystemSpec {
  int dimension = 1;
  int components = 1;
  std::vector<double> lambdas;
  std::vector<double> omegas;
  /// Exact frequencies when every omega was given as a rational literal.
  std::vector<Rational> omegas_exact;
  std::vector<MonomialTerm> terms;
  std::vector<std::string> labels;

  bool has_exact_omegas() const { return !omegas_exact.empty(); }
  double mass_weight(int j) const { return lambdas[j] * omegas[j]; }
  std::string label(int j) const;
  /// Structural checks: sizes, lambda_j omega_j > 0, alpha >= 2, at least one
  /// term of degree >= 3, d in 1..5. Throws PreconditionError.
  void validate_structure() const;
};

struct GaugeViolation {
  std::size_t term = 0;
  double mismatch = 0.0;
  std::optional<Rational> exact_mismatch;
};

struct GaugeResult {
  bool ok = true;
  bool exact = false;
  std::vector<GaugeViolation> violations;
};

/// Checks sum_j omega_j (p_j - q_j) = 0 for every term, exactly when the
/// frequencies are rational and with relative tolerance 1e-12 otherwise.
GaugeResult validate_gauge(const SystemSpec& spec);

/// sum_j omega_j (p_j - q_j) for one term.
double gauge_phase_sum(const SystemSpec& spec, const MonomialTerm& term);
std::optional<Rational> gauge_phase_sum_exact(const SystemSpec& spec, const MonomialTerm& term);

/// Dimension of the space of phase vectors theta with sum_j theta_j (p_j - q_j)
/// = 0 for all terms; 1 means a single gauge invariance.
int gauge_invariance_count(const SystemSpec& spec);

/// gcd of the rational omega vector; the orbit period is 2 pi / result.
std::optional<Rational> fundamental_frequency(const SystemSpec& spec);

struct FieldState {
  Grid grid;
  std::vector<ComplexField> fields;
  double time = 0.0;

  static FieldState zero(const Grid& grid, int components);
  static FieldState from_real(const Grid& grid, const std::vector<RealField>& profiles);
  bool all_finite() const;
};

struct HamiltonianParts {
  double kinetic = 0.0;
  std::vector<double> potential;  // 1/2 * integral of n_k, per term
  double total = 0.0;
};

double mass(const SystemSpec& spec, const Spectral& spectral, const FieldState& state);
std::vector<double> component_masses(const Spectral& spectral, const FieldState& state);
HamiltonianParts hamiltonian(const SystemSpec& spec, const Spectral& spectral, const FieldState& state);
double action(const SystemSpec& spec, const Spectral& spectral, const FieldState& state);

/// Pointwise density n_k(u).
RealField term_density(const MonomialTerm& term, const std::vector<ComplexField>& fields);
/// Integral of n_k for every term.
std::vector<double> term_integrals(const SystemSpec& spec, const Spectral& spectral,
                                   const std::vector<ComplexField>& fields);
std::vector<double> term_integrals(const SystemSpec& spec, const Spectral& spectral,
                                   const std::vector<RealField>& profiles);

/// g_j = sum_k dn_k/d conj(u_j) for every component.
std::vector<ComplexField> nonlinear_gradient(const SystemSpec& spec, const std::vector<ComplexField>& fields);
/// Pointwise g for a single point value, used by the split-step ODE solver.
void nonlinear_gradient_point(const SystemSpec& spec, const Complex* u, Complex* g);

struct ResidualNorms {
  double l2 = 0.0;
  double linf = 0.0;
};

struct StationaryResidual {
  std::vector<RealField> fields;
  std::vector<ResidualNorms> norms;
  double max_linf() const;
};

/// r_j = -lambda_j omega_j Q_j + Laplace Q_j - g_j(Q) for real profiles.
StationaryResidual stationary_residual(const SystemSpec& spec, const Spectral& spectral,
                                       const std::vector<RealField>& profiles,
                                       const std::vector<double>* omegas = nullptr);

}  // namespace mtl
