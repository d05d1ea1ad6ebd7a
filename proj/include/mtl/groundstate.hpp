#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mtl/model.hpp"

namespace mtl {

struct BoundState {
  Grid grid;
  std::vector<RealField> profiles;
  std::vector<double> omega;
  std::vector<ResidualNorms> residuals;
  std::vector<double> mass_integrals;      // integral of Q_j^2
  std::vector<double> gradient_integrals;  // integral of |grad Q_j|^2
  std::vector<double> term_integrals;      // integral of n_k(Q)
  double certification_threshold = 1e-8;
  std::vector<std::string> notes;

  int components() const { return static_cast<int>(profiles.size()); }
  double max_residual() const;
  bool certified() const { return max_residual() <= certification_threshold; }
};

/// Samples the profiles into a BoundState and fills residuals and integrals.
BoundState make_bound_state(const SystemSpec& spec, const Spectral& spectral, std::vector<RealField> profiles,
                            std::vector<double> omega, double threshold = 1e-8);

/// Largest relative disagreement between the cached integrals and a fresh
/// recomputation.
double cache_discrepancy(const SystemSpec& spec, const Spectral& spectral, const BoundState& bs);

/// Default box for a system: N = 2048, 512 or 128 and L = 40 / sqrt(frequency)
/// (20 / sqrt(frequency) in three dimensions).
Grid default_grid(int dimension, double frequency);

/// q(x) = (3 omega / (2 a)) sech^2(sqrt(omega) x / 2), solving
/// -omega q + q'' + a q^2 = 0 in one dimension.
RealField closed_form_1d(const Grid& grid, double omega, double a, int p = 3);

struct PetviashviliOptions {
  int max_iterations = 2000;
  double factor_tolerance = 1e-13;
  double gap_tolerance = 1e-12;
  /// Also stop once the update stays below 16 ulp of the peak for this many
  /// consecutive iterations; the factor can stall slightly above its
  /// tolerance on large grids.
  int stagnation_iterations = 3;
};

struct ScalarSolution {
  RealField profile;
  int iterations = 0;
  double factor = 0.0;
  double gap = 0.0;
  std::vector<double> factor_history;
};

/// Spectral renormalization for -omega q + Laplace q + a q^s = 0.
ScalarSolution petviashvili_scalar(const Spectral& spectral, double omega, double a, int s,
                                   const PetviashviliOptions& options = {},
                                   const RealField* initial = nullptr);

/// Isotropic Gaussian guess with the one-dimensional closed-form amplitude.
RealField gaussian_guess(const Grid& grid, double omega, double a, int s, const std::array<double, 3>& center = {});

struct CoupledSolution {
  BoundState state;
  int iterations = 0;
  double factor = 0.0;
  double gap = 0.0;
  std::vector<std::string> warnings;
};

/// Generalized spectral renormalization for the full stationary system
/// with a common stabilizing factor.
CoupledSolution petviashvili_coupled(const SystemSpec& spec, const Spectral& spectral, const std::vector<double>& omega,
                                     std::vector<RealField> initial, const PetviashviliOptions& options = {});

struct SphereCriticalPoint {
  std::vector<double> point;
  double value = 0.0;
  bool maximizer = false;
  double coupling = 0.0;  // p f(X0) / 2
  double lagrange_residual = 0.0;
};

struct SphereMaximum {
  SphereCriticalPoint best;
  /// Every distinct maximizer attaining the best value (e.g. sign-flipped).
  std::vector<SphereCriticalPoint> maximizers;
  bool degenerate = false;
  int starts = 0;
};

/// f(X) = sum_k c_k prod_j X_j^{beta_j} evaluated on real vectors.
double polynomial_value(const std::vector<MonomialTerm>& f, const std::vector<double>& x);
std::vector<double> polynomial_gradient(const std::vector<MonomialTerm>& f, const std::vector<double>& x);

/// Multi-start projected gradient ascent on the unit sphere followed by a
/// Newton polish of the Lagrange system.
SphereMaximum maximize_on_sphere(const std::vector<MonomialTerm>& f, int components, int degree,
                                 std::uint64_t seed = 1, int random_starts = 64);

struct SynchronousForm {
  double frequency = 0.0;            // common c_j + lambda_j omega_j
  int degree = 0;                    // common degree p of the nonlinear part
  std::vector<MonomialTerm> sphere;  // f = -(nonlinear part)
};

/// Checks that quadratic terms are diagonal, c_j + lambda_j omega_j is
/// constant and the nonlinear part is homogeneous. Throws PreconditionError
/// naming the violating pair otherwise.
SynchronousForm synchronous_form(const SystemSpec& spec);
bool is_synchronous(const SystemSpec& spec, std::string* reason = nullptr);

/// Q_j = X0_j q, re-certified against the full system.
BoundState build_synchronous(const SystemSpec& spec, const Spectral& spectral, const SphereCriticalPoint& x0,
                             const RealField& q, double threshold = 1e-8);

struct SynchronousSolution {
  SynchronousForm form;
  SphereMaximum sphere;
  ScalarSolution scalar;
  std::vector<BoundState> states;  // one per maximizer, best first
};

/// Sphere maximization, scalar solve (closed form when d = 1 and p = 3) and
/// synchronous assembly.
SynchronousSolution solve_synchronous(const SystemSpec& spec, const Spectral& spectral, std::uint64_t seed = 1,
                                      const PetviashviliOptions& options = {}, bool closed_form = false);

struct IdentityResiduals {
  std::vector<double> per_component;
  double aggregate = 0.0;
  double sigma_table = 0.0;
  double max() const;
};

/// Largest-mass component index used as "m" for k ratios.
int reference_component(const BoundState& bs);
std::vector<double> k_ratios_for(const SystemSpec& spec, const BoundState& bs, int reference);

/// sigma_{j,k} table (rows: component, columns: term) for the given k ratios
/// and reference component.
std::vector<std::vector<double>> sigma_table(const SystemSpec& spec, const std::vector<double>& k, int reference);

IdentityResiduals first_integral_check(const SystemSpec& spec, const BoundState& bs);

struct PohozaevResult {
  double hamiltonian = 0.0;
  double predicted = 0.0;
  double residual = 0.0;
  bool critical = false;
  double critical_ratio = 0.0;  // |H(Q)| / M(Q) when critical
};

PohozaevResult pohozaev_check(const SystemSpec& spec, const Spectral& spectral, const BoundState& bs);

/// |int q^2 - a (6 - d) / (6 omega) int q^3| relative, for quadratic couplings.
double cazenave_residual(int dimension, double omega, double a, double l2, double l3);

double relative_gap(double lhs, double rhs);

}  // namespace mtl
