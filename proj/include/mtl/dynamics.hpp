#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "mtl/criterion.hpp"
#include "mtl/groundstate.hpp"
#include "mtl/model.hpp"

namespace mtl {

enum class Integrator { Strang, Yoshida4 };
std::string to_string(Integrator i);

/// Half linear step, RK4 nonlinear step, half linear step. Negative dt runs
/// the scheme backwards.
void strang_step(const SystemSpec& spec, const Spectral& spectral, FieldState& state, double dt);
/// Triple-jump composition of three Strang steps (fourth order).
void yoshida_step(const SystemSpec& spec, const Spectral& spectral, FieldState& state, double dt);
void integrator_step(Integrator method, const SystemSpec& spec, const Spectral& spectral, FieldState& state, double dt);

/// Gamma(t0) for the report's direction with exact total mass.
FieldState perturbed_initial_data(const SystemSpec& spec, const Spectral& spectral, const BoundState& bs,
                                  const InstabilityReport& report, double t0);
FieldState perturbed_initial_data(const SystemSpec& spec, const Spectral& spectral, const BoundState& bs,
                                  const InstabilityReport& report, const Direction& dir, double t0);

/// f(theta, y)Q: e^{i theta omega_j} Q_j(x + y).
FieldState orbit_point(const Spectral& spectral, const BoundState& bs, double theta, const std::array<double, 3>& y);

struct OrbitDistance {
  double distance = 0.0;
  double theta = 0.0;
  std::array<double, 3> shift{0.0, 0.0, 0.0};
};

/// Discrete H^1 distance from the orbit of bs under gauge and translation.
/// `period` is 2 pi / omega-tilde.
OrbitDistance orbit_distance(const Spectral& spectral, const FieldState& state, const BoundState& bs, double period);
/// Period of the gauge orbit from the exact frequencies.
double orbit_period(const SystemSpec& spec);

struct VirialSample {
  double value = 0.0;
  double rate = 0.0;
  std::optional<double> second;  // right-hand side when omega_j / lambda_j is constant
};

/// omega_0 / lambda_0 when every omega_j / lambda_j agrees.
std::optional<double> virial_ratio(const SystemSpec& spec);
VirialSample virial_diagnostics(const SystemSpec& spec, const Spectral& spectral, const FieldState& state,
                                double initial_hamiltonian);

enum class EventKind { ThresholdExit, BlowupSuspected, ResolutionLoss };
std::string to_string(EventKind k);

struct Event {
  double time = 0.0;
  EventKind kind = EventKind::ThresholdExit;
  std::string detail;
  double value = 0.0;
};

struct SimulationTrace {
  std::vector<double> times;
  std::vector<double> total_mass;
  std::vector<double> hamiltonian;
  std::vector<std::vector<double>> component_masses;  // [component][sample]
  std::vector<double> orbit_distance;
  std::vector<double> virial;
  std::vector<double> virial_rate;
  std::vector<double> virial_second;  // NaN when not applicable
  std::vector<double> gradient_norm;
  std::vector<Event> events;
  std::vector<std::string> warnings;
  double final_dt = 0.0;
  bool halted = false;

  std::size_t size() const { return times.size(); }
};

struct EvolveOptions {
  double final_time = 1.0;
  double dt = 1e-3;
  int sample_every = 100;
  std::optional<double> epsilon;  // THRESHOLD_EXIT level; default 10x the initial distance
  Integrator integrator = Integrator::Strang;
  bool adaptive = true;           // step-doubling halving above the tolerance
  double step_tolerance = 1e-8;
  double min_dt_ratio = 1.0 / 64;   // halt with RESOLUTION_LOSS once dt < min_dt_ratio * dt
  bool stop_at_threshold = false;
};

/// Refuses more than 2e8 complex degrees of freedom.
void check_memory_budget(const Grid& grid, int components);

/// Evolves `initial`; bs (optional) enables the orbit distance.
SimulationTrace evolve(const SystemSpec& spec, const Spectral& spectral, FieldState initial, const EvolveOptions& options,
                       const BoundState* bs = nullptr, FieldState* final_state = nullptr);

/// Structural hypothesis of the Glassey-type blow-up argument.
bool blowup_hypothesis(const SystemSpec& spec, std::string* reason = nullptr);

/// Stateful monitor fed one sample at a time; also usable as a replay.
class BlowupMonitor {
 public:
  explicit BlowupMonitor(const SystemSpec& spec);
  /// Returns an event the first time a condition fires.
  std::optional<Event> observe(double time, double hamiltonian, double gradient_norm, std::optional<double> virial_second);

 private:
  bool hypothesis_;
  std::optional<double> ratio_;
  bool fired_ = false;
  bool have_initial_ = false;
  double h0_ = 0.0;
  double grad0_ = 0.0;
  int negative_samples_ = 0;
};

std::vector<Event> blowup_monitor(const SystemSpec& spec, const SimulationTrace& trace);

/// max |V'' (second difference) - rhs| / max |rhs| over interior samples.
double virial_second_derivative_mismatch(const SimulationTrace& trace);

/// Fraction of the L^2 mass within `band` points of the box edge.
double edge_mass_fraction(const Grid& grid, const FieldState& state, int band = 10);

}  // namespace mtl
