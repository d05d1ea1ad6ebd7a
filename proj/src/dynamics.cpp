#include "mtl/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "mtl/error.hpp"
#include "mtl/linalg.hpp"

namespace mtl {

namespace {

void linear_step(const SystemSpec& spec, const Spectral& spectral, FieldState& state, double tau) {
  const auto k2 = spectral.k_squared();
  ComplexField hat(state.grid.size());
  for (int j = 0; j < spec.components; ++j) {
    auto& u = state.fields[j];
    spectral.forward(u, hat);
    const double rate = tau / spec.lambdas[j];
    for (std::size_t f = 0; f < hat.size(); ++f) hat[f] *= std::polar(1.0, -k2[f] * rate);
    spectral.backward(hat, u);
  }
}

void nonlinear_step(const SystemSpec& spec, FieldState& state, double dt) {
  const int m = spec.components;
  if (spec.terms.empty()) return;
  std::vector<Complex> u(m), y(m), k1(m), k2(m), k3(m), k4(m), g(m);
  auto rhs = [&](const std::vector<Complex>& v, std::vector<Complex>& out) {
    nonlinear_gradient_point(spec, v.data(), g.data());
    for (int j = 0; j < m; ++j) out[j] = Complex(0.0, -1.0) * g[j] / spec.lambdas[j];
  };
  const std::size_t n = state.grid.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) u[j] = state.fields[j][i];
    rhs(u, k1);
    for (int j = 0; j < m; ++j) y[j] = u[j] + 0.5 * dt * k1[j];
    rhs(y, k2);
    for (int j = 0; j < m; ++j) y[j] = u[j] + 0.5 * dt * k2[j];
    rhs(y, k3);
    for (int j = 0; j < m; ++j) y[j] = u[j] + dt * k3[j];
    rhs(y, k4);
    for (int j = 0; j < m; ++j)
      state.fields[j][i] = u[j] + dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
  }
}

double max_abs(const FieldState& s) {
  double r = 0.0;
  for (const auto& f : s.fields)
    for (const auto& z : f) r = std::max(r, std::abs(z));
  return r;
}

double max_diff(const FieldState& a, const FieldState& b) {
  double r = 0.0;
  for (std::size_t j = 0; j < a.fields.size(); ++j)
    for (std::size_t i = 0; i < a.fields[j].size(); ++i) r = std::max(r, std::abs(a.fields[j][i] - b.fields[j][i]));
  return r;
}

double h1_norm_squared(const Spectral& spectral, const ComplexField& u) {
  return spectral.l2_norm_squared(u) + spectral.gradient_norm_squared(u);
}

// Correlation data between one component of u and Q for the orbit search.
struct Correlation {
  ComplexField rhat;  // (1 + |k|^2) Qhat conj(FFT(conj u)) * h^d / N^d
  double omega = 0.0;
};

struct FValue {
  double f = 0.0;
  std::vector<double> grad;
  Matrix hess;
};

}  // namespace

std::string to_string(Integrator i) { return i == Integrator::Strang ? "strang" : "yoshida4"; }

std::string to_string(EventKind k) {
  switch (k) {
    case EventKind::ThresholdExit: return "THRESHOLD_EXIT";
    case EventKind::BlowupSuspected: return "BLOWUP_SUSPECTED";
    case EventKind::ResolutionLoss: return "RESOLUTION_LOSS";
  }
  return "THRESHOLD_EXIT";
}

void strang_step(const SystemSpec& spec, const Spectral& spectral, FieldState& state, double dt) {
  linear_step(spec, spectral, state, 0.5 * dt);
  nonlinear_step(spec, state, dt);
  linear_step(spec, spectral, state, 0.5 * dt);
  state.time += dt;
}

void yoshida_step(const SystemSpec& spec, const Spectral& spectral, FieldState& state, double dt) {
  const double cbrt2 = std::cbrt(2.0);
  const double w1 = 1.0 / (2.0 - cbrt2);
  const double w0 = -cbrt2 / (2.0 - cbrt2);
  const double t0 = state.time;
  strang_step(spec, spectral, state, w1 * dt);
  strang_step(spec, spectral, state, w0 * dt);
  strang_step(spec, spectral, state, w1 * dt);
  state.time = t0 + dt;
}

void integrator_step(Integrator method, const SystemSpec& spec, const Spectral& spectral, FieldState& state, double dt) {
  if (method == Integrator::Strang)
    strang_step(spec, spectral, state, dt);
  else
    yoshida_step(spec, spectral, state, dt);
}

FieldState perturbed_initial_data(const SystemSpec& spec, const Spectral& spectral, const BoundState& bs,
                                  const InstabilityReport& report, const Direction& dir, double t0) {
  return gamma_curve(spec, spectral, bs, report.reference, dir, t0);
}

FieldState perturbed_initial_data(const SystemSpec& spec, const Spectral& spectral, const BoundState& bs,
                                  const InstabilityReport& report, double t0) {
  if (report.verdict != Verdict::Unstable || !report.direction)
    throw PreconditionError("perturbation needs an unstable direction (verdict " + to_string(report.verdict) + ")");
  return perturbed_initial_data(spec, spectral, bs, report, *report.direction, t0);
}

FieldState orbit_point(const Spectral& spectral, const BoundState& bs, double theta, const std::array<double, 3>& y) {
  FieldState s;
  s.grid = bs.grid;
  for (int j = 0; j < bs.components(); ++j) {
    ComplexField f = spectral.translate(to_complex(bs.profiles[j]), y);
    const Complex phase = std::polar(1.0, theta * bs.omega[j]);
    for (auto& z : f) z *= phase;
    s.fields.push_back(std::move(f));
  }
  return s;
}

double orbit_period(const SystemSpec& spec) {
  auto w = fundamental_frequency(spec);
  if (!w) throw PreconditionError("orbit distance needs rational frequencies (closed gauge orbit)");
  return 2.0 * std::numbers::pi / w->value();
}

OrbitDistance orbit_distance(const Spectral& spectral, const FieldState& state, const BoundState& bs, double period) {
  const Grid& grid = spectral.grid();
  const int m = bs.components();
  const int d = grid.dimension;
  const int N = grid.points;
  const std::size_t n = grid.size();
  const auto k2 = spectral.k_squared();
  const double norm = grid.cell_volume() / static_cast<double>(n);

  std::vector<Correlation> corr(m);
  double best_norm = -1.0;
  int dominant = 0;
  for (int j = 0; j < m; ++j) {
    ComplexField qhat = spectral.forward(std::span<const double>(bs.profiles[j]));
    ComplexField ubar(n);
    for (std::size_t i = 0; i < n; ++i) ubar[i] = std::conj(state.fields[j][i]);
    ComplexField uhat = spectral.forward(ubar);
    corr[j].omega = bs.omega[j];
    corr[j].rhat.resize(n);
    for (std::size_t f = 0; f < n; ++f) corr[j].rhat[f] = (1.0 + k2[f]) * qhat[f] * std::conj(uhat[f]) * norm;
    const double qn = bs.mass_integrals[j] + bs.gradient_integrals[j];
    if (qn > best_norm) {
      best_norm = qn;
      dominant = j;
    }
  }

  // Lattice translation from the dominant component's correlation modulus.
  ComplexField lattice(n);
  spectral.backward(corr[dominant].rhat, lattice);
  std::size_t peak = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs(lattice[i]) > std::abs(lattice[peak])) peak = i;
  std::array<double, 3> y{0.0, 0.0, 0.0};
  const double h = grid.spacing();
  for (int a = 0; a < d; ++a) {
    int idx = grid.axis_index(peak, a);
    if (idx >= N / 2) idx -= N;
    y[a] = idx * h;
  }

  // F(theta, y) = sum_j Re(e^{-i theta omega_j} C_j(y)) with derivatives.
  std::vector<std::vector<Complex>> axis_phase(3);
  auto evaluate = [&](double theta, const std::array<double, 3>& shift, bool derivatives) {
    FValue out;
    out.grad.assign(d + 1, 0.0);
    out.hess = Matrix(d + 1);
    for (int a = 0; a < d; ++a) {
      axis_phase[a].resize(N);
      for (int i = 0; i < N; ++i) axis_phase[a][i] = std::polar(1.0, grid.wavenumber(i) * shift[a]);
    }
    for (int j = 0; j < m; ++j) {
      Complex c(0.0);
      std::array<Complex, 3> dc{};
      std::array<std::array<Complex, 3>, 3> hc{};
      for (std::size_t f = 0; f < n; ++f) {
        Complex ph(1.0, 0.0);
        std::array<double, 3> kk{0.0, 0.0, 0.0};
        for (int a = 0; a < d; ++a) {
          const int idx = grid.axis_index(f, a);
          ph *= axis_phase[a][idx];
          kk[a] = grid.wavenumber(idx);
        }
        const Complex v = corr[j].rhat[f] * ph;
        c += v;
        if (derivatives)
          for (int a = 0; a < d; ++a) {
            dc[a] += Complex(0.0, kk[a]) * v;
            for (int b = 0; b < d; ++b) hc[a][b] -= kk[a] * kk[b] * v;
          }
      }
      const double w = corr[j].omega;
      const Complex e = std::polar(1.0, -theta * w);
      out.f += (e * c).real();
      if (!derivatives) continue;
      out.grad[0] += (Complex(0.0, -w) * e * c).real();
      out.hess(0, 0) += (-w * w * e * c).real();
      for (int a = 0; a < d; ++a) {
        out.grad[a + 1] += (e * dc[a]).real();
        out.hess(0, a + 1) += (Complex(0.0, -w) * e * dc[a]).real();
        out.hess(a + 1, 0) = out.hess(0, a + 1);
        for (int b = 0; b < d; ++b) out.hess(a + 1, b + 1) += (e * hc[a][b]).real();
      }
    }
    return out;
  };

  // Theta scan at the lattice shift using lattice correlation values.
  std::vector<Complex> cy(m);
  for (int j = 0; j < m; ++j) {
    Complex c(0.0);
    for (std::size_t f = 0; f < n; ++f) {
      double phase = 0.0;
      for (int a = 0; a < d; ++a) phase += grid.wavenumber(grid.axis_index(f, a)) * y[a];
      c += corr[j].rhat[f] * std::polar(1.0, phase);
    }
    cy[j] = c;
  }
  auto f_theta = [&](double theta) {
    double s = 0.0;
    for (int j = 0; j < m; ++j) s += (std::polar(1.0, -theta * corr[j].omega) * cy[j]).real();
    return s;
  };
  const int scan = 256;
  double theta = 0.0, fbest = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < scan; ++i) {
    const double t = period * i / scan;
    const double v = f_theta(t);
    if (v > fbest) {
      fbest = v;
      theta = t;
    }
  }
  {
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = theta - period / scan, b = theta + period / scan;
    double c = b - gr * (b - a), e = a + gr * (b - a);
    double fc = f_theta(c), fe = f_theta(e);
    for (int it = 0; it < 60; ++it) {
      if (fc > fe) {
        b = e;
        e = c;
        fe = fc;
        c = b - gr * (b - a);
        fc = f_theta(c);
      } else {
        a = c;
        c = e;
        fc = fe;
        e = a + gr * (b - a);
        fe = f_theta(e);
      }
    }
    theta = 0.5 * (a + b);
  }

  // Joint Newton polish in (theta, y).
  FValue cur = evaluate(theta, y, true);
  for (int it = 0; it < 30; ++it) {
    std::vector<double> rhs(d + 1);
    for (int i = 0; i <= d; ++i) rhs[i] = -cur.grad[i];
    std::vector<double> step;
    try {
      step = solve_dense(cur.hess, rhs);
    } catch (const Error&) {
      break;
    }
    double ymove = 0.0;
    for (int a = 0; a < d; ++a) ymove = std::max(ymove, std::abs(step[a + 1]));
    double scale = ymove > h ? h / ymove : 1.0;
    bool accepted = false;
    for (int tries = 0; tries < 12; ++tries) {
      std::array<double, 3> ny = y;
      for (int a = 0; a < d; ++a) ny[a] += scale * step[a + 1];
      const double nt = theta + scale * step[0];
      FValue trial = evaluate(nt, ny, true);
      if (trial.f >= cur.f - 1e-14 * std::abs(cur.f)) {
        theta = nt;
        y = ny;
        cur = std::move(trial);
        accepted = true;
        break;
      }
      scale *= 0.5;
    }
    double size = 0.0;
    for (double s : step) size = std::max(size, std::abs(s));
    if (!accepted || size * scale < 1e-15) break;
  }

  OrbitDistance out;
  out.theta = std::fmod(theta, period);
  if (out.theta < 0.0) out.theta += period;
  for (int a = 0; a < d; ++a) {
    const double box = 2.0 * grid.half_width;
    double v = std::fmod(y[a] + grid.half_width, box);
    if (v < 0.0) v += box;
    out.shift[a] = v - grid.half_width;
  }
  const FieldState target = orbit_point(spectral, bs, theta, y);
  double dist2 = 0.0;
  for (int j = 0; j < m; ++j) {
    ComplexField diff(n);
    for (std::size_t i = 0; i < n; ++i) diff[i] = state.fields[j][i] - target.fields[j][i];
    dist2 += h1_norm_squared(spectral, diff);
  }
  out.distance = std::sqrt(dist2);
  return out;
}

std::optional<double> virial_ratio(const SystemSpec& spec) {
  const double r0 = spec.omegas[0] / spec.lambdas[0];
  for (int j = 1; j < spec.components; ++j) {
    const double r = spec.omegas[j] / spec.lambdas[j];
    if (std::abs(r - r0) > 1e-12 * std::max(1.0, std::abs(r0))) return std::nullopt;
  }
  return r0;
}

VirialSample virial_diagnostics(const SystemSpec& spec, const Spectral& spectral, const FieldState& state,
                                double initial_hamiltonian) {
  VirialSample out;
  const Grid& grid = state.grid;
  for (int j = 0; j < spec.components; ++j) {
    const auto& u = state.fields[j];
    double v = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) v += grid.radius_squared(i) * std::norm(u[i]);
    out.value += 0.5 * spec.mass_weight(j) * v * grid.cell_volume();
    const ComplexField xg = spectral.x_dot_grad(std::span<const Complex>(u));
    Complex s(0.0);
    for (std::size_t i = 0; i < u.size(); ++i) s += std::conj(u[i]) * xg[i];
    out.rate += 2.0 * spec.omegas[j] * s.imag() * grid.cell_volume();
  }
  if (auto ratio = virial_ratio(spec)) {
    const auto n = term_integrals(spec, spectral, state.fields);
    double s = 8.0 * initial_hamiltonian;
    for (std::size_t k = 0; k < spec.terms.size(); ++k)
      s -= (4.0 - spec.dimension * (spec.terms[k].alpha() - 2.0)) * n[k];
    out.second = *ratio * s;
  }
  return out;
}

void check_memory_budget(const Grid& grid, int components) {
  const double dof = static_cast<double>(grid.size()) * components;
  if (dof > 2e8) throw PreconditionError("run refused: " + std::to_string(dof) + " complex degrees of freedom exceed 2e8");
}

double edge_mass_fraction(const Grid& grid, const FieldState& state, int band) {
  double total = 0.0, edge = 0.0;
  for (const auto& f : state.fields)
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double w = std::norm(f[i]);
      total += w;
      bool near = false;
      for (int a = 0; a < grid.dimension; ++a) {
        const int idx = grid.axis_index(i, a);
        near |= idx < band || idx >= grid.points - band;
      }
      if (near) edge += w;
    }
  return total > 0.0 ? edge / total : 0.0;
}

bool blowup_hypothesis(const SystemSpec& spec, std::string* reason) {
  auto fail = [&](const std::string& why) {
    if (reason) *reason = why;
    return false;
  };
  if (!virial_ratio(spec)) return fail("omega_j / lambda_j is not constant");
  const int d = spec.dimension;
  for (std::size_t k = 0; k < spec.terms.size(); ++k) {
    const auto& t = spec.terms[k];
    const int excess = d * (t.alpha() - 2) - 4;
    if (excess == 0) continue;
    if (!t.is_modulus_only()) return fail("term " + std::to_string(k + 1) + " is sign-indefinite");
    if (excess > 0 && t.coefficient > 0.0) return fail("supercritical term " + std::to_string(k + 1) + " is positive");
    if (excess < 0 && t.coefficient < 0.0) return fail("subcritical term " + std::to_string(k + 1) + " is negative");
  }
  return true;
}

BlowupMonitor::BlowupMonitor(const SystemSpec& spec) : hypothesis_(blowup_hypothesis(spec)), ratio_(virial_ratio(spec)) {}

std::optional<Event> BlowupMonitor::observe(double time, double hamiltonian, double gradient_norm,
                                            std::optional<double> virial_second) {
  if (!have_initial_) {
    have_initial_ = true;
    h0_ = hamiltonian;
    grad0_ = gradient_norm;
  }
  if (fired_) return std::nullopt;
  if (grad0_ > 0.0 && gradient_norm > 1e3 * grad0_) {
    fired_ = true;
    return Event{time, EventKind::BlowupSuspected, "gradient norm grew beyond 1e3 times its initial value",
                 gradient_norm / grad0_};
  }
  if (hypothesis_ && ratio_ && h0_ < 0.0 && virial_second) {
    const double bound = 0.5 * 8.0 * *ratio_ * h0_;
    if (*virial_second <= bound)
      ++negative_samples_;
    else
      negative_samples_ = 0;
    if (negative_samples_ >= 3) {
      fired_ = true;
      return Event{time, EventKind::BlowupSuspected, "negative energy with concave variance (V'' below bound)",
                   *virial_second};
    }
  }
  return std::nullopt;
}

std::vector<Event> blowup_monitor(const SystemSpec& spec, const SimulationTrace& trace) {
  BlowupMonitor monitor(spec);
  std::vector<Event> out;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    std::optional<double> second;
    if (i < trace.virial_second.size() && std::isfinite(trace.virial_second[i])) second = trace.virial_second[i];
    if (auto e = monitor.observe(trace.times[i], trace.hamiltonian[i], trace.gradient_norm[i], second))
      out.push_back(*e);
  }
  return out;
}

double virial_second_derivative_mismatch(const SimulationTrace& trace) {
  double worst = 0.0, scale = 0.0;
  for (double v : trace.virial_second)
    if (std::isfinite(v)) scale = std::max(scale, std::abs(v));
  for (std::size_t i = 1; i + 1 < trace.size(); ++i) {
    const double dt = trace.times[i] - trace.times[i - 1];
    const double fd = (trace.virial[i + 1] - 2.0 * trace.virial[i] + trace.virial[i - 1]) / (dt * dt);
    if (!std::isfinite(trace.virial_second[i])) return std::numeric_limits<double>::quiet_NaN();
    worst = std::max(worst, std::abs(fd - trace.virial_second[i]));
  }
  return scale > 0.0 ? worst / scale : worst;
}

SimulationTrace evolve(const SystemSpec& spec, const Spectral& spectral, FieldState state, const EvolveOptions& options,
                       const BoundState* bs, FieldState* final_state) {
  check_memory_budget(state.grid, spec.components);
  if (!(options.dt > 0.0) || options.sample_every < 1 || !(options.final_time >= 0.0))
    throw PreconditionError("evolve needs dt > 0, sample_every >= 1 and T >= 0");
  const double h = state.grid.spacing();
  double min_lambda = std::numeric_limits<double>::infinity();
  for (double l : spec.lambdas) min_lambda = std::min(min_lambda, std::abs(l));

  SimulationTrace trace;
  trace.component_masses.assign(spec.components, {});
  const double period = bs ? orbit_period(spec) : 0.0;
  double hamiltonian0 = hamiltonian(spec, spectral, state).total;
  BlowupMonitor monitor(spec);
  std::optional<double> epsilon = options.epsilon;
  bool exited = false;
  if (options.dt > h * h * min_lambda)
    trace.warnings.push_back("dt exceeds h^2 min lambda (the linear step is exact; accuracy may suffer)");

  auto sample = [&](double t) {
    trace.times.push_back(t);
    trace.total_mass.push_back(mass(spec, spectral, state));
    const auto hp = hamiltonian(spec, spectral, state);
    trace.hamiltonian.push_back(hp.total);
    const auto cm = component_masses(spectral, state);
    for (int j = 0; j < spec.components; ++j) trace.component_masses[j].push_back(cm[j]);
    trace.gradient_norm.push_back(2.0 * hp.kinetic);
    double dist = 0.0;
    if (bs) dist = orbit_distance(spectral, state, *bs, period).distance;
    trace.orbit_distance.push_back(dist);
    const auto vir = virial_diagnostics(spec, spectral, state, hamiltonian0);
    trace.virial.push_back(vir.value);
    trace.virial_rate.push_back(vir.rate);
    trace.virial_second.push_back(vir.second ? *vir.second : std::numeric_limits<double>::quiet_NaN());
    if (bs) {
      if (!epsilon) {
        double qn = 0.0;
        for (int j = 0; j < bs->components(); ++j) qn += bs->mass_integrals[j] + bs->gradient_integrals[j];
        epsilon = std::max(10.0 * dist, 1e-6 * std::sqrt(qn));
      }
      if (!exited && dist > *epsilon) {
        exited = true;
        trace.events.push_back({t, EventKind::ThresholdExit, "orbit distance exceeded epsilon", dist});
      }
    }
    if (auto e = monitor.observe(t, hp.total, 2.0 * hp.kinetic, vir.second)) trace.events.push_back(*e);
  };

  sample(0.0);
  double dt = options.dt;
  int substeps = options.sample_every;
  const double block = options.dt * options.sample_every;
  const long blocks = static_cast<long>(std::ceil(options.final_time / block - 1e-9));
  for (long b = 0; b < blocks; ++b) {
    if (options.adaptive) {
      for (int guard = 0; guard < 20; ++guard) {
        FieldState one = state, two = state;
        integrator_step(options.integrator, spec, spectral, one, dt);
        integrator_step(options.integrator, spec, spectral, two, 0.5 * dt);
        integrator_step(options.integrator, spec, spectral, two, 0.5 * dt);
        const double err = max_diff(one, two) / std::max(1e-300, max_abs(two));
        if (!(err > options.step_tolerance)) break;
        dt *= 0.5;
        substeps *= 2;
      }
      if (dt < options.min_dt_ratio * options.dt) {
        trace.events.push_back({b * block, EventKind::ResolutionLoss, "adaptive step size collapsed", dt});
        trace.halted = true;
        break;
      }
    }
    for (int s = 0; s < substeps; ++s) integrator_step(options.integrator, spec, spectral, state, dt);
    const double t = (b + 1) * block;
    state.time = t;
    if (!state.all_finite()) {
      trace.events.push_back({t, EventKind::ResolutionLoss, "non-finite field values", 0.0});
      trace.halted = true;
      break;
    }
    const double edge = edge_mass_fraction(state.grid, state);
    if (edge > 0.2) {
      sample(t);
      trace.events.push_back({t, EventKind::ResolutionLoss, "more than 20% of the mass near the box edge", edge});
      trace.halted = true;
      break;
    }
    sample(t);
    if (options.stop_at_threshold && exited) break;
  }
  trace.final_dt = dt;
  if (final_state) *final_state = std::move(state);
  return trace;
}

}  // namespace mtl
