#include "mtl/pipeline.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "mtl/error.hpp"

namespace mtl {

namespace {

std::string num(double v) { return format_double(v); }

std::string short_num(double v) {
  std::ostringstream s;
  s << std::setprecision(8) << v;
  return s.str();
}

Json grid_json(const Grid& g) {
  return {{"dimension", g.dimension}, {"half_width", g.half_width}, {"points", g.points}};
}

std::vector<RealField> coupled_guess(const RunConfig& cfg, const Grid& grid) {
  const SystemSpec& spec = cfg.spec;
  int alpha = 2;
  for (const auto& t : spec.terms) alpha = std::max(alpha, t.alpha());
  const double rate = linear_decay_rate(spec);
  const RealField base = gaussian_guess(grid, rate, 1.0, alpha - 1);
  std::vector<RealField> out;
  for (int j = 0; j < spec.components; ++j) {
    const double amp = cfg.solver.guess_amplitudes.empty() ? 1.0 : cfg.solver.guess_amplitudes[j];
    RealField f = base;
    for (double& v : f) v *= amp;
    out.push_back(std::move(f));
  }
  return out;
}

void check_profile_matches(const RunConfig& cfg, const ProfileFile& file) {
  const SystemSpec& spec = cfg.spec;
  if (file.components != spec.components)
    throw PreconditionError("profile has " + std::to_string(file.components) + " components, system has " +
                            std::to_string(spec.components));
  if (file.grid.dimension != spec.dimension) throw PreconditionError("profile dimension differs from the system");
  for (int j = 0; j < spec.components; ++j)
    if (std::abs(file.omega[j] - spec.omegas[j]) > 1e-12 * std::max(1.0, std::abs(spec.omegas[j])))
      throw PreconditionError("profile frequency " + num(file.omega[j]) + " differs from the system's " +
                              num(spec.omegas[j]) + " for " + spec.label(j));
}

}  // namespace

const RealField* ScalarCache::find(const Grid& grid, double frequency, double coupling, int exponent) const {
  auto it = profiles_.find({grid.dimension, grid.half_width, grid.points, frequency, coupling, exponent});
  return it == profiles_.end() ? nullptr : &it->second;
}

void ScalarCache::store(const Grid& grid, double frequency, double coupling, int exponent, RealField profile) {
  profiles_[{grid.dimension, grid.half_width, grid.points, frequency, coupling, exponent}] = std::move(profile);
}

GroundState compute_ground_state(const RunConfig& cfg, ScalarCache* cache) {
  const SystemSpec& spec = cfg.spec;
  GroundState gs;
  gs.info["method"] = to_string(cfg.solver.method);
  const double threshold = cfg.solver.certification;

  if (cfg.solver.method == SolverMethod::File) {
    const ProfileFile file = read_profile(cfg.solver.profile);
    check_profile_matches(cfg, file);
    gs.spectral = std::make_unique<Spectral>(file.grid);
    gs.state = make_bound_state(spec, *gs.spectral, file.profiles, file.omega, threshold);
    gs.info["profile"] = cfg.solver.profile.string();
  } else if (cfg.solver.method == SolverMethod::Petviashvili) {
    const Grid grid = cfg.resolve_grid();
    gs.spectral = std::make_unique<Spectral>(grid);
    auto sol = petviashvili_coupled(spec, *gs.spectral, spec.omegas, coupled_guess(cfg, grid), cfg.solver.petviashvili);
    gs.state = std::move(sol.state);
    gs.state.certification_threshold = threshold;
    gs.info["iterations"] = sol.iterations;
    gs.info["factor"] = sol.factor;
    gs.info["gap"] = sol.gap;
    gs.warnings = sol.warnings;
  } else {
    const Grid grid = cfg.resolve_grid();
    gs.spectral = std::make_unique<Spectral>(grid);
    const SynchronousForm form = synchronous_form(spec);
    const SphereMaximum sphere = maximize_on_sphere(form.sphere, spec.components, form.degree, cfg.solver.seed);
    if (sphere.degenerate || !(sphere.best.coupling > 0.0))
      throw PreconditionError("sphere maximum is not positive; no synchronous ground state");
    const double a = sphere.best.coupling;
    const int s = form.degree - 1;
    RealField q;
    if (cfg.solver.method == SolverMethod::ClosedForm) {
      q = closed_form_1d(grid, form.frequency, a, form.degree);
      gs.info["scalar"] = "closed-form";
    } else if (const RealField* hit = cache ? cache->find(grid, form.frequency, a, s) : nullptr) {
      q = *hit;
      gs.info["scalar"] = "cached";
    } else {
      const ScalarSolution sol = petviashvili_scalar(*gs.spectral, form.frequency, a, s, cfg.solver.petviashvili);
      q = sol.profile;
      gs.info["scalar"] = "petviashvili";
      gs.info["iterations"] = sol.iterations;
      gs.info["factor"] = sol.factor;
      gs.info["gap"] = sol.gap;
      if (cache) cache->store(grid, form.frequency, a, s, q);
    }
    const int pick = cfg.solver.maximizer;
    if (pick < 0 || pick >= static_cast<int>(sphere.maximizers.size()))
      throw PreconditionError("solver.maximizer = " + std::to_string(pick) + " but only " +
                              std::to_string(sphere.maximizers.size()) + " maximizers were found");
    gs.state = build_synchronous(spec, *gs.spectral, sphere.maximizers[pick], q, threshold);
    gs.info["frequency"] = form.frequency;
    gs.info["degree"] = form.degree;
    gs.info["sphere_maximum"] = sphere.best.value;
    gs.info["coupling"] = a;
    Json maxs = Json::array();
    for (const auto& x : sphere.maximizers) maxs.push_back(x.point);
    gs.info["maximizers"] = maxs;
    gs.info["maximizer"] = pick;
    if (form.degree == 3) {
      RealField q2(q.size()), q3(q.size());
      for (std::size_t i = 0; i < q.size(); ++i) {
        q2[i] = q[i] * q[i];
        q3[i] = q2[i] * q[i];
      }
      const double m2 = gs.spectral->integrate(q2), m3 = gs.spectral->integrate(q3);
      gs.info["scalar_integrals"] = {{"q2", m2}, {"q3", m3}};
      gs.info["cazenave_residual"] = cazenave_residual(spec.dimension, form.frequency, a, m2, m3);
    }
    if (sphere.maximizers.size() > 1)
      gs.warnings.push_back(std::to_string(sphere.maximizers.size()) + " sphere maximizers; using index " +
                            std::to_string(pick));
  }
  if (!gs.state.certified())
    throw SolverError("bound state not certified: residual " + num(gs.state.max_residual()) + " exceeds " +
                          num(gs.state.certification_threshold),
                      0.0, gs.state.max_residual(), 0);
  return gs;
}

Json identity_report(const SystemSpec& spec, const Spectral& spectral, const BoundState& bs) {
  Json j;
  const IdentityResiduals fi = first_integral_check(spec, bs);
  j["first_integrals"] = {{"per_component", fi.per_component},
                          {"aggregate", fi.aggregate},
                          {"sigma_table", fi.sigma_table},
                          {"max", fi.max()}};
  const PohozaevResult po = pohozaev_check(spec, spectral, bs);
  j["pohozaev"] = {{"hamiltonian", po.hamiltonian},
                   {"predicted", po.predicted},
                   {"residual", po.residual},
                   {"critical", po.critical},
                   {"hamiltonian_over_mass", po.critical_ratio}};
  j["cache_discrepancy"] = cache_discrepancy(spec, spectral, bs);
  return j;
}

Json audit(const RunConfig& cfg, std::vector<std::string>* warnings) {
  const SystemSpec& spec = cfg.spec;
  Json j;
  j["dimension"] = spec.dimension;
  j["components"] = spec.components;
  j["labels"] = spec.labels;
  j["lambda"] = spec.lambdas;
  j["omega"] = spec.omegas;
  Json terms = Json::array();
  for (std::size_t k = 0; k < spec.terms.size(); ++k) {
    const auto& t = spec.terms[k];
    Json tj;
    tj["name"] = cfg.term_names.size() > k ? cfg.term_names[k] : std::to_string(k + 1);
    tj["polynomial"] = t.describe(spec.labels);
    Json p = Json::array(), q = Json::array(), beta = Json::array();
    for (int i = 0; i < spec.components; ++i) {
      p.push_back(t.exponents[i].first);
      q.push_back(t.exponents[i].second);
      beta.push_back(t.beta(i));
    }
    tj["p"] = p;
    tj["q"] = q;
    tj["beta"] = beta;
    tj["alpha"] = t.alpha();
    if (auto e = gauge_phase_sum_exact(spec, t))
      tj["gauge_phase_sum"] = e->to_string();
    else
      tj["gauge_phase_sum"] = gauge_phase_sum(spec, t);
    terms.push_back(tj);
  }
  j["terms"] = terms;
  const GaugeResult g = validate_gauge(spec);
  j["gauge"] = {{"ok", g.ok}, {"exact", g.exact}};
  const int count = gauge_invariance_count(spec);
  j["gauge_invariances"] = count;
  if (count > 1 && warnings) warnings->push_back("multiple gauge invariances: mass-transfer mechanism vacuous");
  if (auto f = fundamental_frequency(spec)) j["fundamental_frequency"] = f->to_string();
  std::string reason;
  const bool sync = is_synchronous(spec, &reason);
  j["synchronous"] = sync;
  if (sync) {
    const auto form = synchronous_form(spec);
    j["synchronous_frequency"] = form.frequency;
    j["synchronous_degree"] = form.degree;
  } else {
    j["synchronous_reason"] = reason;
  }
  Json st = Json::array();
  st.push_back(structural_to_json(spec, check_supercritical(spec)));
  for (const auto& v : check_critical_I(spec, nullptr)) st.push_back(structural_to_json(spec, v));
  for (const auto& v : check_critical_II(spec, nullptr)) st.push_back(structural_to_json(spec, v));
  j["structural_verdicts"] = st;
  return j;
}

std::filesystem::path output_directory(const RunConfig& cfg, const CommandOptions& options) {
  return options.out ? *options.out : cfg.output.directory;
}

namespace {

RunConfig load(const CommandOptions& options) {
  RunConfig cfg = parse_config(options.config, options.overrides);
  if (options.profile) {
    if (!std::filesystem::exists(*options.profile))
      throw ConfigError("profile file not found: " + options.profile->string());
    cfg.solver.method = SolverMethod::File;
    cfg.solver.profile = *options.profile;
  }
  return cfg;
}

void print_warnings(std::ostream& out, const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) out << "warning: " << w << "\n";
}

void print_matrix(std::ostream& out, const InstabilityReport& rep) {
  out << "matrix A:\n";
  for (int r = 0; r < rep.matrix.n; ++r) {
    out << "  ";
    for (int c = 0; c < rep.matrix.n; ++c) out << std::setw(18) << short_num(rep.matrix(r, c));
    out << "\n";
  }
  out << "eigenvalues:";
  for (double v : rep.eigen.values) out << " " << short_num(v);
  out << "\ndeterminant: " << short_num(rep.determinant) << "\n";
}

}  // namespace

int run_validate(const RunConfig& cfg, const std::filesystem::path& dir, std::ostream& out) {
  std::vector<std::string> warnings;
  const Json a = audit(cfg, &warnings);
  const SystemSpec& spec = cfg.spec;
  out << "system: d = " << spec.dimension << ", m = " << spec.components << "\n";
  for (int j = 0; j < spec.components; ++j)
    out << "  " << spec.label(j) << ": lambda = " << short_num(spec.lambdas[j]) << ", omega = " << short_num(spec.omegas[j])
        << "\n";
  for (const auto& t : a["terms"]) {
    out << "term " << t["name"].get<std::string>() << ": " << t["polynomial"].get<std::string>() << "\n";
    out << "  p = " << t["p"].dump() << ", q = " << t["q"].dump() << ", beta = " << t["beta"].dump()
        << ", alpha = " << t["alpha"].dump() << ", gauge phase sum = "
        << (t["gauge_phase_sum"].is_string() ? t["gauge_phase_sum"].get<std::string>()
                                             : short_num(t["gauge_phase_sum"].get<double>()))
        << "\n";
  }
  out << "gauge invariances: " << a["gauge_invariances"].get<int>() << "\n";
  if (a["synchronous"].get<bool>())
    out << "synchronous: yes (frequency " << short_num(a["synchronous_frequency"].get<double>()) << ", degree "
        << a["synchronous_degree"].get<int>() << ")\n";
  else
    out << "synchronous: no (" << a["synchronous_reason"].get<std::string>() << ")\n";
  for (const auto& v : a["structural_verdicts"])
    out << v["check"].get<std::string>() << ": " << (v["applies"].get<bool>() ? "APPLIES" : "NOT-APPLICABLE") << " ("
        << v["reason"].get<std::string>() << ")\n";
  print_warnings(out, warnings);
  Json doc = a;
  doc["warnings"] = warnings;
  if (cfg.output.wants("json")) write_file_atomic(dir / "audit.json", dump_json(doc));
  return kExitCompleted;
}

int run_groundstate(const RunConfig& cfg, const std::filesystem::path& dir, std::ostream& out) {
  GroundState gs = compute_ground_state(cfg);
  const BoundState& bs = gs.state;
  const SystemSpec& spec = cfg.spec;
  const Json ids = identity_report(spec, *gs.spectral, bs);
  out << "grid: d = " << bs.grid.dimension << ", L = " << short_num(bs.grid.half_width) << ", N = " << bs.grid.points
      << "\n";
  for (int j = 0; j < spec.components; ++j)
    out << "  " << spec.label(j) << ": int Q^2 = " << short_num(bs.mass_integrals[j])
        << ", residual linf = " << short_num(bs.residuals[j].linf) << "\n";
  for (std::size_t k = 0; k < spec.terms.size(); ++k)
    out << "  int n_" << (k + 1) << " = " << short_num(bs.term_integrals[k]) << "\n";
  out << "first integral residual: " << short_num(ids["first_integrals"]["max"].get<double>()) << "\n";
  out << "pohozaev residual: " << short_num(ids["pohozaev"]["residual"].get<double>()) << "\n";
  print_warnings(out, gs.warnings);

  if (cfg.output.wants("mtl1")) write_profile(dir / "profile.mtl1", profile_from_bound_state(bs));
  if (cfg.output.wants("json")) {
    Json doc;
    doc["format"] = "mtl-groundstate/1";
    doc["spec_hash"] = spec_hash_hex(spec);
    doc["grid"] = grid_json(bs.grid);
    doc["solver"] = gs.info;
    Json res = Json::array();
    for (const auto& r : bs.residuals) res.push_back({{"l2", r.l2}, {"linf", r.linf}});
    doc["residuals"] = res;
    doc["mass_integrals"] = bs.mass_integrals;
    doc["gradient_integrals"] = bs.gradient_integrals;
    doc["term_integrals"] = bs.term_integrals;
    doc["identities"] = ids;
    doc["warnings"] = gs.warnings;
    write_file_atomic(dir / "groundstate.json", dump_json(doc));
  }
  return kExitCompleted;
}

int run_analyze(const RunConfig& cfg, const std::filesystem::path& dir, std::ostream& out) {
  GroundState gs = compute_ground_state(cfg);
  const InstabilityReport rep = verdict(cfg.spec, gs.state, cfg.criterion.tolerances);
  print_matrix(out, rep);
  out << "k ratios:";
  for (double k : rep.k_ratios) out << " " << short_num(k);
  out << "\nverdict: " << to_string(rep.verdict) << "\n";
  for (const auto& v : rep.structural)
    out << v.check << ": " << (v.applies ? "APPLIES" : "NOT-APPLICABLE") << " (" << v.reason << ")\n";
  print_warnings(out, gs.warnings);
  if (cfg.output.wants("json")) write_file_atomic(dir / "report.json", dump_json(report_to_json(cfg.spec, gs.state, rep)));
  return rep.verdict == Verdict::Unstable ? kExitCompleted : kExitInconclusive;
}

int run_simulate(const RunConfig& cfg, const std::filesystem::path& dir, std::ostream& out) {
  GroundState gs = compute_ground_state(cfg);
  const SystemSpec& spec = cfg.spec;
  const BoundState& bs = gs.state;
  const InstabilityReport rep = verdict(spec, bs, cfg.criterion.tolerances);
  std::vector<std::string> warnings = gs.warnings;
  FieldState initial = FieldState::from_real(bs.grid, bs.profiles);
  bool perturbed = false;
  if (cfg.simulate.perturb && cfg.simulate.t0 != 0.0) {
    if (rep.direction) {
      initial = perturbed_initial_data(spec, *gs.spectral, bs, rep, cfg.simulate.t0);
      perturbed = true;
    } else {
      warnings.push_back("verdict " + to_string(rep.verdict) + ": no unstable direction, starting from the bound state");
    }
  }
  const BoundState* orbit = spec.has_exact_omegas() ? &bs : nullptr;
  if (!orbit) warnings.push_back("frequencies are not rational: orbit distance disabled");
  const SimulationTrace trace = evolve(spec, *gs.spectral, initial, cfg.simulate.evolve, orbit);
  for (const auto& w : trace.warnings) warnings.push_back(w);

  const double m0 = trace.total_mass.front(), h0 = trace.hamiltonian.front();
  double mass_drift = 0.0, energy_drift = 0.0;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    mass_drift = std::max(mass_drift, std::abs(trace.total_mass[i] - m0) / std::abs(m0));
    energy_drift = std::max(energy_drift, std::abs(trace.hamiltonian[i] - h0) / std::max(1e-300, std::abs(h0)));
  }
  out << "verdict: " << to_string(rep.verdict) << (perturbed ? " (perturbed along the unstable direction)" : "") << "\n";
  out << "samples: " << trace.size() << ", final time " << short_num(trace.times.back()) << "\n";
  out << "mass drift: " << short_num(mass_drift) << ", hamiltonian drift: " << short_num(energy_drift) << "\n";
  if (orbit)
    out << "orbit distance: " << short_num(trace.orbit_distance.front()) << " -> "
        << short_num(trace.orbit_distance.back()) << "\n";
  for (const auto& e : trace.events)
    out << "event " << to_string(e.kind) << " at t = " << short_num(e.time) << ": " << e.detail << "\n";
  print_warnings(out, warnings);

  if (cfg.output.wants("csv")) write_file_atomic(dir / "trace.csv", trace_to_csv(trace));
  if (cfg.output.wants("json")) {
    write_file_atomic(dir / "events.json", dump_json(events_to_json(trace.events)));
    Json doc;
    doc["format"] = "mtl-simulation/1";
    doc["spec_hash"] = spec_hash_hex(spec);
    doc["verdict"] = to_string(rep.verdict);
    doc["perturbed"] = perturbed;
    doc["t0"] = perturbed ? cfg.simulate.t0 : 0.0;
    doc["integrator"] = to_string(cfg.simulate.evolve.integrator);
    doc["final_dt"] = trace.final_dt;
    doc["final_time"] = trace.times.back();
    doc["halted"] = trace.halted;
    doc["mass_drift"] = mass_drift;
    doc["hamiltonian_drift"] = energy_drift;
    doc["events"] = trace.events.size();
    doc["warnings"] = warnings;
    write_file_atomic(dir / "simulation.json", dump_json(doc));
  }
  return kExitCompleted;
}

int run_sweep(const RunConfig& cfg, const std::filesystem::path& dir, std::ostream& out) {
  if (!cfg.criterion.sweep) throw ConfigError("sweep needs [criterion] sweep_parameter, sweep_min, sweep_max");
  const SweepConfig sw = *cfg.criterion.sweep;
  ScalarCache cache;
  SweepEvaluator eval = [&](double value) {
    SweepPoint p;
    p.parameter = value;
    const RunConfig point = reparse(cfg, {sw.parameter + "=" + num(value)});
    GroundState gs = compute_ground_state(point, &cache);
    const InstabilityReport rep = verdict(point.spec, gs.state, point.criterion.tolerances);
    p.min_eigenvalue = rep.min_eigenvalue;
    p.verdict = rep.verdict;
    return p;
  };
  const SweepResult res = sweep_parameter(eval, sw.lo, sw.hi, sw.steps, sw.width);
  Json doc;
  doc["format"] = "mtl-sweep/1";
  doc["parameter"] = sw.parameter;
  Json pts = Json::array();
  for (const auto& p : res.points) {
    Json pj;
    pj["value"] = p.parameter;
    pj["missing"] = p.missing;
    if (p.missing) {
      pj["error"] = p.error;
    } else {
      pj["min_eigenvalue"] = p.min_eigenvalue;
      pj["verdict"] = to_string(p.verdict);
    }
    pts.push_back(pj);
    out << sw.parameter << " = " << short_num(p.parameter) << ": "
        << (p.missing ? "MISSING (" + p.error + ")" : to_string(p.verdict) + ", min eigenvalue " + short_num(p.min_eigenvalue))
        << "\n";
  }
  doc["points"] = pts;
  if (res.bracket) {
    doc["bracket"] = {res.bracket->first, res.bracket->second};
    doc["threshold"] = *res.threshold;
    out << "threshold: " << short_num(*res.threshold) << " in [" << short_num(res.bracket->first) << ", "
        << short_num(res.bracket->second) << "]\n";
  } else {
    doc["bracket"] = nullptr;
    doc["threshold"] = nullptr;
    out << "no sign change of the minimal eigenvalue in [" << short_num(sw.lo) << ", " << short_num(sw.hi) << "]\n";
  }
  if (cfg.output.wants("json")) write_file_atomic(dir / "sweep.json", dump_json(doc));
  return kExitCompleted;
}

int cmd_validate(const CommandOptions& options, std::ostream& out) {
  const RunConfig cfg = load(options);
  return run_validate(cfg, output_directory(cfg, options), out);
}

int cmd_groundstate(const CommandOptions& options, std::ostream& out) {
  const RunConfig cfg = load(options);
  return run_groundstate(cfg, output_directory(cfg, options), out);
}

int cmd_analyze(const CommandOptions& options, std::ostream& out) {
  const RunConfig cfg = load(options);
  return run_analyze(cfg, output_directory(cfg, options), out);
}

int cmd_simulate(const CommandOptions& options, std::ostream& out) {
  const RunConfig cfg = load(options);
  return run_simulate(cfg, output_directory(cfg, options), out);
}

int cmd_sweep(const CommandOptions& options, std::ostream& out) {
  const RunConfig cfg = load(options);
  return run_sweep(cfg, output_directory(cfg, options), out);
}

int run_command(const std::string& command, const CommandOptions& options, std::ostream& out, std::ostream& err) {
  int code = kExitCompleted;
  std::string kind, message;
  try {
    if (command == "validate") return cmd_validate(options, out);
    if (command == "groundstate") return cmd_groundstate(options, out);
    if (command == "analyze") return cmd_analyze(options, out);
    if (command == "simulate") return cmd_simulate(options, out);
    if (command == "sweep") return cmd_sweep(options, out);
    throw ConfigError("unknown command '" + command + "'");
  } catch (const ConfigError& e) {
    code = kExitConfigError;
    kind = "config";
    message = e.what();
  } catch (const SolverError& e) {
    code = kExitSolverFailure;
    kind = "solver";
    message = e.what();
  } catch (const PreconditionError& e) {
    code = kExitSolverFailure;
    kind = "precondition";
    message = e.what();
  } catch (const std::exception& e) {
    code = kExitInternal;
    kind = "internal";
    message = e.what();
  }
  err << "error (" << kind << "): " << message << "\n";
  std::filesystem::path dir = options.out ? *options.out : std::filesystem::path("out");
  if (!options.out) {
    try {
      dir = parse_config(options.config, options.overrides).output.directory;
    } catch (const std::exception&) {
    }
  }
  try {
    Json doc;
    doc["command"] = command;
    doc["config"] = options.config.string();
    doc["exit_code"] = code;
    doc["kind"] = kind;
    doc["message"] = message;
    write_file_atomic(dir / "error.json", dump_json(doc));
  } catch (const std::exception& e) {
    err << "could not write error.json: " << e.what() << "\n";
  }
  return code;
}

}  // namespace mtl
