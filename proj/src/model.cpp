#include "mtl/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mtl/error.hpp"

namespace mtl {

namespace {

Complex ipow(Complex z, int n) {
  Complex r(1.0, 0.0);
  while (n > 0) {
    if (n & 1) r *= z;
    z *= z;
    n >>= 1;
  }
  return r;
}

double ipow(double x, int n) {
  double r = 1.0;
  while (n > 0) {
    if (n & 1) r *= x;
    x *= x;
    n >>= 1;
  }
  return r;
}

// prod_j u_j^{p_j} conj(u_j)^{q_j} with exponent shifts (dp, dq) on component `shift`.
Complex monomial(const MonomialTerm& t, const Complex* u, int shift, int dp, int dq) {
  Complex r(1.0, 0.0);
  const int m = static_cast<int>(t.exponents.size());
  for (int j = 0; j < m; ++j) {
    int p = t.exponents[j].first;
    int q = t.exponents[j].second;
    if (j == shift) {
      p += dp;
      q += dq;
    }
    if (p == q) {
      if (p > 0) r *= ipow(std::norm(u[j]), p);
    } else {
      const int common = std::min(p, q);
      if (common > 0) r *= ipow(std::norm(u[j]), common);
      if (p > q)
        r *= ipow(u[j], p - q);
      else
        r *= ipow(std::conj(u[j]), q - p);
    }
  }
  return r;
}

double term_density_point(const MonomialTerm& t, const Complex* u) {
  return t.coefficient * monomial(t, u, -1, 0, 0).real();
}

void ensure_shape(const SystemSpec& spec, const FieldState& state) {
  if (static_cast<int>(state.fields.size()) != spec.components)
    throw PreconditionError("field state has " + std::to_string(state.fields.size()) + " components, system has " +
                            std::to_string(spec.components));
}

}  // namespace

int MonomialTerm::alpha() const {
  int a = 0;
  for (const auto& [p, q] : exponents) a += p + q;
  return a;
}

bool MonomialTerm::is_modulus_only() const {
  return std::all_of(exponents.begin(), exponents.end(), [](const auto& e) { return e.first == e.second; });
}

std::optional<int> MonomialTerm::diagonal_quadratic_component() const {
  if (alpha() != 2) return std::nullopt;
  for (std::size_t j = 0; j < exponents.size(); ++j)
    if (exponents[j].first == 1 && exponents[j].second == 1) return static_cast<int>(j);
  return std::nullopt;
}

std::string MonomialTerm::describe(const std::vector<std::string>& labels) const {
  std::ostringstream os;
  os.precision(17);
  os << coefficient << " * Re(";
  bool first = true;
  for (std::size_t j = 0; j < exponents.size(); ++j) {
    const auto [p, q] = exponents[j];
    const std::string name = j < labels.size() && !labels[j].empty() ? labels[j] : "u" + std::to_string(j + 1);
    if (p > 0) {
      os << (first ? "" : " ") << name;
      if (p > 1) os << "^" << p;
      first = false;
    }
    if (q > 0) {
      os << (first ? "" : " ") << "conj(" << name << ")";
      if (q > 1) os << "^" << q;
      first = false;
    }
  }
  if (first) os << "1";
  os << ")";
  return os.str();
}

std::string SystemSpec::label(int j) const {
  if (j < static_cast<int>(labels.size()) && !labels[j].empty()) return labels[j];
  return "u" + std::to_string(j + 1);
}

void SystemSpec::validate_structure() const {
  if (dimension < 1 || dimension > 5) throw PreconditionError("dimension must be between 1 and 5");
  if (components < 1) throw PreconditionError("system needs at least one component");
  if (static_cast<int>(lambdas.size()) != components || static_cast<int>(omegas.size()) != components)
    throw PreconditionError("lambda and omega vectors must have one entry per component");
  if (!omegas_exact.empty() && static_cast<int>(omegas_exact.size()) != components)
    throw PreconditionError("exact omega vector has the wrong length");
  if (!labels.empty() && static_cast<int>(labels.size()) != components)
    throw PreconditionError("labels must name every component");
  for (int j = 0; j < components; ++j) {
    if (lambdas[j] == 0.0 || !std::isfinite(lambdas[j]))
      throw PreconditionError("lambda_" + std::to_string(j + 1) + " must be a nonzero finite number");
    if (!std::isfinite(omegas[j]) || !(lambdas[j] * omegas[j] > 0.0))
      throw PreconditionError("lambda_" + std::to_string(j + 1) + " * omega_" + std::to_string(j + 1) +
                              " must be positive");
  }
  bool nonlinear = false;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const auto& t = terms[k];
    if (static_cast<int>(t.exponents.size()) != components)
      throw PreconditionError("term " + std::to_string(k + 1) + " needs one exponent pair per component");
    if (t.coefficient == 0.0 || !std::isfinite(t.coefficient))
      throw PreconditionError("term " + std::to_string(k + 1) + " has a zero or non-finite coefficient");
    for (const auto& [p, q] : t.exponents)
      if (p < 0 || q < 0) throw PreconditionError("term " + std::to_string(k + 1) + " has a negative exponent");
    if (t.alpha() < 2) throw PreconditionError("term " + std::to_string(k + 1) + " has total degree below 2");
    if (t.alpha() >= 3) nonlinear = true;
  }
  if (!nonlinear) throw PreconditionError("system has no term of degree >= 3 (linear system)");
}

double gauge_phase_sum(const SystemSpec& spec, const MonomialTerm& term) {
  double s = 0.0;
  for (int j = 0; j < spec.components; ++j) s += spec.omegas[j] * (term.exponents[j].first - term.exponents[j].second);
  return s;
}

std::optional<Rational> gauge_phase_sum_exact(const SystemSpec& spec, const MonomialTerm& term) {
  if (!spec.has_exact_omegas()) return std::nullopt;
  try {
    Rational s;
    for (int j = 0; j < spec.components; ++j)
      s += spec.omegas_exact[j] * Rational(term.exponents[j].first - term.exponents[j].second);
    return s;
  } catch (const std::overflow_error&) {
    return std::nullopt;
  }
}

GaugeResult validate_gauge(const SystemSpec& spec) {
  GaugeResult result;
  result.exact = spec.has_exact_omegas();
  double scale = 0.0;
  for (double w : spec.omegas) scale = std::max(scale, std::abs(w));
  for (std::size_t k = 0; k < spec.terms.size(); ++k) {
    const auto& t = spec.terms[k];
    const double mismatch = gauge_phase_sum(spec, t);
    auto exact = gauge_phase_sum_exact(spec, t);
    bool violated;
    if (exact) {
      violated = !exact->is_zero();
    } else {
      int weight = 0;
      for (const auto& [p, q] : t.exponents) weight += std::abs(p - q);
      violated = std::abs(mismatch) > 1e-12 * std::max(1.0, scale * weight);
    }
    if (violated) result.violations.push_back({k, mismatch, exact});
  }
  result.ok = result.violations.empty();
  return result;
}

int gauge_invariance_count(const SystemSpec& spec) {
  const int m = spec.components;
  std::vector<std::vector<Rational>> rows;
  for (const auto& t : spec.terms) {
    std::vector<Rational> row(m);
    bool any = false;
    for (int j = 0; j < m; ++j) {
      row[j] = Rational(t.exponents[j].first - t.exponents[j].second);
      any |= !row[j].is_zero();
    }
    if (any) rows.push_back(std::move(row));
  }
  int rank = 0;
  for (int col = 0; col < m && rank < static_cast<int>(rows.size()); ++col) {
    int pivot = -1;
    for (int r = rank; r < static_cast<int>(rows.size()); ++r)
      if (!rows[r][col].is_zero()) {
        pivot = r;
        break;
      }
    if (pivot < 0) continue;
    std::swap(rows[pivot], rows[rank]);
    for (int r = 0; r < static_cast<int>(rows.size()); ++r) {
      if (r == rank || rows[r][col].is_zero()) continue;
      const Rational f = rows[r][col] / rows[rank][col];
      for (int c = 0; c < m; ++c) rows[r][c] -= f * rows[rank][c];
    }
    ++rank;
  }
  return m - rank;
}

std::optional<Rational> fundamental_frequency(const SystemSpec& spec) {
  if (!spec.has_exact_omegas()) return std::nullopt;
  Rational g;
  for (const auto& w : spec.omegas_exact) g = gcd(g, w);
  if (g.is_zero()) return std::nullopt;
  return g;
}

FieldState FieldState::zero(const Grid& grid, int components) {
  FieldState s;
  s.grid = grid;
  s.fields.assign(components, ComplexField(grid.size(), Complex(0.0)));
  return s;
}

FieldState FieldState::from_real(const Grid& grid, const std::vector<RealField>& profiles) {
  FieldState s;
  s.grid = grid;
  for (const auto& p : profiles) s.fields.push_back(to_complex(p));
  return s;
}

bool FieldState::all_finite() const {
  for (const auto& f : fields)
    for (const auto& z : f)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

std::vector<double> component_masses(const Spectral& spectral, const FieldState& state) {
  std::vector<double> out;
  for (const auto& f : state.fields) out.push_back(spectral.l2_norm_squared(f));
  return out;
}

double mass(const SystemSpec& spec, const Spectral& spectral, const FieldState& state) {
  ensure_shape(spec, state);
  const auto masses = component_masses(spectral, state);
  double m = 0.0;
  for (int j = 0; j < spec.components; ++j) m += 0.5 * spec.mass_weight(j) * masses[j];
  return m;
}

RealField term_density(const MonomialTerm& term, const std::vector<ComplexField>& fields) {
  const std::size_t n = fields.empty() ? 0 : fields[0].size();
  const std::size_t m = fields.size();
  RealField out(n);
  std::vector<Complex> u(m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) u[j] = fields[j][i];
    out[i] = term_density_point(term, u.data());
  }
  return out;
}

std::vector<double> term_integrals(const SystemSpec& spec, const Spectral& spectral,
                                   const std::vector<ComplexField>& fields) {
  std::vector<double> out;
  for (const auto& t : spec.terms) out.push_back(spectral.integrate(term_density(t, fields)));
  return out;
}

std::vector<double> term_integrals(const SystemSpec& spec, const Spectral& spectral,
                                   const std::vector<RealField>& profiles) {
  std::vector<ComplexField> fields;
  for (const auto& p : profiles) fields.push_back(to_complex(p));
  return term_integrals(spec, spectral, fields);
}

HamiltonianParts hamiltonian(const SystemSpec& spec, const Spectral& spectral, const FieldState& state) {
  ensure_shape(spec, state);
  HamiltonianParts h;
  for (const auto& f : state.fields) h.kinetic += 0.5 * spectral.gradient_norm_squared(f);
  for (double v : term_integrals(spec, spectral, state.fields)) h.potential.push_back(0.5 * v);
  h.total = h.kinetic;
  for (double v : h.potential) h.total += v;
  return h;
}

double action(const SystemSpec& spec, const Spectral& spectral, const FieldState& state) {
  return mass(spec, spectral, state) + hamiltonian(spec, spectral, state).total;
}

void nonlinear_gradient_point(const SystemSpec& spec, const Complex* u, Complex* g) {
  const int m = spec.components;
  for (int j = 0; j < m; ++j) g[j] = Complex(0.0);
  for (const auto& t : spec.terms) {
    const double half_c = 0.5 * t.coefficient;
    for (int j = 0; j < m; ++j) {
      const auto [p, q] = t.exponents[j];
      if (p == 0 && q == 0) continue;
      Complex v(0.0);
      if (q > 0) v += static_cast<double>(q) * monomial(t, u, j, 0, -1);
      if (p > 0) v += static_cast<double>(p) * std::conj(monomial(t, u, j, -1, 0));
      g[j] += half_c * v;
    }
  }
}

std::vector<ComplexField> nonlinear_gradient(const SystemSpec& spec, const std::vector<ComplexField>& fields) {
  const int m = spec.components;
  const std::size_t n = fields.empty() ? 0 : fields[0].size();
  std::vector<ComplexField> out(m, ComplexField(n));
  std::vector<Complex> u(m), g(m);
  for (std::size_t i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) u[j] = fields[j][i];
    nonlinear_gradient_point(spec, u.data(), g.data());
    for (int j = 0; j < m; ++j) out[j][i] = g[j];
  }
  return out;
}

double StationaryResidual::max_linf() const {
  double r = 0.0;
  for (const auto& n : norms) r = std::max(r, n.linf);
  return r;
}

StationaryResidual stationary_residual(const SystemSpec& spec, const Spectral& spectral,
                                       const std::vector<RealField>& profiles, const std::vector<double>* omegas) {
  if (static_cast<int>(profiles.size()) != spec.components)
    throw PreconditionError("profile count does not match the system");
  const auto& w = omegas ? *omegas : spec.omegas;
  std::vector<ComplexField> fields;
  for (const auto& p : profiles) fields.push_back(to_complex(p));
  const auto g = nonlinear_gradient(spec, fields);
  StationaryResidual res;
  for (int j = 0; j < spec.components; ++j) {
    RealField r = spectral.laplacian(std::span<const double>(profiles[j]));
    const double lw = spec.lambdas[j] * w[j];
    double linf = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      r[i] += -lw * profiles[j][i] - g[j][i].real();
      linf = std::max(linf, std::abs(r[i]));
    }
    res.norms.push_back({std::sqrt(spectral.l2_norm_squared(r)), linf});
    res.fields.push_back(std::move(r));
  }
  return res;
}

}  // namespace mtl
