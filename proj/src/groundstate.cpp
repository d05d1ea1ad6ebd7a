#include "mtl/groundstate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "mtl/error.hpp"
#include "mtl/linalg.hpp"

namespace mtl {

namespace {

constexpr double kStall = 16.0 * std::numeric_limits<double>::epsilon();

double linf(std::span<const double> v) {
  double r = 0.0;
  for (double x : v) r = std::max(r, std::abs(x));
  return r;
}

double power_int(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

// c * prod x_j^{beta_j - shift_j}, zero when an exponent would go negative.
double monomial_real(const MonomialTerm& t, const std::vector<double>& x, int i = -1, int j = -1) {
  double r = t.coefficient;
  for (std::size_t c = 0; c < x.size(); ++c) {
    int e = t.beta(static_cast<int>(c));
    if (static_cast<int>(c) == i) --e;
    if (static_cast<int>(c) == j) --e;
    if (e < 0) return 0.0;
    r *= power_int(x[c], e);
  }
  return r;
}

Matrix polynomial_hessian(const std::vector<MonomialTerm>& f, const std::vector<double>& x) {
  const int m = static_cast<int>(x.size());
  Matrix h(m);
  for (const auto& t : f)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        const double factor = i == j ? t.beta(i) * (t.beta(i) - 1.0) : t.beta(i) * static_cast<double>(t.beta(j));
        if (factor != 0.0) h(i, j) += factor * monomial_real(t, x, i, j);
      }
  return h;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void normalize(std::vector<double>& x) {
  const double n = std::sqrt(dot(x, x));
  for (double& v : x) v /= n;
}

// Raise to the stabilizing exponent, keeping the sign for robustness.
double stabilizer(double s, double gamma) { return s > 0.0 ? std::pow(s, gamma) : 1.0; }

}  // namespace

double relative_gap(double lhs, double rhs) {
  const double denom = std::abs(lhs) + std::abs(rhs);
  if (denom == 0.0) return 0.0;
  return std::abs(lhs - rhs) / denom;
}

double BoundState::max_residual() const {
  double r = 0.0;
  for (const auto& n : residuals) r = std::max(r, n.linf);
  return r;
}

BoundState make_bound_state(const SystemSpec& spec, const Spectral& spectral, std::vector<RealField> profiles,
                            std::vector<double> omega, double threshold) {
  BoundState bs;
  bs.grid = spectral.grid();
  bs.omega = std::move(omega);
  bs.profiles = std::move(profiles);
  bs.certification_threshold = threshold;
  bs.residuals = stationary_residual(spec, spectral, bs.profiles, &bs.omega).norms;
  for (const auto& q : bs.profiles) {
    bs.mass_integrals.push_back(spectral.l2_norm_squared(q));
    bs.gradient_integrals.push_back(spectral.gradient_norm_squared(q));
  }
  bs.term_integrals = term_integrals(spec, spectral, bs.profiles);
  return bs;
}

double cache_discrepancy(const SystemSpec& spec, const Spectral& spectral, const BoundState& bs) {
  const BoundState fresh = make_bound_state(spec, spectral, bs.profiles, bs.omega, bs.certification_threshold);
  double worst = 0.0;
  auto cmp = [&](const std::vector<double>& a, const std::vector<double>& b) {
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, relative_gap(a[i], b[i]));
  };
  cmp(bs.mass_integrals, fresh.mass_integrals);
  cmp(bs.gradient_integrals, fresh.gradient_integrals);
  cmp(bs.term_integrals, fresh.term_integrals);
  return worst;
}

Grid default_grid(int dimension, double frequency) {
  Grid g;
  g.dimension = dimension;
  g.half_width = (dimension == 3 ? 20.0 : 40.0) / std::sqrt(frequency);
  g.points = dimension == 1 ? 2048 : dimension == 2 ? 512 : 128;
  return g;
}

RealField closed_form_1d(const Grid& grid, double omega, double a, int p) {
  if (grid.dimension != 1) throw PreconditionError("closed form profile exists only in one dimension");
  if (p != 3) throw PreconditionError("closed form profile requires a quadratic nonlinearity (p = 3)");
  if (!(omega > 0.0) || !(a > 0.0)) throw PreconditionError("closed form profile needs omega > 0 and a > 0");
  RealField q(grid.size());
  const double amp = 3.0 * omega / (2.0 * a);
  const double k = std::sqrt(omega) / 2.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double c = 1.0 / std::cosh(k * grid.coordinate(static_cast<int>(i)));
    q[i] = amp * c * c;
  }
  return q;
}

RealField gaussian_guess(const Grid& grid, double omega, double a, int s, const std::array<double, 3>& center) {
  const double amp = std::pow((s + 1.0) * omega / (2.0 * a), 1.0 / (s - 1.0));
  const double rate = (s - 1.0) * omega / 4.0;
  RealField q(grid.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    const auto x = grid.position(i);
    double r2 = 0.0;
    for (int d = 0; d < grid.dimension; ++d) r2 += (x[d] - center[d]) * (x[d] - center[d]);
    q[i] = amp * std::exp(-rate * r2);
  }
  return q;
}

ScalarSolution petviashvili_scalar(const Spectral& spectral, double omega, double a, int s,
                                   const PetviashviliOptions& options, const RealField* initial) {
  if (!(omega > 0.0) || !(a > 0.0) || s < 2)
    throw PreconditionError("scalar solver needs omega > 0, a > 0 and degree s >= 2");
  const Grid& grid = spectral.grid();
  const auto k2 = spectral.k_squared();
  const double gamma = s / (s - 1.0);
  ScalarSolution sol;
  sol.profile = initial ? *initial : gaussian_guess(grid, omega, a, s);
  if (sol.profile.size() != grid.size()) throw PreconditionError("initial guess does not match the grid");
  if (linf(sol.profile) == 0.0) throw PreconditionError("zero initial guess");

  const std::size_t n = grid.size();
  ComplexField work(n), qhat(n), nhat(n);
  int stalled = 0;
  for (int it = 1; it <= options.max_iterations; ++it) {
    for (std::size_t i = 0; i < n; ++i) work[i] = Complex(sol.profile[i], 0.0);
    spectral.forward(work, qhat);
    for (std::size_t i = 0; i < n; ++i) work[i] = Complex(a * power_int(sol.profile[i], s), 0.0);
    spectral.forward(work, nhat);
    double num = 0.0, den = 0.0;
    for (std::size_t f = 0; f < n; ++f) {
      num += (omega + k2[f]) * std::norm(qhat[f]);
      den += (nhat[f] * std::conj(qhat[f])).real();
    }
    if (!(den > 0.0)) throw SolverError("stabilizing factor undefined (nonpositive denominator)", 0.0, 0.0, it);
    const double factor = num / den;
    const double scale = stabilizer(factor, gamma);
    for (std::size_t f = 0; f < n; ++f) nhat[f] *= scale / (omega + k2[f]);
    spectral.backward(nhat, work);
    double gap = 0.0, peak = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      gap = std::max(gap, std::abs(work[i].real() - sol.profile[i]));
      sol.profile[i] = work[i].real();
      peak = std::max(peak, std::abs(sol.profile[i]));
    }
    sol.iterations = it;
    sol.factor = factor;
    sol.gap = gap;
    sol.factor_history.push_back(factor);
    if (!std::isfinite(gap)) throw SolverError("scalar iteration diverged", factor, gap, it);
    stalled = gap <= kStall * std::max(1.0, peak) ? stalled + 1 : 0;
    if ((std::abs(factor - 1.0) <= options.factor_tolerance && gap <= options.gap_tolerance * std::max(1.0, peak)) ||
        stalled >= options.stagnation_iterations)
      return sol;
  }
  throw SolverError("scalar iteration did not converge", sol.factor, sol.gap, sol.iterations);
}

CoupledSolution petviashvili_coupled(const SystemSpec& spec, const Spectral& spectral, const std::vector<double>& omega,
                                     std::vector<RealField> initial, const PetviashviliOptions& options) {
  const int m = spec.components;
  const Grid& grid = spectral.grid();
  const std::size_t n = grid.size();
  if (static_cast<int>(initial.size()) != m) throw PreconditionError("initial guess needs one profile per component");
  double peak0 = 0.0;
  for (const auto& q : initial) {
    if (q.size() != n) throw PreconditionError("initial guess does not match the grid");
    peak0 = std::max(peak0, linf(q));
  }
  if (peak0 == 0.0) throw PreconditionError("zero initial guess (degenerate)");

  CoupledSolution out;
  SystemSpec quad = spec, nonlinear = spec;
  quad.terms.clear();
  nonlinear.terms.clear();
  int degree_min = 1 << 20, degree_max = 0;
  for (const auto& t : spec.terms) {
    if (t.alpha() == 2) {
      quad.terms.push_back(t);
    } else {
      nonlinear.terms.push_back(t);
      degree_min = std::min(degree_min, t.alpha());
      degree_max = std::max(degree_max, t.alpha());
    }
  }
  if (degree_min != degree_max)
    out.warnings.push_back("nonlinear part is not homogeneous; renormalization is best-effort");
  const int s = degree_max - 1;
  const double gamma = s / (s - 1.0);

  // Linear operator D + C, with C read off the quadratic terms.
  Matrix lin(m);
  for (int i = 0; i < m; ++i) {
    std::vector<Complex> e(m, Complex(0.0)), g(m);
    e[i] = 1.0;
    nonlinear_gradient_point(quad, e.data(), g.data());
    for (int j = 0; j < m; ++j) lin(j, i) = g[j].real();
    lin(i, i) += spec.lambdas[i] * omega[i];
  }
  const auto eig = eigen_symmetric(lin);
  if (eig.values.front() <= 0.0)
    throw PreconditionError("linear part of the stationary operator is not positive definite");
  const auto k2 = spectral.k_squared();

  std::vector<ComplexField> q(m, ComplexField(n)), qhat(m, ComplexField(n)), fhat(m, ComplexField(n));
  std::vector<ComplexField> fields(m);
  int stalled = 0;
  for (int it = 1; it <= options.max_iterations; ++it) {
    for (int j = 0; j < m; ++j) {
      fields[j] = to_complex(initial[j]);
      spectral.forward(fields[j], qhat[j]);
    }
    auto g = nonlinear_gradient(nonlinear, fields);
    for (int j = 0; j < m; ++j) {
      for (auto& z : g[j]) z = Complex(-z.real(), 0.0);
      spectral.forward(g[j], fhat[j]);
    }
    double num = 0.0, den = 0.0;
    std::vector<Complex> vq(m), vf(m);
    for (std::size_t f = 0; f < n; ++f) {
      for (int j = 0; j < m; ++j) {
        for (int i = 0; i < m; ++i) num += (std::conj(qhat[j][f]) * lin(j, i) * qhat[i][f]).real();
        num += k2[f] * std::norm(qhat[j][f]);
        den += (fhat[j][f] * std::conj(qhat[j][f])).real();
      }
    }
    if (!(den > 0.0)) throw SolverError("stabilizing factor undefined (nonpositive denominator)", 0.0, 0.0, it);
    const double factor = num / den;
    const double scale = stabilizer(factor, gamma);
    for (std::size_t f = 0; f < n; ++f) {
      // Apply V diag(1 / (lambda + k^2)) V^T.
      for (int j = 0; j < m; ++j) vf[j] = fhat[j][f];
      for (int j = 0; j < m; ++j) vq[j] = 0.0;
      for (int e = 0; e < m; ++e) {
        Complex proj(0.0);
        for (int j = 0; j < m; ++j) proj += eig.vectors[e][j] * vf[j];
        proj *= scale / (eig.values[e] + k2[f]);
        for (int j = 0; j < m; ++j) vq[j] += eig.vectors[e][j] * proj;
      }
      for (int j = 0; j < m; ++j) fhat[j][f] = vq[j];
    }
    double gap = 0.0, peak = 0.0;
    for (int j = 0; j < m; ++j) {
      spectral.backward(fhat[j], q[j]);
      for (std::size_t i = 0; i < n; ++i) {
        gap = std::max(gap, std::abs(q[j][i].real() - initial[j][i]));
        initial[j][i] = q[j][i].real();
        peak = std::max(peak, std::abs(initial[j][i]));
      }
    }
    out.iterations = it;
    out.factor = factor;
    out.gap = gap;
    if (!std::isfinite(gap)) throw SolverError("coupled iteration diverged", factor, gap, it);
    stalled = gap <= kStall * std::max(1.0, peak) ? stalled + 1 : 0;
    if ((std::abs(factor - 1.0) <= options.factor_tolerance && gap <= options.gap_tolerance * std::max(1.0, peak)) ||
        stalled >= options.stagnation_iterations) {
      out.state = make_bound_state(spec, spectral, initial, omega);
      for (int j = 0; j < m; ++j)
        if (linf(out.state.profiles[j]) < 1e-8 * peak)
          out.warnings.push_back("semi-trivial state: component " + spec.label(j) + " collapsed to zero");
      out.state.notes = out.warnings;
      if (!out.state.certified())
        throw SolverError("coupled iteration converged to an uncertified state (residual " +
                              std::to_string(out.state.max_residual()) + ")",
                          factor, gap, it);
      return out;
    }
  }
  throw SolverError("coupled iteration did not converge", out.factor, out.gap, out.iterations);
}

double polynomial_value(const std::vector<MonomialTerm>& f, const std::vector<double>& x) {
  double s = 0.0;
  for (const auto& t : f) s += monomial_real(t, x);
  return s;
}

std::vector<double> polynomial_gradient(const std::vector<MonomialTerm>& f, const std::vector<double>& x) {
  std::vector<double> g(x.size(), 0.0);
  for (const auto& t : f)
    for (std::size_t j = 0; j < x.size(); ++j) {
      const int b = t.beta(static_cast<int>(j));
      if (b > 0) g[j] += b * monomial_real(t, x, static_cast<int>(j));
    }
  return g;
}

SphereMaximum maximize_on_sphere(const std::vector<MonomialTerm>& f, int components, int degree, std::uint64_t seed,
                                 int random_starts) {
  const int m = components;
  std::vector<std::vector<double>> starts;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int s = 0; s < random_starts; ++s) {
    std::vector<double> x(m);
    for (double& v : x) v = normal(rng);
    if (dot(x, x) == 0.0) x[0] = 1.0;
    normalize(x);
    starts.push_back(std::move(x));
  }
  for (int j = 0; j < m; ++j)
    for (double sign : {1.0, -1.0}) {
      std::vector<double> x(m, 0.0);
      x[j] = sign;
      starts.push_back(std::move(x));
    }

  SphereMaximum out;
  out.starts = static_cast<int>(starts.size());
  std::vector<SphereCriticalPoint> found;
  for (auto x : starts) {
    // Projected gradient ascent with adaptive step.
    double fx = polynomial_value(f, x);
    double eta = 0.1;
    for (int it = 0; it < 5000; ++it) {
      auto g = polynomial_gradient(f, x);
      const double radial = dot(g, x);
      std::vector<double> t(m);
      for (int j = 0; j < m; ++j) t[j] = g[j] - radial * x[j];
      if (std::sqrt(dot(t, t)) < 1e-13) break;
      bool moved = false;
      while (eta > 1e-16) {
        std::vector<double> y(m);
        for (int j = 0; j < m; ++j) y[j] = x[j] + eta * t[j];
        normalize(y);
        const double fy = polynomial_value(f, y);
        if (fy > fx) {
          x = std::move(y);
          fx = fy;
          eta *= 1.5;
          moved = true;
          break;
        }
        eta *= 0.5;
      }
      if (!moved) break;
    }
    // Newton on grad f - mu x = 0, (|x|^2 - 1) / 2 = 0.
    double mu = dot(polynomial_gradient(f, x), x);
    for (int it = 0; it < 60; ++it) {
      auto g = polynomial_gradient(f, x);
      Matrix h = polynomial_hessian(f, x);
      std::vector<double> rhs(m + 1);
      double res = 0.0;
      for (int j = 0; j < m; ++j) {
        rhs[j] = -(g[j] - mu * x[j]);
        res += rhs[j] * rhs[j];
      }
      rhs[m] = -0.5 * (dot(x, x) - 1.0);
      res += rhs[m] * rhs[m];
      if (std::sqrt(res) < 1e-16) break;
      Matrix jac(m + 1);
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) jac(i, j) = h(i, j) - (i == j ? mu : 0.0);
        jac(i, m) = -x[i];
        jac(m, i) = x[i];
      }
      std::vector<double> step;
      try {
        step = solve_dense(jac, rhs);
      } catch (const Error&) {
        break;
      }
      for (int j = 0; j < m; ++j) x[j] += step[j];
      mu += step[m];
    }
    normalize(x);
    SphereCriticalPoint cp;
    cp.point = x;
    cp.value = polynomial_value(f, x);
    const auto g = polynomial_gradient(f, x);
    double lag = 0.0;
    for (int j = 0; j < m; ++j) lag += (g[j] - degree * cp.value * x[j]) * (g[j] - degree * cp.value * x[j]);
    cp.lagrange_residual = std::sqrt(lag);
    cp.coupling = degree * cp.value / 2.0;
    Matrix h = polynomial_hessian(f, x);
    const double lm = dot(g, x);
    double hn = 1.0 + h.frobenius() + std::abs(lm);
    Matrix proj(m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        double v = 0.0;
        for (int a = 0; a < m; ++a)
          for (int b = 0; b < m; ++b) {
            const double pia = (i == a) - x[i] * x[a];
            const double pbj = (b == j) - x[b] * x[j];
            v += pia * (h(a, b) - (a == b ? lm : 0.0)) * pbj;
          }
        proj(i, j) = v - hn * x[i] * x[j];
      }
    cp.maximizer = eigen_symmetric(proj).values.back() <= 1e-8 * hn;
    found.push_back(std::move(cp));
  }

  double best = -std::numeric_limits<double>::infinity();
  for (const auto& cp : found)
    if (cp.lagrange_residual < 1e-8) best = std::max(best, cp.value);
  const double tol = 1e-10 * std::max(1.0, std::abs(best));
  for (const auto& cp : found) {
    if (cp.lagrange_residual >= 1e-8 || cp.value < best - tol) continue;
    bool duplicate = false;
    for (const auto& other : out.maximizers) {
      double dist = 0.0;
      for (int j = 0; j < m; ++j) dist += (cp.point[j] - other.point[j]) * (cp.point[j] - other.point[j]);
      if (std::sqrt(dist) < 1e-6) duplicate = true;
    }
    if (!duplicate) out.maximizers.push_back(cp);
  }
  auto negatives = [](const SphereCriticalPoint& cp) {
    int c = 0;
    for (double v : cp.point) c += v < -1e-12;
    return c;
  };
  std::sort(out.maximizers.begin(), out.maximizers.end(), [&](const auto& a, const auto& b) {
    if (negatives(a) != negatives(b)) return negatives(a) < negatives(b);
    return a.point > b.point;
  });
  if (out.maximizers.empty()) {
    out.degenerate = true;
    SphereCriticalPoint cp;
    cp.point.assign(m, 0.0);
    cp.point[m - 1] = 1.0;
    out.best = cp;
    return out;
  }
  out.best = out.maximizers.front();
  if (out.best.value <= 1e-14) {
    out.degenerate = true;
    if (std::abs(out.best.value) <= 1e-14) out.best.value = 0.0;
    out.best.coupling = degree * out.best.value / 2.0;
  }
  return out;
}

SynchronousForm synchronous_form(const SystemSpec& spec) {
  const int m = spec.components;
  std::vector<double> c(m, 0.0);
  SynchronousForm form;
  for (std::size_t k = 0; k < spec.terms.size(); ++k) {
    const auto& t = spec.terms[k];
    if (t.alpha() == 2) {
      auto j = t.diagonal_quadratic_component();
      if (!j) throw PreconditionError("term " + std::to_string(k + 1) + " is a quadratic coupling between components");
      c[*j] += t.coefficient;
      continue;
    }
    if (form.degree == 0) form.degree = t.alpha();
    if (t.alpha() != form.degree)
      throw PreconditionError("nonlinear part is not homogeneous (degrees " + std::to_string(form.degree) + " and " +
                              std::to_string(t.alpha()) + ")");
    MonomialTerm neg = t;
    neg.coefficient = -t.coefficient;
    form.sphere.push_back(neg);
  }
  if (form.degree == 0) throw PreconditionError("system has no nonlinear term");
  form.frequency = c[0] + spec.mass_weight(0);
  for (int j = 1; j < m; ++j) {
    const double v = c[j] + spec.mass_weight(j);
    if (std::abs(v - form.frequency) > 1e-12 * std::max(1.0, std::abs(form.frequency)))
      throw PreconditionError("system is not synchronous: c_1 + lambda_1 omega_1 = " + std::to_string(form.frequency) +
                              " but c_" + std::to_string(j + 1) + " + lambda_" + std::to_string(j + 1) + " omega_" +
                              std::to_string(j + 1) + " = " + std::to_string(v));
  }
  if (!(form.frequency > 0.0)) throw PreconditionError("synchronous frequency c + lambda omega must be positive");
  return form;
}

bool is_synchronous(const SystemSpec& spec, std::string* reason) {
  try {
    synchronous_form(spec);
    return true;
  } catch (const PreconditionError& e) {
    if (reason) *reason = e.what();
    return false;
  }
}

BoundState build_synchronous(const SystemSpec& spec, const Spectral& spectral, const SphereCriticalPoint& x0,
                             const RealField& q, double threshold) {
  synchronous_form(spec);
  std::vector<RealField> profiles;
  for (int j = 0; j < spec.components; ++j) {
    RealField p(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) p[i] = x0.point[j] * q[i];
    profiles.push_back(std::move(p));
  }
  BoundState bs = make_bound_state(spec, spectral, std::move(profiles), spec.omegas, threshold);
  if (!bs.certified())
    throw SolverError("synchronous profile failed certification (residual " + std::to_string(bs.max_residual()) + ")",
                      0.0, bs.max_residual(), 0);
  return bs;
}

SynchronousSolution solve_synchronous(const SystemSpec& spec, const Spectral& spectral, std::uint64_t seed,
                                      const PetviashviliOptions& options, bool closed_form) {
  SynchronousSolution sol;
  sol.form = synchronous_form(spec);
  sol.sphere = maximize_on_sphere(sol.form.sphere, spec.components, sol.form.degree, seed);
  if (sol.sphere.degenerate || !(sol.sphere.best.coupling > 0.0))
    throw PreconditionError("sphere maximum is not positive; no synchronous ground state");
  const double a = sol.sphere.best.coupling;
  if (closed_form && spectral.grid().dimension == 1 && sol.form.degree == 3) {
    sol.scalar.profile = closed_form_1d(spectral.grid(), sol.form.frequency, a);
  } else {
    sol.scalar = petviashvili_scalar(spectral, sol.form.frequency, a, sol.form.degree - 1, options);
  }
  for (const auto& x0 : sol.sphere.maximizers) sol.states.push_back(build_synchronous(spec, spectral, x0, sol.scalar.profile));
  return sol;
}

double IdentityResiduals::max() const {
  double r = std::max(aggregate, sigma_table);
  for (double v : per_component) r = std::max(r, v);
  return r;
}

int reference_component(const BoundState& bs) {
  const int m = bs.components();
  double total = 0.0;
  for (double v : bs.mass_integrals) total += v;
  if (bs.mass_integrals[m - 1] > 1e-14 * std::max(1.0, total)) return m - 1;
  int best = m - 1;
  for (int j = m - 1; j >= 0; --j)
    if (bs.mass_integrals[j] > bs.mass_integrals[best]) best = j;
  return best;
}

std::vector<double> k_ratios_for(const SystemSpec& spec, const BoundState& bs, int reference) {
  const double ref = spec.mass_weight(reference) * bs.mass_integrals[reference];
  if (!(ref > 0.0)) throw PreconditionError("reference component has zero mass");
  std::vector<double> k;
  for (int j = 0; j < spec.components; ++j)
    k.push_back(j == reference ? 1.0 : spec.mass_weight(j) * bs.mass_integrals[j] / ref);
  return k;
}

std::vector<std::vector<double>> sigma_table(const SystemSpec& spec, const std::vector<double>& k, int reference) {
  const int m = spec.components;
  double K = 0.0;
  for (double v : k) K += v;
  std::vector<std::vector<double>> sigma(m, std::vector<double>(spec.terms.size()));
  for (std::size_t t = 0; t < spec.terms.size(); ++t) {
    const auto& term = spec.terms[t];
    const double alpha = term.alpha();
    const double e = spec.dimension * (alpha / 2.0 - 1.0);
    double mix = 0.0;
    for (int l = 0; l < m; ++l) mix += k[l] * term.beta(reference) - term.beta(l);
    for (int j = 0; j < m; ++j)
      sigma[j][t] = 0.5 * (-(k[j] / K) * (e + mix) + k[j] * term.beta(reference) - term.beta(j));
  }
  return sigma;
}

IdentityResiduals first_integral_check(const SystemSpec& spec, const BoundState& bs) {
  IdentityResiduals out;
  const int m = spec.components;
  const int r = reference_component(bs);
  const auto k = k_ratios_for(spec, bs, r);
  const auto sigma = sigma_table(spec, k, r);
  double lhs_total = 0.0;
  for (int j = 0; j < m; ++j) lhs_total += bs.gradient_integrals[j];
  // Relative to the total so a vanished component does not divide 0 by 0.
  for (int j = 0; j < m; ++j) {
    double rhs = 0.0;
    for (std::size_t t = 0; t < spec.terms.size(); ++t) rhs += sigma[j][t] * bs.term_integrals[t];
    const double gap = std::abs(bs.gradient_integrals[j] - rhs);
    out.per_component.push_back(lhs_total > 0.0 ? gap / lhs_total : gap);
  }
  double agg = 0.0;
  for (std::size_t t = 0; t < spec.terms.size(); ++t)
    agg -= 0.5 * spec.dimension * (spec.terms[t].alpha() / 2.0 - 1.0) * bs.term_integrals[t];
  out.aggregate = relative_gap(lhs_total, agg);
  for (int j = 0; j < m; ++j)
    for (std::size_t t = 0; t < spec.terms.size(); ++t) {
      const auto& term = spec.terms[t];
      const double lhs = sigma[j][t] - k[j] * sigma[r][t];
      const double rhs = -0.5 * (term.beta(j) - k[j] * term.beta(r));
      out.sigma_table = std::max(out.sigma_table, std::abs(lhs - rhs));
    }
  return out;
}

PohozaevResult pohozaev_check(const SystemSpec& spec, const Spectral& spectral, const BoundState& bs) {
  (void)spectral;
  PohozaevResult out;
  double kinetic = 0.0, potential = 0.0, scale = 0.0;
  for (double g : bs.gradient_integrals) kinetic += 0.5 * g;
  out.critical = !spec.terms.empty();
  for (std::size_t t = 0; t < spec.terms.size(); ++t) {
    const int alpha = spec.terms[t].alpha();
    potential += 0.5 * bs.term_integrals[t];
    scale += 0.5 * std::abs(bs.term_integrals[t]);
    out.predicted += 0.125 * (4.0 - spec.dimension * (alpha - 2.0)) * bs.term_integrals[t];
    if (spec.dimension * (alpha - 2) != 4) out.critical = false;
  }
  out.hamiltonian = kinetic + potential;
  scale += kinetic;
  out.residual = scale == 0.0 ? 0.0 : std::abs(out.hamiltonian - out.predicted) / scale;
  double mass = 0.0;
  for (int j = 0; j < spec.components; ++j) mass += 0.5 * spec.mass_weight(j) * bs.mass_integrals[j];
  out.critical_ratio = mass == 0.0 ? 0.0 : std::abs(out.hamiltonian) / mass;
  return out;
}

double cazenave_residual(int dimension, double omega, double a, double l2, double l3) {
  return relative_gap(l2, a * (6.0 - dimension) / (6.0 * omega) * l3);
}

}  // namespace mtl
