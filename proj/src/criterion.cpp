#include "mtl/criterion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mtl/error.hpp"

namespace mtl {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

bool close_rel(double a, double b, double tol = 1e-12) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

double critical_degree(int d) { return 2.0 + 4.0 / d; }

bool is_critical_term(int d, const MonomialTerm& t) { return d * (t.alpha() - 2) == 4; }

double total_mass_integral(const BoundState& bs) {
  double s = 0.0;
  for (double v : bs.mass_integrals) s += v;
  return s;
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Unstable: return "UNSTABLE";
    case Verdict::Inconclusive: return "INCONCLUSIVE";
    case Verdict::Degenerate: return "DEGENERATE";
  }
  return "INCONCLUSIVE";
}

Matrix assemble_matrix(const SystemSpec& spec, const std::vector<double>& k, const std::vector<double>& integrals,
                       int reference) {
  const int m = spec.components;
  const double d = spec.dimension;
  std::vector<int> idx;
  for (int j = 0; j < m; ++j)
    if (j != reference) idx.push_back(j);
  Matrix a(m);
  for (std::size_t t = 0; t < spec.terms.size(); ++t) {
    const auto& term = spec.terms[t];
    const double n = integrals[t];
    const double alpha = term.alpha();
    const double bm = term.beta(reference);
    a(0, 0) += 0.5 * d * (alpha / 2.0 - 1.0) * (d * alpha / 2.0 - d - 2.0) * n;
    for (int r = 0; r < m - 1; ++r) {
      const int j = idx[r];
      const double bj = term.beta(j);
      a(0, r + 1) += (d * alpha / 4.0 - d / 2.0 - 1.0) * (bj - k[j] * bm) * n;
      for (int c = r; c < m - 1; ++c) {
        const int i = idx[c];
        const double bi = term.beta(i);
        if (i == j) {
          a(r + 1, c + 1) += (0.5 * k[j] * k[j] * bm * (bm - 2.0) + 0.5 * bj * (bj - 2.0) - k[j] * bj * bm) * n;
        } else {
          a(r + 1, c + 1) += 0.5 * (k[i] * k[j] * bm * (bm - 2.0) + bi * bj - bm * (k[i] * bj + k[j] * bi)) * n;
        }
      }
    }
  }
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < r; ++c) a(r, c) = a(c, r);
  return a;
}

std::vector<double> compute_k_ratios(const SystemSpec& spec, const BoundState& bs, int* reference) {
  double total = total_mass_integral(bs);
  if (!(total > 0.0)) throw PreconditionError("all components vanish (degenerate)");
  const int r = reference_component(bs);
  if (reference) *reference = r;
  return k_ratios_for(spec, bs, r);
}

Matrix assemble_matrix(const SystemSpec& spec, const BoundState& bs) {
  int r = 0;
  const auto k = compute_k_ratios(spec, bs, &r);
  return assemble_matrix(spec, k, bs.term_integrals, r);
}

double determinant(const Matrix& input) {
  Matrix m = input;
  const int n = m.n;
  double det = 1.0;
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(m(r, col)) > std::abs(m(pivot, col))) pivot = r;
    if (m(pivot, col) == 0.0) return 0.0;
    if (pivot != col) {
      for (int k = 0; k < n; ++k) std::swap(m(col, k), m(pivot, k));
      det = -det;
    }
    det *= m(col, col);
    for (int r = col + 1; r < n; ++r) {
      const double f = m(r, col) / m(col, col);
      for (int k = col; k < n; ++k) m(r, k) -= f * m(col, k);
    }
  }
  return det;
}

Direction direction_from_vector(const InstabilityReport& report, const std::vector<double>& v) {
  const int m = static_cast<int>(report.k_ratios.size());
  Direction dir;
  dir.lambda_prime = v[0];
  dir.gamma_prime.assign(m, 0.0);
  double closure = 0.0;
  for (int r = 0; r < m - 1; ++r) {
    const int j = report.order[r];
    dir.gamma_prime[j] = v[r + 1];
    closure -= report.k_ratios[j] * v[r + 1];
  }
  dir.gamma_prime[report.reference] = closure;
  return dir;
}

std::vector<double> vector_from_direction(const InstabilityReport& report, const Direction& dir) {
  const int m = static_cast<int>(report.k_ratios.size());
  std::vector<double> v(m);
  v[0] = dir.lambda_prime;
  for (int r = 0; r < m - 1; ++r) v[r + 1] = dir.gamma_prime[report.order[r]];
  return v;
}

StructuralVerdict check_supercritical(const SystemSpec& spec) {
  StructuralVerdict out;
  out.check = "supercritical";
  const int d = spec.dimension;
  const double crit = critical_degree(d);
  std::vector<int> degrees;
  for (const auto& t : spec.terms)
    if (t.alpha() > 2) degrees.push_back(t.alpha());
  std::sort(degrees.begin(), degrees.end());
  degrees.erase(std::unique(degrees.begin(), degrees.end()), degrees.end());

  // Candidate splitting degrees p > 2 + 4/d; p above every degree puts all
  // terms in the lower group.
  std::vector<double> candidates;
  for (int deg : degrees)
    if (deg > crit + 1e-12) candidates.push_back(deg);
  const double top = std::max(crit, degrees.empty() ? crit : static_cast<double>(degrees.back())) + 0.5;
  candidates.push_back(top);

  std::string first_failure;
  for (double p : candidates) {
    std::string failure;
    for (std::size_t k = 0; k < spec.terms.size() && failure.empty(); ++k) {
      const auto& t = spec.terms[k];
      const int a = t.alpha();
      if (a == 2 || a == p) continue;
      const bool lower = a < p;
      if (!t.is_modulus_only()) {
        failure = "term " + std::to_string(k + 1) + " (degree " + std::to_string(a) +
                  ") is sign-indefinite but must be " + (lower ? "nonnegative" : "nonpositive") + " for p = " + fmt(p);
      } else if (lower && t.coefficient < 0.0) {
        failure = "term " + std::to_string(k + 1) + " (degree " + std::to_string(a) + ") is negative below p = " + fmt(p);
      } else if (!lower && t.coefficient > 0.0) {
        failure = "term " + std::to_string(k + 1) + " (degree " + std::to_string(a) + ") is positive above p = " + fmt(p);
      }
    }
    if (failure.empty()) {
      out.applies = true;
      out.reason = "decomposition with p = " + fmt(p) + " > 2 + 4/d = " + fmt(crit);
      out.inputs = {{"p", p}, {"critical_degree", crit}};
      return out;
    }
    if (first_failure.empty()) first_failure = failure;
  }
  out.reason = first_failure;
  out.inputs = {{"critical_degree", crit}};
  return out;
}

std::vector<StructuralVerdict> check_critical_I(const SystemSpec& spec, const BoundState* bs) {
  std::vector<StructuralVerdict> out;
  const int m = spec.components;
  const int d = spec.dimension;
  std::vector<double> c(m, 0.0);
  std::string failure;
  for (std::size_t k = 0; k < spec.terms.size(); ++k) {
    const auto& t = spec.terms[k];
    if (t.alpha() == 2) {
      auto j = t.diagonal_quadratic_component();
      if (!j) {
        failure = "quadratic term " + std::to_string(k + 1) + " is not of the form c_j |u_j|^2";
        break;
      }
      c[*j] += t.coefficient;
    } else if (!is_critical_term(d, t)) {
      failure = "term " + std::to_string(k + 1) + " has degree " + std::to_string(t.alpha()) +
                ", not the critical degree 2 + 4/d = " + fmt(critical_degree(d));
      break;
    }
  }
  if (!failure.empty()) {
    StructuralVerdict v;
    v.check = "critical_I";
    v.reason = failure;
    out.push_back(v);
    return out;
  }
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      StructuralVerdict v;
      v.check = "critical_I";
      v.pair = {i, j};
      const double lhs = c[i] * spec.mass_weight(j);
      const double rhs = c[j] * spec.mass_weight(i);
      v.inputs = {{"c_first", c[i]}, {"c_last", c[j]}, {"c_first_weight_last", lhs}, {"c_last_weight_first", rhs}};
      if (close_rel(lhs, rhs)) {
        v.reason = "coefficient condition fails: c_" + spec.label(i) + " lambda omega_" + spec.label(j) +
                   " equals c_" + spec.label(j) + " lambda omega_" + spec.label(i);
        out.push_back(v);
        continue;
      }
      if (bs) {
        const double total = total_mass_integral(*bs);
        const double tol = 1e-12 * std::max(1.0, total);
        if (bs->mass_integrals[i] <= tol || bs->mass_integrals[j] <= tol) {
          v.reason = "a named component of the bound state vanishes";
          out.push_back(v);
          continue;
        }
        const auto k = k_ratios_for(spec, *bs, j);
        const Matrix a = assemble_matrix(spec, k, bs->term_integrals, j);
        // Row of gamma'_i in the matrix ordered without j.
        int row = 1;
        for (int l = 0; l < m; ++l) {
          if (l == j) continue;
          if (l == i) break;
          ++row;
        }
        const double a00 = a(0, 0), a01 = a(0, row), a11 = a(row, row);
        v.inputs.push_back({"a00", a00});
        v.inputs.push_back({"a01", a01});
        v.inputs.push_back({"a11", a11});
        v.inputs.push_back({"minor_determinant", a00 * a11 - a01 * a01});
        v.reason = "critical quadratic coupling imbalance; principal minor determinant " + fmt(a00 * a11 - a01 * a01);
      } else {
        v.reason = "critical quadratic coupling imbalance (bound state with nonzero " + spec.label(i) + ", " +
                   spec.label(j) + " assumed)";
      }
      v.applies = true;
      out.push_back(v);
    }
  return out;
}

std::vector<StructuralVerdict> check_critical_II(const SystemSpec& spec, const BoundState* bs) {
  std::vector<StructuralVerdict> out;
  const int d = spec.dimension;
  std::string failure;
  std::optional<std::pair<int, int>> cross;
  double coupling = 0.0;
  for (std::size_t k = 0; k < spec.terms.size(); ++k) {
    const auto& t = spec.terms[k];
    if (t.alpha() == 2) {
      std::vector<int> p, q;
      for (int j = 0; j < spec.components; ++j) {
        if (t.exponents[j].first == 1) p.push_back(j);
        if (t.exponents[j].second == 1) q.push_back(j);
      }
      if (p.size() != 1 || q.size() != 1 || p[0] == q[0]) {
        failure = "quadratic term " + std::to_string(k + 1) + " is not a cross term Re(u_i conj(u_j))";
        break;
      }
      auto pr = std::minmax(p[0], q[0]);
      if (cross && *cross != std::pair<int, int>(pr.first, pr.second)) {
        failure = "more than one quadratic cross term";
        break;
      }
      cross = std::pair<int, int>(pr.first, pr.second);
      coupling += t.coefficient;
    } else if (!is_critical_term(d, t)) {
      failure = "term " + std::to_string(k + 1) + " has degree " + std::to_string(t.alpha()) +
                ", not the critical degree 2 + 4/d = " + fmt(critical_degree(d));
      break;
    }
  }
  if (failure.empty() && !cross) failure = "no quadratic cross term";
  if (failure.empty() && coupling == 0.0) failure = "cross-term coefficient vanishes";
  if (!failure.empty()) {
    StructuralVerdict v;
    v.check = "critical_II";
    v.reason = failure;
    out.push_back(v);
    return out;
  }
  for (auto [i, j] : {*cross, std::pair<int, int>(cross->second, cross->first)}) {
    StructuralVerdict v;
    v.check = "critical_II";
    v.pair = {i, j};
    v.inputs = {{"coupling", coupling}};
    if (!bs) {
      v.reason = "needs a bound state to test the mass gap and overlap";
      out.push_back(v);
      continue;
    }
    const double mi = spec.mass_weight(i) * bs->mass_integrals[i];
    const double mj = spec.mass_weight(j) * bs->mass_integrals[j];
    double overlap = 0.0;
    for (std::size_t x = 0; x < bs->profiles[i].size(); ++x) overlap += bs->profiles[i][x] * bs->profiles[j][x];
    overlap *= bs->grid.cell_volume();
    const double gap = relative_gap(mi, mj) * 2.0;
    const double norm = std::sqrt(bs->mass_integrals[i] * bs->mass_integrals[j]);
    const double rel_overlap = norm > 0.0 ? std::abs(overlap) / norm : 0.0;
    v.inputs.push_back({"weighted_mass_first", mi});
    v.inputs.push_back({"weighted_mass_last", mj});
    v.inputs.push_back({"relative_mass_gap", gap});
    v.inputs.push_back({"overlap", overlap});
    v.inputs.push_back({"gap_tolerance", 1e-6});
    v.inputs.push_back({"overlap_tolerance", 1e-6});
    if (gap <= 1e-6) {
      v.reason = "weighted masses agree within tolerance";
    } else if (rel_overlap <= 1e-6) {
      v.reason = "overlap integral vanishes within tolerance";
    } else {
      v.applies = true;
      v.reason = "cross coupling with unequal weighted masses and nonzero overlap";
    }
    out.push_back(v);
  }
  return out;
}

InstabilityReport verdict(const SystemSpec& spec, const BoundState& bs, const VerdictOptions& options) {
  if (!bs.certified())
    throw PreconditionError("bound state is not certified: residual " + fmt(bs.max_residual()) + " exceeds " +
                            fmt(bs.certification_threshold));
  InstabilityReport rep;
  const int m = spec.components;
  if (!(total_mass_integral(bs) > 0.0)) {
    rep.reference = m - 1;
    rep.k_ratios.assign(m, 0.0);
    for (int j = 0; j < m; ++j) rep.order.push_back(j);
    rep.matrix = Matrix(m);
    rep.eigen = eigen_symmetric(rep.matrix);
    rep.min_eigenvalue = 0.0;
    rep.tolerance = options.floor;
    rep.verdict = Verdict::Degenerate;
    return rep;
  }
  rep.k_ratios = compute_k_ratios(spec, bs, &rep.reference);
  for (int j = 0; j < m; ++j)
    if (j != rep.reference) rep.order.push_back(j);
  rep.order.push_back(rep.reference);
  rep.matrix = assemble_matrix(spec, rep.k_ratios, bs.term_integrals, rep.reference);
  rep.eigen = eigen_symmetric(rep.matrix);
  rep.min_eigenvalue = rep.eigen.values.front();
  rep.determinant = determinant(rep.matrix);
  rep.tolerance = std::max(options.floor, options.relative * rep.matrix.frobenius());

  double noise = 1e-13 * std::max(1.0, total_mass_integral(bs));
  bool degenerate = true;
  for (double n : bs.term_integrals) degenerate &= std::abs(n) <= noise;
  if (degenerate || rep.matrix.frobenius() == 0.0) {
    rep.verdict = Verdict::Degenerate;
  } else if (rep.min_eigenvalue < -rep.tolerance) {
    rep.verdict = Verdict::Unstable;
    rep.direction = direction_from_vector(rep, rep.eigen.vectors.front());
  } else {
    rep.verdict = Verdict::Inconclusive;
  }

  rep.structural.push_back(check_supercritical(spec));
  for (auto& v : check_critical_I(spec, &bs)) rep.structural.push_back(std::move(v));
  for (auto& v : check_critical_II(spec, &bs)) rep.structural.push_back(std::move(v));
  return rep;
}

FieldState gamma_curve(const SystemSpec& spec, const Spectral& spectral, const BoundState& bs, int reference,
                       const Direction& dir, double t) {
  const int m = spec.components;
  const int d = spec.dimension;
  const double lam = 1.0 + dir.lambda_prime * t;
  if (!(lam > 0.0)) throw PreconditionError("scaling factor 1 + lambda' t must stay positive");
  const double amp = std::pow(lam, 0.5 * d);
  FieldState out;
  out.grid = bs.grid;
  std::vector<RealField> scaled(m);
  std::vector<double> masses(m);
  double mass_q = 0.0;
  for (int j = 0; j < m; ++j) {
    scaled[j] = t == 0.0 || dir.lambda_prime == 0.0 ? bs.profiles[j] : spectral.rescale(bs.profiles[j], lam);
    for (double& v : scaled[j]) v *= amp;
    masses[j] = spectral.l2_norm_squared(scaled[j]);
    mass_q += spec.mass_weight(j) * bs.mass_integrals[j];
  }
  double rest = 0.0;
  std::vector<double> gamma(m, 1.0);
  for (int j = 0; j < m; ++j) {
    if (j == reference) continue;
    gamma[j] = 1.0 + dir.gamma_prime[j] * t;
    rest += spec.mass_weight(j) * gamma[j] * gamma[j] * masses[j];
  }
  const double radicand = (mass_q - rest) / (spec.mass_weight(reference) * masses[reference]);
  if (!(radicand > 0.0)) {
    const double bound = feasible_amplitude(spec, bs, reference, dir, t > 0 ? 1.0 : -1.0);
    throw PreconditionError("perturbation amplitude too large: mass constraint infeasible (|t0| must stay below " +
                            fmt(bound) + ")");
  }
  gamma[reference] = t == 0.0 ? 1.0 : std::sqrt(radicand);
  for (int j = 0; j < m; ++j) {
    ComplexField f(scaled[j].size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = Complex(gamma[j] * scaled[j][i], 0.0);
    out.fields.push_back(std::move(f));
  }
  return out;
}

double feasible_amplitude(const SystemSpec& spec, const BoundState& bs, int reference, const Direction& dir,
                          double sign) {
  // Radicand w_r + 2 t w_r g_r - t^2 sum_{j != r} w_j g_j^2 along t = sign * s.
  const int m = spec.components;
  const double wr = spec.mass_weight(reference) * bs.mass_integrals[reference];
  double lin = 0.0, quad = 0.0;
  for (int j = 0; j < m; ++j) {
    if (j == reference) continue;
    const double w = spec.mass_weight(j) * bs.mass_integrals[j];
    lin -= 2.0 * w * dir.gamma_prime[j];
    quad += w * dir.gamma_prime[j] * dir.gamma_prime[j];
  }
  lin *= sign;
  double bound = std::numeric_limits<double>::infinity();
  if (quad > 0.0) {
    bound = (lin + std::sqrt(lin * lin + 4.0 * quad * wr)) / (2.0 * quad);
  } else if (lin < 0.0) {
    bound = wr / -lin;
  }
  if (sign * dir.lambda_prime < 0.0) bound = std::min(bound, 1.0 / std::abs(dir.lambda_prime));
  return bound;
}

double hamiltonian_second_derivative(const SystemSpec& spec, const Spectral& spectral, const BoundState& bs,
                                     int reference, const Direction& dir, double h) {
  auto H = [&](double t) { return hamiltonian(spec, spectral, gamma_curve(spec, spectral, bs, reference, dir, t)).total; };
  const double h0 = H(0.0);
  auto central = [&](double s) { return (H(s) - 2.0 * h0 + H(-s)) / (s * s); };
  return (4.0 * central(0.5 * h) - central(h)) / 3.0;
}

DirectionField direction_field(const SystemSpec& spec, const Spectral& spectral, const BoundState& bs,
                               const InstabilityReport& report, const Direction& dir) {
  const int m = spec.components;
  const int d = spec.dimension;
  DirectionField out;
  double tangency = 0.0, scale = 0.0;
  for (int j = 0; j < m; ++j) {
    const RealField xg = spectral.x_dot_grad(std::span<const double>(bs.profiles[j]));
    RealField psi(bs.profiles[j].size());
    double overlap = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
      psi[i] = dir.gamma_prime[j] * bs.profiles[j][i] + dir.lambda_prime * (0.5 * d * bs.profiles[j][i] + xg[i]);
      overlap += bs.profiles[j][i] * psi[i];
    }
    overlap *= bs.grid.cell_volume();
    tangency += spec.mass_weight(j) * overlap;
    scale += spec.mass_weight(j) * std::sqrt(bs.mass_integrals[j] * spectral.l2_norm_squared(psi));
    out.psi.push_back(std::move(psi));
  }
  out.mass_tangency = scale > 0.0 ? std::abs(tangency) / scale : 0.0;
  out.quadratic_form = report.matrix.quadratic_form(vector_from_direction(report, dir));
  out.finite_difference = hamiltonian_second_derivative(spec, spectral, bs, report.reference, dir);
  return out;
}

DirectionField unstable_direction_field(const SystemSpec& spec, const Spectral& spectral, const BoundState& bs,
                                        const InstabilityReport& report) {
  if (report.verdict != Verdict::Unstable || !report.direction)
    throw PreconditionError("no unstable direction: verdict is " + to_string(report.verdict));
  return direction_field(spec, spectral, bs, report, *report.direction);
}

SweepResult sweep_parameter(const SweepEvaluator& eval, double lo, double hi, int steps, double width) {
  SweepResult out;
  auto safe = [&](double p) {
    try {
      SweepPoint pt = eval(p);
      pt.parameter = p;
      return pt;
    } catch (const std::exception& e) {
      SweepPoint pt;
      pt.parameter = p;
      pt.missing = true;
      pt.error = e.what();
      return pt;
    }
  };
  if (steps <= 1 || lo == hi) {
    out.points.push_back(safe(lo));
    return out;
  }
  for (int i = 0; i < steps; ++i) out.points.push_back(safe(lo + (hi - lo) * i / (steps - 1)));
  for (std::size_t i = 0; i + 1 < out.points.size(); ++i) {
    const auto& a = out.points[i];
    const auto& b = out.points[i + 1];
    if (a.missing || b.missing) continue;
    if ((a.min_eigenvalue < 0.0) == (b.min_eigenvalue < 0.0)) continue;
    double x0 = a.parameter, x1 = b.parameter;
    const bool neg0 = a.min_eigenvalue < 0.0;
    std::vector<SweepPoint> extra;
    bool failed = false;
    while (x1 - x0 > width) {
      const double mid = 0.5 * (x0 + x1);
      SweepPoint pt = safe(mid);
      extra.push_back(pt);
      if (pt.missing) {
        failed = true;
        break;
      }
      if ((pt.min_eigenvalue < 0.0) == neg0)
        x0 = mid;
      else
        x1 = mid;
    }
    for (auto& pt : extra) out.points.push_back(pt);
    if (!failed) {
      out.bracket = std::make_pair(x0, x1);
      out.threshold = 0.5 * (x0 + x1);
    }
    break;
  }
  std::sort(out.points.begin(), out.points.end(),
            [](const SweepPoint& a, const SweepPoint& b) { return a.parameter < b.parameter; });
  return out;
}

Rational quadratic_scaled_determinant(int dimension, const Rational& sigma) {
  // Entries in units of J = int Q1^2 Q2 with k1 = 1/sigma and
  // beta int Q2^2 = (1 - 2 sigma)(6 - d)/12 J.
  const Rational d(dimension);
  const Rational one(1);
  const Rational k = one / sigma;
  const Rational beta_mass = (one - Rational(2) * sigma) * (Rational(6) - d) / Rational(12);
  const Rational a00 = d * (Rational(4) - d) / Rational(8);
  const Rational a01 = Rational(2) * k * beta_mass + (d - Rational(4)) * (k - Rational(2)) / Rational(4);
  const Rational a11 = k / Rational(2) * (k + Rational(4));
  return sigma * sigma * (a00 * a11 - a01 * a01);
}

QuadraticThresholdOracle quadratic_threshold_oracle(int dimension) {
  QuadraticThresholdOracle out;
  out.dimension = dimension;
  // Interpolate the quadratic through sigma = 1, 2, 3.
  const Rational y1 = quadratic_scaled_determinant(dimension, Rational(1));
  const Rational y2 = quadratic_scaled_determinant(dimension, Rational(2));
  const Rational y3 = quadratic_scaled_determinant(dimension, Rational(3));
  const Rational c2 = (y3 - Rational(2) * y2 + y1) / Rational(2);
  const Rational c1 = (y2 - y1) - Rational(3) * c2;
  const Rational c0 = y1 - c1 - c2;
  for (int s = 4; s <= 6; ++s) {
    const Rational sr(s);
    if (!(c0 + c1 * sr + c2 * sr * sr == quadratic_scaled_determinant(dimension, sr)))
      throw Error("scaled determinant is not quadratic in sigma");
  }
  out.coefficients = {c0, c1, c2};
  const double a = c2.value(), b = c1.value(), c = c0.value();
  if (a != 0.0) {
    const double disc = b * b - 4.0 * a * c;
    if (disc >= 0.0) {
      const double r1 = (-b - std::copysign(std::sqrt(disc), b)) / (2.0 * a);
      const double r2 = r1 != 0.0 ? c / (a * r1) : 0.0;
      const double root = std::max(r1, r2);
      if (root > 0.0) out.threshold = root;
    }
  }
  const double d = dimension;
  // 3(4-d)(1+4s) = (1-2s)^2  <=>  4s^2 - (4 + 12(4-d)) s + 1 - 3(4-d) = 0.
  {
    const double A = 4.0, B = -(4.0 + 12.0 * (4.0 - d)), C = 1.0 - 3.0 * (4.0 - d);
    out.statement_candidate = (-B + std::sqrt(B * B - 4.0 * A * C)) / (2.0 * A);
  }
  out.proof_candidate = (1.0 + std::sqrt(std::max(0.0, 3.0 * (4.0 - d)))) / 2.0;
  return out;
}

}  // namespace mtl
