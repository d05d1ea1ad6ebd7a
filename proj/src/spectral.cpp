#include "mtl/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

#include "mtl/error.hpp"

namespace mtl {

namespace {

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }
fftw_complex* as_fftw(const Complex* p) { return reinterpret_cast<fftw_complex*>(const_cast<Complex*>(p)); }

}  // namespace

struct Spectral::Plans {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  ~Plans() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
  }
};

Spectral::Spectral(const Grid& grid) : grid_(grid), plans_(std::make_unique<Plans>()) {
  grid_.validate();
  const std::size_t n = grid_.size();
  const int N = grid_.points;
  kline_.resize(N);
  for (int i = 0; i < N; ++i) kline_[i] = (i == N / 2) ? 0.0 : grid_.wavenumber(i);
  k2_.assign(n, 0.0);
  for (std::size_t f = 0; f < n; ++f) {
    double s = 0.0;
    for (int a = 0; a < grid_.dimension; ++a) {
      const double k = grid_.wavenumber(grid_.axis_index(f, a));
      s += k * k;
    }
    k2_[f] = s;
  }

  std::array<int, 3> dims{N, N, N};
  ComplexField scratch_in(n), scratch_out(n);
  std::lock_guard<std::mutex> lock(planner_mutex());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  plans_->fwd = fftw_plan_dft(grid_.dimension, dims.data(), as_fftw(scratch_in.data()),
                              as_fftw(scratch_out.data()), FFTW_FORWARD, flags);
  plans_->bwd = fftw_plan_dft(grid_.dimension, dims.data(), as_fftw(scratch_in.data()),
                              as_fftw(scratch_out.data()), FFTW_BACKWARD, flags);
  if (!plans_->fwd || !plans_->bwd) throw Error("FFTW planning failed");
}

Spectral::~Spectral() = default;
Spectral::Spectral(Spectral&&) noexcept = default;
Spectral& Spectral::operator=(Spectral&&) noexcept = default;

void Spectral::forward(std::span<const Complex> in, std::span<Complex> out) const {
  fftw_execute_dft(plans_->fwd, as_fftw(in.data()), as_fftw(out.data()));
}

void Spectral::backward(std::span<const Complex> in, std::span<Complex> out) const {
  fftw_execute_dft(plans_->bwd, as_fftw(in.data()), as_fftw(out.data()));
  const double scale = 1.0 / static_cast<double>(grid_.size());
  for (auto& z : out) z *= scale;
}

ComplexField Spectral::forward(std::span<const Complex> in) const {
  ComplexField out(in.size());
  forward(in, out);
  return out;
}

ComplexField Spectral::forward(std::span<const double> in) const {
  ComplexField tmp = to_complex(in);
  ComplexField out(in.size());
  forward(tmp, out);
  return out;
}

ComplexField Spectral::backward(std::span<const Complex> in) const {
  ComplexField out(in.size());
  backward(in, out);
  return out;
}

double Spectral::k_axis(std::size_t flat, int axis) const {
  return kline_[grid_.axis_index(flat, axis)];
}

ComplexField Spectral::laplacian(std::span<const Complex> u) const {
  ComplexField spec = forward(u);
  for (std::size_t f = 0; f < spec.size(); ++f) spec[f] *= -k2_[f];
  return backward(spec);
}

RealField Spectral::laplacian(std::span<const double> u) const {
  ComplexField spec = forward(u);
  for (std::size_t f = 0; f < spec.size(); ++f) spec[f] *= -k2_[f];
  return real_part(backward(spec));
}

ComplexField Spectral::derivative(std::span<const Complex> u, int axis) const {
  ComplexField spec = forward(u);
  for (std::size_t f = 0; f < spec.size(); ++f) spec[f] *= Complex(0.0, k_axis(f, axis));
  return backward(spec);
}

RealField Spectral::derivative(std::span<const double> u, int axis) const {
  ComplexField spec = forward(u);
  for (std::size_t f = 0; f < spec.size(); ++f) spec[f] *= Complex(0.0, k_axis(f, axis));
  return real_part(backward(spec));
}

ComplexField Spectral::x_dot_grad(std::span<const Complex> u) const {
  ComplexField out(u.size(), Complex(0.0));
  for (int a = 0; a < grid_.dimension; ++a) {
    ComplexField du = derivative(u, a);
    for (std::size_t f = 0; f < u.size(); ++f) out[f] += grid_.coordinate(grid_.axis_index(f, a)) * du[f];
  }
  return out;
}

RealField Spectral::x_dot_grad(std::span<const double> u) const {
  RealField out(u.size(), 0.0);
  for (int a = 0; a < grid_.dimension; ++a) {
    RealField du = derivative(u, a);
    for (std::size_t f = 0; f < u.size(); ++f) out[f] += grid_.coordinate(grid_.axis_index(f, a)) * du[f];
  }
  return out;
}

double Spectral::integrate(std::span<const double> f) const {
  double s = 0.0;
  for (double v : f) s += v;
  return s * grid_.cell_volume();
}

double Spectral::l2_norm_squared(std::span<const Complex> u) const {
  double s = 0.0;
  for (const auto& z : u) s += std::norm(z);
  return s * grid_.cell_volume();
}

double Spectral::l2_norm_squared(std::span<const double> u) const {
  double s = 0.0;
  for (double v : u) s += v * v;
  return s * grid_.cell_volume();
}

double Spectral::gradient_norm_squared(std::span<const Complex> u) const {
  ComplexField spec = forward(u);
  double s = 0.0;
  for (std::size_t f = 0; f < spec.size(); ++f) s += k2_[f] * std::norm(spec[f]);
  return s * grid_.cell_volume() / static_cast<double>(grid_.size());
}

double Spectral::gradient_norm_squared(std::span<const double> u) const {
  return gradient_norm_squared(to_complex(u));
}

ComplexField Spectral::translate(std::span<const Complex> u, const std::array<double, 3>& shift) const {
  ComplexField spec = forward(u);
  for (std::size_t f = 0; f < spec.size(); ++f) {
    double phase = 0.0;
    for (int a = 0; a < grid_.dimension; ++a) phase += grid_.wavenumber(grid_.axis_index(f, a)) * shift[a];
    spec[f] *= std::polar(1.0, phase);
  }
  // The Nyquist bin of a real field must stay real; use the symmetric
  // cosine interpolant there.
  const int N = grid_.points;
  for (std::size_t f = 0; f < spec.size(); ++f) {
    bool nyquist = false;
    for (int a = 0; a < grid_.dimension; ++a) nyquist |= grid_.axis_index(f, a) == N / 2;
    if (!nyquist) continue;
    double phase = 0.0;
    for (int a = 0; a < grid_.dimension; ++a) phase += grid_.wavenumber(grid_.axis_index(f, a)) * shift[a];
    spec[f] *= std::cos(phase) / std::polar(1.0, phase);
  }
  return backward(spec);
}

ComplexField Spectral::rescale(std::span<const Complex> u, double scale) const {
  const int N = grid_.points;
  const int d = grid_.dimension;
  const double L = grid_.half_width;
  ComplexField work = forward(u);
  ComplexField next(work.size());
  ComplexField row(N);
  const double inv_n = 1.0 / N;
  // Resample one axis at a time: spectral index along `axis` becomes the
  // physical index of the rescaled field.
  for (int axis = 0; axis < d; ++axis) {
    const std::size_t stride = grid_.stride(axis);
    const std::size_t block = stride * static_cast<std::size_t>(N);
    for (int i = 0; i < N; ++i) {
      const double x = scale * grid_.coordinate(i) + L;
      for (int n = 0; n < N; ++n) {
        const double k = grid_.wavenumber(n);
        row[n] = (n == N / 2) ? Complex(std::cos(k * x) * inv_n, 0.0) : std::polar(inv_n, k * x);
      }
      for (std::size_t outer = 0; outer < work.size(); outer += block) {
        for (std::size_t inner = 0; inner < stride; ++inner) {
          Complex acc(0.0);
          const Complex* line = work.data() + outer + inner;
          for (int n = 0; n < N; ++n) acc += row[n] * line[n * stride];
          next[outer + inner + static_cast<std::size_t>(i) * stride] = acc;
        }
      }
    }
    work.swap(next);
  }
  return work;
}

RealField Spectral::rescale(std::span<const double> u, double scale) const {
  return real_part(rescale(to_complex(u), scale));
}

ComplexField to_complex(std::span<const double> u) {
  ComplexField out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = Complex(u[i], 0.0);
  return out;
}

RealField real_part(std::span<const Complex> u) {
  RealField out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i].real();
  return out;
}

}  // namespace mtl
