#pragma once

#include <array>
#include <memory>
#include <span>

#include "mtl/grid.hpp"

namespace mtl {

/// FFT workspace and spectral differential operators for one Grid.
///
/// Owns FFTW plans, so an instance is not shareable across threads; create
/// one per solver invocation.
class Spectral {
 public:
  explicit Spectral(const Grid& grid);
  ~Spectral();
  Spectral(Spectral&&) noexcept;
  Spectral& operator=(Spectral&&) noexcept;
  Spectral(const Spectral&) = delete;
  Spectral& operator=(const Spectral&) = delete;

  const Grid& grid() const { return grid_; }

  /// Unnormalized forward DFT.
  void forward(std::span<const Complex> in, std::span<Complex> out) const;
  /// Inverse DFT including the 1/N^d factor.
  void backward(std::span<const Complex> in, std::span<Complex> out) const;
  ComplexField forward(std::span<const Complex> in) const;
  ComplexField forward(std::span<const double> in) const;
  ComplexField backward(std::span<const Complex> in) const;

  /// |k|^2 per Fourier bin, flat layout identical to physical fields.
  std::span<const double> k_squared() const { return k2_; }
  /// k along `axis` for Fourier bin `flat`; zero on the Nyquist bin.
  double k_axis(std::size_t flat, int axis) const;

  ComplexField laplacian(std::span<const Complex> u) const;
  RealField laplacian(std::span<const double> u) const;
  ComplexField derivative(std::span<const Complex> u, int axis) const;
  RealField derivative(std::span<const double> u, int axis) const;
  /// x . grad u with the box-centered coordinate.
  RealField x_dot_grad(std::span<const double> u) const;
  ComplexField x_dot_grad(std::span<const Complex> u) const;

  /// Equal-weight periodic quadrature h^d * sum.
  double integrate(std::span<const double> f) const;
  double l2_norm_squared(std::span<const Complex> u) const;
  double l2_norm_squared(std::span<const double> u) const;
  /// Integral of |grad u|^2 computed from Fourier coefficients.
  double gradient_norm_squared(std::span<const Complex> u) const;
  double gradient_norm_squared(std::span<const double> u) const;

  /// Spectral translate: returns v with v(x) = u(x + shift).
  ComplexField translate(std::span<const Complex> u, const std::array<double, 3>& shift) const;
  /// Fourier-interpolated rescale: returns v with v(x) = u(scale * x).
  ComplexField rescale(std::span<const Complex> u, double scale) const;
  RealField rescale(std::span<const double> u, double scale) const;

 private:
  Grid grid_;
  std::vector<double> k2_;
  std::vector<double> kline_;  // per-axis wavenumbers, Nyquist zeroed
  struct Plans;
  std::unique_ptr<Plans> plans_;
};

ComplexField to_complex(std::span<const double> u);
RealField real_part(std::span<const Complex> u);

}  // namespace mtl
