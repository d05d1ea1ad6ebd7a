#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

namespace mtl {

using Complex = std::complex<double>;
using RealField = std::vector<double>;
using ComplexField = std::vector<Complex>;

/// Isotropic periodic box [-L, L)^d sampled with N points per axis.
///
/// Samples are stored row-major with axis 0 slowest: for d = 3 the flat
/// index of (i0, i1, i2) is (i0 * N + i1) * N + i2.
struct Grid {
  int dimension = 1;
  double half_width = 1.0;
  int points = 16;

  double spacing() const { return 2.0 * half_width / points; }
  double cell_volume() const;
  std::size_t size() const;
  std::size_t stride(int axis) const;

  double coordinate(int index) const { return -half_width + index * spacing(); }
  /// Angular wavenumber of FFT bin `index` (bins >= N/2 are negative).
  double wavenumber(int index) const;
  int axis_index(std::size_t flat, int axis) const {
    return static_cast<int>((flat / stride(axis)) % static_cast<std::size_t>(points));
  }
  std::array<double, 3> position(std::size_t flat) const;
  double radius_squared(std::size_t flat) const;

  /// Throws PreconditionError unless 1 <= d <= 3, L > 0, N a power of two >= 16.
  void validate() const;

  friend bool operator==(const Grid&, const Grid&) = default;
};

}  // namespace mtl
