#include "mtl/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mtl/error.hpp"

namespace mtl {

double Grid::cell_volume() const { return std::pow(spacing(), dimension); }

std::size_t Grid::size() const {
  std::size_t n = 1;
  for (int a = 0; a < dimension; ++a) n *= static_cast<std::size_t>(points);
  return n;
}

std::size_t Grid::stride(int axis) const {
  std::size_t s = 1;
  for (int a = axis + 1; a < dimension; ++a) s *= static_cast<std::size_t>(points);
  return s;
}

double Grid::wavenumber(int index) const {
  const int n = index < points / 2 ? index : index - points;
  return std::numbers::pi * n / half_width;
}

std::array<double, 3> Grid::position(std::size_t flat) const {
  std::array<double, 3> x{0.0, 0.0, 0.0};
  for (int a = 0; a < dimension; ++a) x[a] = coordinate(axis_index(flat, a));
  return x;
}

double Grid::radius_squared(std::size_t flat) const {
  double r2 = 0.0;
  for (int a = 0; a < dimension; ++a) {
    const double x = coordinate(axis_index(flat, a));
    r2 += x * x;
  }
  return r2;
}

void Grid::validate() const {
  if (dimension < 1 || dimension > 3)
    throw PreconditionError("grid dimension must be 1, 2 or 3 (got " + std::to_string(dimension) + ")");
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    throw PreconditionError("grid half-width L must be positive");
  if (points < 16 || (points & (points - 1)) != 0)
    throw PreconditionError("grid points N must be a power of two >= 16 (got " + std::to_string(points) + ")");
}

}  // namespace mtl
