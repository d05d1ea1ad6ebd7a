#pragma once

#include <vector>

namespace mtl {

/// Dense row-major square matrix, sized for the m x m criterion matrices.
struct Matrix {
  int n = 0;
  std::vector<double> a;

  Matrix() = default;
  explicit Matrix(int size) : n(size), a(static_cast<std::size_t>(size) * size, 0.0) {}
  static Matrix identity(int size);

  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
  double frobenius() const;
  double quadratic_form(const std::vector<double>& v) const;
};

struct EigenDecomposition {
  std::vector<double> values;                 // ascending
  std::vector<std::vector<double>> vectors;   // vectors[i] pairs with values[i]
  int sweeps = 0;
};

/// Cyclic Jacobi rotations until the off-diagonal mass is below
/// 1e-14 * ||A||_F. The input is symmetrized first.
EigenDecomposition eigen_symmetric(const Matrix& m);

/// Gaussian elimination with partial pivoting. Throws Error when singular.
std::vector<double> solve_dense(Matrix m, std::vector<double> rhs);

}  // namespace mtl
