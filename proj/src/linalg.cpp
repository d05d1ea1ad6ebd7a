#include "mtl/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mtl/error.hpp"

namespace mtl {

Matrix Matrix::identity(int size) {
  Matrix m(size);
  for (int i = 0; i < size; ++i) m(i, i) = 1.0;
  return m;
}

double Matrix::frobenius() const {
  double s = 0.0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

double Matrix::quadratic_form(const std::vector<double>& v) const {
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s += v[i] * (*this)(i, j) * v[j];
  return s;
}

EigenDecomposition eigen_symmetric(const Matrix& input) {
  const int n = input.n;
  Matrix a(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = 0.5 * (input(i, j) + input(j, i));
  Matrix v = Matrix::identity(n);
  const double norm = a.frobenius();

  auto off = [&] {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  EigenDecomposition out;
  while (norm > 0.0 && off() > 1e-14 * norm && out.sweeps < 100) {
    ++out.sweeps;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int x, int y) { return a(x, x) < a(y, y); });
  for (int idx : order) {
    out.values.push_back(a(idx, idx));
    std::vector<double> vec(n);
    for (int k = 0; k < n; ++k) vec[k] = v(k, idx);
    // Deterministic sign: largest-magnitude entry positive.
    int big = 0;
    for (int k = 1; k < n; ++k)
      if (std::abs(vec[k]) > std::abs(vec[big])) big = k;
    if (vec[big] < 0.0)
      for (double& x : vec) x = -x;
    out.vectors.push_back(std::move(vec));
  }
  return out;
}

std::vector<double> solve_dense(Matrix m, std::vector<double> rhs) {
  const int n = m.n;
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(m(r, col)) > std::abs(m(pivot, col))) pivot = r;
    if (m(pivot, col) == 0.0) throw Error("singular linear system");
    if (pivot != col) {
      for (int k = 0; k < n; ++k) std::swap(m(col, k), m(pivot, k));
      std::swap(rhs[col], rhs[pivot]);
    }
    for (int r = col + 1; r < n; ++r) {
      const double f = m(r, col) / m(col, col);
      if (f == 0.0) continue;
      for (int k = col; k < n; ++k) m(r, k) -= f * m(col, k);
      rhs[r] -= f * rhs[col];
    }
  }
  std::vector<double> x(n);
  for (int i = n - 1; i >= 0; --i) {
    double s = rhs[i];
    for (int k = i + 1; k < n; ++k) s -= m(i, k) * x[k];
    x[i] = s / m(i, i);
  }
  return x;
}

}  // namespace mtl
