#include <doctest.h>

#include <random>

#include "mtl/criterion.hpp"
#include "mtl/linalg.hpp"

using namespace mtl;

namespace {

// Independent cofactor expansion.
double cofactor_det(const std::vector<std::vector<double>>& a) {
  const std::size_t n = a.size();
  if (n == 1) return a[0][0];
  double d = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::vector<std::vector<double>> minor;
    for (std::size_t r = 1; r < n; ++r) {
      std::vector<double> row;
      for (std::size_t k = 0; k < n; ++k)
        if (k != c) row.push_back(a[r][k]);
      minor.push_back(row);
    }
    d += (c % 2 ? -1.0 : 1.0) * a[0][c] * cofactor_det(minor);
  }
  return d;
}

}  // namespace

TEST_CASE("eigenvalues of small matrices") {
  const auto id = eigen_symmetric(Matrix::identity(3));
  for (double v : id.values) CHECK(v == doctest::Approx(1.0));
  Matrix swap(2);
  swap(0, 1) = swap(1, 0) = 1.0;
  const auto e = eigen_symmetric(swap);
  CHECK(e.values[0] == doctest::Approx(-1.0));
  CHECK(e.values[1] == doctest::Approx(1.0));
}

TEST_CASE("random symmetric 4x4 against the characteristic polynomial") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix m(4);
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j) m(i, j) = m(j, i) = u(rng);
    const auto e = eigen_symmetric(m);
    for (int k = 0; k < 4; ++k) {
      std::vector<std::vector<double>> shifted(4, std::vector<double>(4));
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) shifted[i][j] = m(i, j) - (i == j ? e.values[k] : 0.0);
      CHECK(std::abs(cofactor_det(shifted)) <= 1e-10);
      // A v = lambda v
      for (int i = 0; i < 4; ++i) {
        double av = 0.0;
        for (int j = 0; j < 4; ++j) av += m(i, j) * e.vectors[k][j];
        CHECK(av == doctest::Approx(e.values[k] * e.vectors[k][i]).epsilon(1e-10));
      }
    }
    CHECK(e.values[0] <= e.values[1]);
    std::vector<std::vector<double>> rows(4, std::vector<double>(4));
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) rows[i][j] = m(i, j);
    CHECK(determinant(m) == doctest::Approx(cofactor_det(rows)).epsilon(1e-10));
  }
}

TEST_CASE("dense solve") {
  Matrix m(3);
  m(0, 0) = 2; m(0, 1) = 1; m(1, 0) = 1; m(1, 1) = 3; m(2, 2) = 4; m(0, 2) = 1;
  const auto x = solve_dense(m, {4, 7, 8});
  CHECK(2 * x[0] + x[1] + x[2] == doctest::Approx(4));
  CHECK(x[0] + 3 * x[1] == doctest::Approx(7));
  CHECK(4 * x[2] == doctest::Approx(8));
  CHECK_THROWS(solve_dense(Matrix(2), {1, 1}));
}
