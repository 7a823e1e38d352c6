#include <doctest.h>

#include "shb/linalg.hpp"
#include "shb/rng.hpp"
#include "testutil.hpp"

using namespace shb;

TEST_CASE("jacobi eigenvalues of a 2x2") {
  Matrix S(2, {2.0, 1.0, 1.0, 2.0});
  auto eig = jacobi_eigen(S);
  CHECK(eig.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(eig.eigenvalues[1] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("jacobi reconstructs random symmetric matrices") {
  RngStream rng(99, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + static_cast<int>(rng.uniform() * 6);
    Matrix S(n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) S(i, j) = S(j, i) = 2.0 * rng.uniform() - 1.0;
    auto eig = jacobi_eigen(S);

    // V orthogonal
    Matrix VtV = eig.V.transpose() * eig.V;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        CHECK(std::abs(VtV(i, j) - (i == j ? 1.0 : 0.0)) < 1e-10);

    // V diag V^T == S
    Matrix D = Matrix::diagonal(eig.eigenvalues);
    Matrix R = eig.V * D * eig.V.transpose();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        CHECK(std::abs(R(i, j) - S(i, j)) < 1e-8 * (1.0 + S.frobenius_norm()));
  }
}

TEST_CASE("jacobi rejects asymmetric input") {
  Matrix S(2, {1.0, 0.5, 0.0, 1.0});
  CHECK_THROWS_AS(jacobi_eigen(S), std::invalid_argument);
}

TEST_CASE("dense solve round trip") {
  RngStream rng(7, 1);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 1 + static_cast<int>(rng.uniform() * 5);
    Matrix A(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) A(i, j) = 2.0 * rng.uniform() - 1.0;
      A(i, i) += n;  // diagonally dominant, well conditioned
    }
    Vec x_true(n);
    for (double& v : x_true) v = 2.0 * rng.uniform() - 1.0;
    Vec b(n);
    A.matvec(x_true, b);
    Vec x = solve_dense(A, b);
    for (int i = 0; i < n; ++i) CHECK(std::abs(x[i] - x_true[i]) < 1e-10);
  }
}
