#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace shb {

using Vec = std::vector<double>;

// Small dense square matrix, row-major. Dimensions in this project are the
// problem dimension d (typically 1 or 2), so nothing here is blocked or
// otherwise tuned.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(int n) : n_(n), a_(static_cast<size_t>(n) * n, 0.0) {}
  Matrix(int n, std::initializer_list<double> vals);

  static Matrix identity(int n);
  static Matrix diagonal(std::span<const double> d);

  int n() const { return n_; }
  double& operator()(int i, int j) { return a_[static_cast<size_t>(i) * n_ + j]; }
  double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * n_ + j]; }
  const std::vector<double>& data() const { return a_; }

  bool symmetric(double tol = 0.0) const;
  Matrix transpose() const;
  Matrix operator*(const Matrix& rhs) const;
  void matvec(std::span<const double> x, std::span<double> out) const;

  double frobenius_norm() const;
  double max_abs() const;

 private:
  int n_ = 0;
  std::vector<double> a_;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);   // Euclidean norm
double norm2sq(std::span<const double> a); // squared Euclidean norm

// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations,
// off-diagonal tolerance 1e-12 relative to the Frobenius norm.
// On return S = V diag(eigenvalues) V^T with V orthogonal (columns are
// eigenvectors); eigenvalues ascending.
struct JacobiEigen {
  Vec eigenvalues;
  Matrix V;
};
JacobiEigen jacobi_eigen(const Matrix& S);

// Solve A x = b in place for a small dense system (partial pivoting).
Vec solve_dense(Matrix A, Vec b);

}  // namespace shb
