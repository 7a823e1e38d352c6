#include "shb/linalg.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace shb {

Matrix::Matrix(int n, std::initializer_list<double> vals) : Matrix(n) {
  if (static_cast<int>(vals.size()) != n * n)
    throw std::invalid_argument("Matrix: initializer size does not match n*n");
  std::copy(vals.begin(), vals.end(), a_.begin());
}

Matrix Matrix::identity(int n) {
  Matrix m(n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> d) {
  Matrix m(static_cast<int>(d.size()));
  for (int i = 0; i < m.n(); ++i) m(i, i) = d[i];
  return m;
}

bool Matrix::symmetric(double tol) const {
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j)
      if (std::abs((*this)(i, j) - (*this)(j, i)) > tol) return false;
  return true;
}

Matrix Matrix::transpose() const {
  Matrix t(n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix Matrix::operator*(const Matrix& rhs) const {
  assert(n_ == rhs.n_);
  Matrix out(n_);
  for (int i = 0; i < n_; ++i)
    for (int k = 0; k < n_; ++k) {
      const double aik = (*this)(i, k);
      for (int j = 0; j < n_; ++j) out(i, j) += aik * rhs(k, j);
    }
  return out;
}

void Matrix::matvec(std::span<const double> x, std::span<double> out) const {
  assert(static_cast<int>(x.size()) == n_ && static_cast<int>(out.size()) == n_);
  for (int i = 0; i < n_; ++i) {
    double s = 0.0;
    for (int j = 0; j < n_; ++j) s += (*this)(i, j) * x[j];
    out[i] = s;
  }
}

double Matrix::frobenius_norm() const {
  double s = 0.0;
  for (double v : a_) s += v * v;
  return std::sqrt(s);
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (double v : a_) m = std::max(m, std::abs(v));
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2sq(std::span<const double> a) { return dot(a, a); }
double norm2(std::span<const double> a) { return std::sqrt(norm2sq(a)); }

JacobiEigen jacobi_eigen(const Matrix& S) {
  const int n = S.n();
  if (!S.symmetric(1e-12 * (1.0 + S.max_abs())))
    throw std::invalid_argument("jacobi_eigen: matrix is not symmetric");

  Matrix A = S;
  Matrix V = Matrix::identity(n);
  const double scale = std::max(A.frobenius_norm(), 1e-300);

  auto offdiag = [&]() {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) s += A(i, j) * A(i, j);
    return std::sqrt(2.0 * s);
  };

  const int max_sweeps = 64;
  for (int sweep = 0; sweep < max_sweeps && offdiag() > 1e-12 * scale; ++sweep) {
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = A(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        const double app = A(p, p), aqq = A(q, q);
        A(p, p) = app - t * apq;
        A(q, q) = aqq + t * apq;
        A(p, q) = 0.0;
        A(q, p) = 0.0;
        for (int r = 0; r < n; ++r) {
          if (r != p && r != q) {
            const double arp = A(r, p), arq = A(r, q);
            A(r, p) = A(p, r) = arp - s * (arq + tau * arp);
            A(r, q) = A(q, r) = arq + s * (arp - tau * arq);
          }
          const double vrp = V(r, p), vrq = V(r, q);
          V(r, p) = vrp - s * (vrq + tau * vrp);
          V(r, q) = vrq + s * (vrp - tau * vrq);
        }
      }
    }
  }

  // sort eigenpairs ascending
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](int i, int j) { return A(i, i) < A(j, j); });

  JacobiEigen out;
  out.eigenvalues.resize(n);
  out.V = Matrix(n);
  for (int k = 0; k < n; ++k) {
    out.eigenvalues[k] = A(order[k], order[k]);
    for (int r = 0; r < n; ++r) out.V(r, k) = V(r, order[k]);
  }
  return out;
}

Vec solve_dense(Matrix A, Vec b) {
  const int n = A.n();
  if (static_cast<int>(b.size()) != n)
    throw std::invalid_argument("solve_dense: size mismatch");
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(A(r, col)) > std::abs(A(piv, col))) piv = r;
    if (std::abs(A(piv, col)) < 1e-300)
      throw std::runtime_error("solve_dense: singular matrix");
    if (piv != col) {
      for (int j = 0; j < n; ++j) std::swap(A(col, j), A(piv, j));
      std::swap(b[col], b[piv]);
    }
    for (int r = col + 1; r < n; ++r) {
      const double m = A(r, col) / A(col, col);
      if (m == 0.0) continue;
      for (int j = col; j < n; ++j) A(r, j) -= m * A(col, j);
      b[r] -= m * b[col];
    }
  }
  Vec x(n);
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < n; ++j) s -= A(i, j) * x[j];
    x[i] = s / A(i, i);
  }
  return x;
}

}  // namespace shb
