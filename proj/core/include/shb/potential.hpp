#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>

#include "shb/linalg.hpp"

namespace shb {

// Objective with exact gradient (and usually Hessian) oracles plus the
// growth constants the convergence theory consumes.  Immutable after
// construction; safe to share across replicas.
struct Potential {
  int dim = 1;
  std::string name;

  std::function<double(std::span<const double>)> f;
  std::function<void(std::span<const double>, std::span<double>)> grad;
  // Empty when no Hessian oracle is available.
  std::function<void(std::span<const double>, Matrix&)> hess;

  // Quadratic-growth constant: |grad|^2 <= c_f * f wherever f > 0 on the
  // working box (exact for quadratics, sampled otherwise).
  std::optional<double> c_f;
  // sup of the Hessian Frobenius norm over the working box.
  double hess_sup_norm = 0.0;
  std::optional<double> strong_convexity;
  std::optional<Vec> minimizer;

  double f1(double x) const { return f(std::span<const double>(&x, 1)); }
  double grad1(double x) const {
    double g;
    grad(std::span<const double>(&x, 1), std::span<double>(&g, 1));
    return g;
  }
  bool has_hess() const { return static_cast<bool>(hess); }
};

struct QuadraticSpec {
  Matrix S;
  double min_eig = 0.0;
};

// f(x) = x^T S x / 2 for symmetric positive definite S.  Rejects
// non-symmetric or non-PD input, naming the offending eigenvalue.
Potential make_quadratic(const Matrix& S);
QuadraticSpec quadratic_spec(const Matrix& S);

// d = 1, f(x) = |x|^p / p, p >= 2.
Potential make_power(double p);

// d = 1, f(x) = a x^4 + b (x-1)^2, a > 0.
Potential make_double_well(double a, double b);

// All zeros of grad on [lo, hi] found by scanning a uniform grid for sign
// changes and bisecting each bracket until |grad| <= tol.  Sorted ascending;
// empty when grad never changes sign.
std::vector<double> critical_points_1d(const Potential& pot, double lo,
                                       double hi, int grid, double tol);

// Working box used when growth constants have to be estimated numerically.
inline constexpr double kWorkingBoxHalfWidth = 20.0;
inline constexpr int kWorkingBoxSamples = 10000;

}  // namespace shb
