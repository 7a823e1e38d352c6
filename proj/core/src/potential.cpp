#include "shb/potential.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

namespace shb {

namespace {

// c_f and the Hessian sup-norm for 1-d non-quadratic potentials are
// estimated on a uniform grid over the working box.
struct BoxStats {
  double c_f = 0.0;
  bool c_f_valid = false;
  double hess_sup = 0.0;
};

BoxStats estimate_box_stats_1d(const std::function<double(double)>& f,
                               const std::function<double(double)>& g,
                               const std::function<double(double)>& h) {
  BoxStats st;
  const int n = kWorkingBoxSamples;
  for (int i = 0; i < n; ++i) {
    const double x = -kWorkingBoxHalfWidth +
                     2.0 * kWorkingBoxHalfWidth * (i + 0.5) / n;
    const double fx = f(x);
    const double gx = g(x);
    if (fx > 1e-12) {
      st.c_f = std::max(st.c_f, gx * gx / fx);
      st.c_f_valid = true;
    }
    st.hess_sup = std::max(st.hess_sup, std::abs(h(x)));
  }
  return st;
}

}  // namespace

QuadraticSpec quadratic_spec(const Matrix& S) {
  if (!S.symmetric(1e-12 * (1.0 + S.max_abs())))
    throw std::invalid_argument("make_quadratic: S is not symmetric");
  const JacobiEigen eig = jacobi_eigen(S);
  for (double lam : eig.eigenvalues) {
    if (!(lam > 0.0))
      throw std::invalid_argument(
          "make_quadratic: S is not positive definite (eigenvalue " +
          std::to_string(lam) + ")");
  }
  return QuadraticSpec{S, eig.eigenvalues.front()};
}

Potential make_quadratic(const Matrix& S) {
  QuadraticSpec spec = quadratic_spec(S);
  const JacobiEigen eig = jacobi_eigen(S);
  const double lam_min = eig.eigenvalues.front();
  const double lam_max = eig.eigenvalues.back();
  auto Sp = std::make_shared<Matrix>(S);

  Potential p;
  p.dim = S.n();
  p.name = "quadratic";
  p.f = [Sp](std::span<const double> x) {
    double s = 0.0;
    for (int i = 0; i < Sp->n(); ++i) {
      double row = 0.0;
      for (int j = 0; j < Sp->n(); ++j) row += (*Sp)(i, j) * x[j];
      s += x[i] * row;
    }
    return 0.5 * s;
  };
  p.grad = [Sp](std::span<const double> x, std::span<double> out) {
    Sp->matvec(x, out);
  };
  p.hess = [Sp](std::span<const double>, Matrix& H) { H = *Sp; };
  // |S x|^2 <= 2 lam_max * (x^T S x / 2), tight along the top eigenvector
  p.c_f = 2.0 * lam_max;
  p.hess_sup_norm = S.frobenius_norm();
  p.strong_convexity = lam_min;
  p.minimizer = Vec(S.n(), 0.0);
  return p;
}

Potential make_power(double p_exp) {
  if (!(p_exp >= 2.0))
    throw std::invalid_argument(
        "make_power: p must be >= 2 (gradient is not Lipschitz near 0 "
        "otherwise)");
  Potential p;
  p.dim = 1;
  p.name = "power";
  p.f = [p_exp](std::span<const double> x) {
    return std::pow(std::abs(x[0]), p_exp) / p_exp;
  };
  p.grad = [p_exp](std::span<const double> x, std::span<double> out) {
    const double a = std::abs(x[0]);
    out[0] = (x[0] >= 0 ? 1.0 : -1.0) * std::pow(a, p_exp - 1.0);
    if (x[0] == 0.0) out[0] = 0.0;
  };
  p.hess = [p_exp](std::span<const double> x, Matrix& H) {
    H = Matrix(1);
    const double a = std::abs(x[0]);
    H(0, 0) = (p_exp == 2.0) ? 1.0
                             : (a == 0.0 ? 0.0 : (p_exp - 1.0) * std::pow(a, p_exp - 2.0));
  };
  p.c_f =
      (p_exp == 2.0) ? 2.0 : p_exp * std::pow(kWorkingBoxHalfWidth, p_exp - 2.0);
  p.hess_sup_norm =
      (p_exp == 2.0) ? 1.0
                     : (p_exp - 1.0) * std::pow(kWorkingBoxHalfWidth, p_exp - 2.0);
  // lambda_min of the Hessian at the minimizer is 0 for p > 2: accepted but
  // not strongly convex, so rate checks treat it separately.
  if (p_exp == 2.0) p.strong_convexity = 1.0;
  p.minimizer = Vec{0.0};
  return p;
}

Potential make_double_well(double a, double b) {
  if (!(a > 0.0))
    throw std::invalid_argument("make_double_well: a must be > 0 (coercivity)");
  Potential p;
  p.dim = 1;
  p.name = "double_well";
  p.f = [a, b](std::span<const double> x) {
    const double u = x[0], v = x[0] - 1.0;
    return a * u * u * u * u + b * v * v;
  };
  p.grad = [a, b](std::span<const double> x, std::span<double> out) {
    const double u = x[0];
    out[0] = 4.0 * a * u * u * u + 2.0 * b * (u - 1.0);
  };
  p.hess = [a, b](std::span<const double> x, Matrix& H) {
    H = Matrix(1);
    H(0, 0) = 12.0 * a * x[0] * x[0] + 2.0 * b;
  };
  // c_f stays unset: f takes negative values when b < 0, so the
  // quadratic-growth inequality has no finite constant near the zero set.
  const BoxStats st = estimate_box_stats_1d(
      [&p](double x) { return p.f1(x); }, [&p](double x) { return p.grad1(x); },
      [a, b](double x) { return 12.0 * a * x * x + 2.0 * b; });
  if (b > 0.0 && st.c_f_valid) p.c_f = st.c_f;
  p.hess_sup_norm = st.hess_sup;
  return p;
}

std::vector<double> critical_points_1d(const Potential& pot, double lo,
                                       double hi, int grid, double tol) {
  if (!(lo < hi)) throw std::invalid_argument("critical_points_1d: lo < hi required");
  if (grid < 2) throw std::invalid_argument("critical_points_1d: grid must be >= 2");
  if (pot.dim != 1)
    throw std::invalid_argument("critical_points_1d: 1-d potentials only");

  std::vector<double> roots;
  double xl = lo;
  double gl = pot.grad1(xl);
  for (int i = 1; i < grid; ++i) {
    const double xr = lo + (hi - lo) * i / (grid - 1);
    const double gr = pot.grad1(xr);
    if (gl == 0.0) {
      roots.push_back(xl);
    } else if (gl * gr < 0.0) {
      // bisection on the bracket
      double a = xl, b = xr, ga = gl;
      for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + b);
        const double gm = pot.grad1(m);
        if (std::abs(gm) <= tol && (b - a) < 1e-9 * (1.0 + std::abs(m))) break;
        if (ga * gm <= 0.0) {
          b = m;
        } else {
          a = m;
          ga = gm;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    xl = xr;
    gl = gr;
  }
  if (gl == 0.0) roots.push_back(xl);
  return roots;
}

}  // namespace shb
