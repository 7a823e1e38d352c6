#include "shb/quad_analysis.hpp"

#include <cmath>
#include <stdexcept>

#include "shb/potential.hpp"

namespace shb {

SpectralDecomposition spectral_reduce(const Matrix& S) {
  quadratic_spec(S);  // validates symmetry and positive definiteness
  JacobiEigen eig = jacobi_eigen(S);
  // jacobi gives S = V diag V^T; the decomposition is stated as S = P^T D P
  return SpectralDecomposition{eig.V.transpose(), std::move(eig.eigenvalues)};
}

std::pair<std::complex<double>, std::complex<double>> block_eigen(double lambda,
                                                                  double r) {
  if (!(lambda > 0.0) || !(r > 0.0))
    throw std::invalid_argument("block_eigen: lambda and r must be > 0");
  const double disc = r * (r - 4.0 * lambda);
  if (disc >= 0.0) {
    const double root = std::sqrt(disc);
    return {std::complex<double>((-r + root) / 2.0, 0.0),
            std::complex<double>((-r - root) / 2.0, 0.0)};
  }
  const double im = std::sqrt(-disc) / 2.0;
  return {std::complex<double>(-r / 2.0, im), std::complex<double>(-r / 2.0, -im)};
}

Matrix LimitCovariance::assembled() const {
  const int d = x_block.n();
  Matrix full(2 * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      full(i, j) = x_block(i, j);
      full(d + i, d + j) = y_block(i, j);
      full(i, d + j) = xy_block(i, j);
      full(d + j, i) = xy_block(i, j);
    }
  return full;
}

LimitCovariance limit_cov_beta_lt1(const SpectralDecomposition& decomp,
                                   double r, double sigma0) {
  const int d = decomp.P.n();
  LimitCovariance cov;
  // x-block: (sigma0^2/2) S^{-1} = (sigma0^2/2) P^T diag(1/lambda) P
  Matrix inv_diag(d);
  for (int i = 0; i < d; ++i) inv_diag(i, i) = 1.0 / decomp.eigenvalues[i];
  const Matrix Pt = decomp.P.transpose();
  Matrix sinv = Pt * inv_diag * decomp.P;
  cov.x_block = Matrix(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      cov.x_block(i, j) = 0.5 * sigma0 * sigma0 * sinv(i, j);
  cov.y_block = Matrix(d);
  for (int i = 0; i < d; ++i) cov.y_block(i, i) = 0.5 * sigma0 * sigma0 * r;
  cov.xy_block = Matrix(d);
  return cov;
}

Beta1Covariance limit_cov_beta1_1d(double lambda, double r, double gamma,
                                   double sigma0) {
  const double ga = gamma * alpha_r(r, lambda);
  if (!(ga > 1.0))
    throw std::invalid_argument(
        "limit_cov_beta1_1d: gamma * alpha_r = " + std::to_string(ga) +
        " <= 1, the shifted generator has no invariant law");

  // unknowns ordered (var_x, var_y, cov_xy)
  Matrix A(3);
  Vec b(3, 0.0);
  A(0, 0) = 1.0 / (2.0 * gamma); A(0, 2) = -1.0;
  A(1, 0) = r * lambda; A(1, 1) = -1.0; A(1, 2) = 1.0 / gamma - r;
  A(2, 1) = r - 1.0 / (2.0 * gamma); A(2, 2) = -r * lambda;
  b[2] = 0.5 * r * r * sigma0 * sigma0;

  Vec sol = solve_dense(A, b);
  return Beta1Covariance{sol[0], sol[1], sol[2]};
}

Beta1Covariance limit_cov_beta1_closed_form(double lambda, double r,
                                            double gamma, double sigma0) {
  if (!(r >= 4.0 * lambda))
    throw std::invalid_argument(
        "limit_cov_beta1_closed_form: requires r >= 4 lambda");
  const double ga = gamma * alpha_r(r, lambda);
  if (!(ga > 1.0))
    throw std::invalid_argument(
        "limit_cov_beta1_closed_form: gamma * alpha_r <= 1");
  const double root = std::sqrt(1.0 - 4.0 * lambda / r);
  const double abar_m = 0.5 * (1.0 - root);
  const double abar_p = 0.5 * (1.0 + root);
  const double D = (gamma * r - 1.0) * (2.0 * lambda * gamma - abar_m) *
                   (2.0 * lambda * gamma - abar_p);
  const double s2 = sigma0 * sigma0;
  Beta1Covariance cov;
  cov.var_x = s2 * 2.0 * lambda * r * gamma * gamma * gamma / D;
  cov.var_y = s2 * lambda * r * gamma *
              (2.0 * lambda * r * gamma * gamma - r * gamma + 1.0) / D;
  cov.cov_xy = s2 * lambda * r * gamma * gamma / D;
  return cov;
}

double ou_generator_apply(const std::function<double(std::span<const double>)>& phi,
                          std::span<const double> z, const Matrix& hess_at_min,
                          double r, double gamma, bool beta_is_one,
                          double sigma0) {
  const int d = hess_at_min.n();
  if (static_cast<int>(z.size()) != 2 * d)
    throw std::invalid_argument("ou_generator_apply: z must have size 2d");

  // drift ((1/(2 gamma)) 1_{beta=1} I + H) z with H = [[0,-I],[r Hess,-r I]]
  Vec drift(2 * d, 0.0);
  const double shift = beta_is_one ? 1.0 / (2.0 * gamma) : 0.0;
  for (int i = 0; i < d; ++i) {
    drift[i] = shift * z[i] - z[d + i];
    double hx = 0.0;
    for (int j = 0; j < d; ++j) hx += hess_at_min(i, j) * z[j];
    drift[d + i] = r * hx + (shift - r) * z[d + i];
  }

  const double h = 1e-5;
  Vec zp(z.begin(), z.end());
  const double phi0 = phi(zp);

  double out = 0.0;
  for (int i = 0; i < 2 * d; ++i) {
    const double zi = zp[i];
    zp[i] = zi + h;
    const double fp = phi(zp);
    zp[i] = zi - h;
    const double fm = phi(zp);
    zp[i] = zi;
    out += drift[i] * (fp - fm) / (2.0 * h);
    if (i >= d) {
      // noise only acts on the y block
      const double second = (fp - 2.0 * phi0 + fm) / (h * h);
      out += 0.5 * r * r * sigma0 * sigma0 * second;
    }
  }
  return out;
}

StepsumReport stepsum_bound_check(double a, double b, const StepSchedule& sched,
                                  std::int64_t n0, std::int64_t N) {
  if (!(a > 0.0)) throw std::invalid_argument("stepsum_bound_check: a must be > 0");
  if (N < n0 || n0 < 1)
    throw std::invalid_argument("stepsum_bound_check: need 1 <= n0 <= N");

  const double beta = sched.beta();
  const double gamma = sched.gamma_scale();
  const double ag = a * gamma;
  const double pi2_6 = 1.6449340668482264;
  const double c_beta1 = gamma * gamma * std::exp(b * gamma * gamma * pi2_6);

  auto bound_at = [&](std::int64_t n) {
    if (beta < 1.0) return 2.0 / a * sched.gamma(n + 1);
    const double nn = static_cast<double>(n);
    if (ag > 1.0) return c_beta1 / (ag - 1.0) / nn;
    if (ag == 1.0) return c_beta1 * std::log(std::max(nn, 2.0)) / nn;
    return c_beta1 / (1.0 - ag) * std::pow(nn, -ag);
  };

  StepsumReport rep;
  double S = 0.0;
  std::int64_t last_above = 0;
  for (std::int64_t n = 1; n <= N; ++n) {
    const double g = sched.gamma(n);
    S = (1.0 - a * g + b * g * g) * S + g * g;
    if (n < n0) continue;
    const double ratio = S / bound_at(n);
    if (ratio > 1.0) last_above = n;
    if (ratio > rep.max_ratio) rep.max_ratio = ratio;
    if (n == N) rep.final_ratio = ratio;
  }
  if (last_above >= N) {
    rep.violated = true;
  } else {
    rep.settle_index = std::max<std::int64_t>(n0, last_above + 1);
  }
  return rep;
}

SupSubgaussianStat subgaussian_sup_stat(double sigma, int d,
                                        const StepSchedule& sched,
                                        std::int64_t n, int reps,
                                        std::uint64_t seed) {
  if (n < 1 || reps < 1 || d < 1)
    throw std::invalid_argument("subgaussian_sup_stat: bad arguments");
  if (sigma == 0.0) return SupSubgaussianStat{0.0, 0.0};

  const std::int64_t kmax = 100 * n;
  double acc = 0.0;
  for (int rep = 0; rep < reps; ++rep) {
    RngStream rng(seed, static_cast<std::uint64_t>(rep));
    double sup = 0.0;
    for (std::int64_t k = n; k <= kmax; ++k) {
      double nrm2 = 0.0;
      for (int j = 0; j < d; ++j) {
        const double xi = sigma * rng.gaussian();
        nrm2 += xi * xi;
      }
      const double g = sched.gamma(k);
      sup = std::max(sup, g * g * nrm2);
    }
    acc += sup;
  }
  SupSubgaussianStat st;
  st.mean_sup = acc / reps;
  const double gn = sched.gamma(n);
  st.ratio = st.mean_sup / (sigma * sigma * d * gn * gn * std::log(1.0 / (gn * gn)));
  return st;
}

}  // namespace shb
