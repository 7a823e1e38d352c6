#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>

#include "shb/linalg.hpp"
#include "shb/rng.hpp"
#include "shb/schedules.hpp"

namespace shb {

// S = P^T diag(eigenvalues) P with P orthogonal; eigenvalues ascending.
struct SpectralDecomposition {
  Matrix P;
  Vec eigenvalues;
};

SpectralDecomposition spectral_reduce(const Matrix& S);

// Eigenvalues of the 2x2 block C = [[0, -1], [lambda r, -r]], i.e. the roots
// of (t + r/2)^2 + r (4 lambda - r)/4: a real pair for r >= 4 lambda, a
// conjugate pair otherwise.  The larger real part always equals
// -alpha_r(r, lambda)/2.
std::pair<std::complex<double>, std::complex<double>> block_eigen(double lambda,
                                                                  double r);

// Covariance of the limit law of (X_n, Y_n)/sqrt(gamma_n), split into the
// d x d blocks of the assembled 2d x 2d matrix.
struct LimitCovariance {
  Matrix x_block;
  Matrix y_block;
  Matrix xy_block;
  Matrix assembled() const;
};

// beta < 1, isotropic noise: x-block (sigma0^2/2) S^{-1}, y-block
// (sigma0^2 r / 2) I, zero cross block.
LimitCovariance limit_cov_beta_lt1(const SpectralDecomposition& decomp,
                                   double r, double sigma0);

struct Beta1Covariance {
  double var_x = 0.0;
  double var_y = 0.0;
  double cov_xy = 0.0;
};

// beta = 1, d = 1.  Solves the three stationarity identities of the shifted
// generator,
//   sigma_x^2 = 2 gamma sigma_xy
//   sigma_y^2 = r lambda sigma_x^2 + (1/gamma - r) sigma_xy
//   (r - 1/(2 gamma)) sigma_y^2 = r lambda sigma_xy + r^2 sigma0^2 / 2,
// as a 3x3 linear system.  Requires gamma * alpha_r(r, lambda) > 1 (the
// shifted process has no invariant law otherwise).
Beta1Covariance limit_cov_beta1_1d(double lambda, double r, double gamma,
                                   double sigma0);

// Closed forms for r >= 4 lambda.  Writing abar_{+-} = (1 +- sqrt(1 -
// 4 lambda/r))/2 (the magnitudes of the block eigenvalues scaled by 1/r),
//   sigma_x^2  = sigma0^2 * 2 lambda r gamma^3 / D
//   sigma_y^2  = sigma0^2 * lambda r gamma (2 lambda r gamma^2 - r gamma + 1) / D
//   sigma_xy   = sigma0^2 * lambda r gamma^2 / D
// with D = (gamma r - 1)(2 lambda gamma - abar_-)(2 lambda gamma - abar_+).
// Agrees with the linear solve to rounding.
Beta1Covariance limit_cov_beta1_closed_form(double lambda, double r,
                                            double gamma, double sigma0);

// Generator of the limit Ornstein-Uhlenbeck process applied to a scalar test
// field phi on R^{2d} at z = (x, y):
//   L phi = <grad phi, ((1/(2 gamma)) 1_{beta=1} I + H) z>
//           + (r^2 sigma0^2 / 2) Laplacian_y phi
// with H = [[0, -I], [r Hess, -r I]].  Derivatives of phi by central finite
// differences with step 1e-5.
double ou_generator_apply(const std::function<double(std::span<const double>)>& phi,
                          std::span<const double> z, const Matrix& hess_at_min,
                          double r, double gamma, bool beta_is_one,
                          double sigma0);

// Direct-summation oracle for the step-size propositions: the sums
//   S_n = sum_{k<=n} gamma_k^2 prod_{l=k+1..n} (1 - a gamma_l + b gamma_l^2)
// computed exactly by recurrence and compared against the proposition's
// bound ((2/a) gamma_{n+1} for beta < 1; C_{gamma,b} * n^{-1}/(a gamma - 1),
// log(n)/n or n^{-a gamma}/(1 - a gamma) for beta = 1, with
// C_{gamma,b} = gamma^2 exp(b gamma^2 pi^2 / 6)).
struct StepsumReport {
  double max_ratio = 0.0;     // sup of S_n / bound_n over [n0, N]
  double final_ratio = 0.0;   // ratio at N
  std::int64_t settle_index = -1;  // smallest m with ratio <= 1 on [m, N]
  bool violated = false;      // no settle index found in [n0, N]
};

StepsumReport stepsum_bound_check(double a, double b, const StepSchedule& sched,
                                  std::int64_t n0, std::int64_t N);

// Monte-Carlo estimate of E[sup_{n<=k<=100n} gamma_k^2 |xi_k|^2] for iid
// N(0, sigma^2 I_d) noise, with the ratio to sigma^2 d gamma_n^2
// log(gamma_n^{-2}).
struct SupSubgaussianStat {
  double mean_sup = 0.0;
  double ratio = 0.0;
};

SupSubgaussianStat subgaussian_sup_stat(double sigma, int d,
                                        const StepSchedule& sched,
                                        std::int64_t n, int reps,
                                        std::uint64_t seed);

}  // namespace shb
