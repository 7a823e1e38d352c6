#include <doctest.h>

#include <cmath>

#include "shb/quad_analysis.hpp"
#include "shb/rng.hpp"
#include "testutil.hpp"

using namespace shb;

TEST_CASE("spectral_reduce") {
  SUBCASE("identity") {
    auto d = spectral_reduce(Matrix::identity(3));
    for (double lam : d.eigenvalues) CHECK(lam == doctest::Approx(1.0));
  }
  SUBCASE("diagonal") {
    auto d = spectral_reduce(Matrix(2, {1.0, 0.0, 0.0, 2.0}));
    CHECK(d.eigenvalues[0] == doctest::Approx(1.0));
    CHECK(d.eigenvalues[1] == doctest::Approx(2.0));
  }
  SUBCASE("coupled") {
    auto d = spectral_reduce(Matrix(2, {2.0, 1.0, 1.0, 2.0}));
    CHECK(d.eigenvalues[0] == doctest::Approx(1.0));
    CHECK(d.eigenvalues[1] == doctest::Approx(3.0));
  }
  SUBCASE("invariants: P orthogonal, P^T D P = S") {
    RngStream rng(55, 0);
    for (int trial = 0; trial < 10; ++trial) {
      const int n = 2 + static_cast<int>(rng.uniform() * 4);
      Matrix A(n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = 2.0 * rng.uniform() - 1.0;
      Matrix S = A * A.transpose();
      for (int i = 0; i < n; ++i) S(i, i) += 0.5;  // safely PD
      auto d = spectral_reduce(S);

      Matrix PtP = d.P.transpose() * d.P;
      double err = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          err = std::max(err, std::abs(PtP(i, j) - (i == j ? 1.0 : 0.0)));
      CHECK(err <= 1e-10);

      Matrix R = d.P.transpose() * Matrix::diagonal(d.eigenvalues) * d.P;
      double rec = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) rec = std::max(rec, std::abs(R(i, j) - S(i, j)));
      CHECK(rec <= 1e-8 * S.frobenius_norm());
    }
  }
  SUBCASE("rejects non-PD") {
    CHECK_THROWS_AS(spectral_reduce(Matrix(2, {1.0, 2.0, 2.0, 1.0})),
                    std::invalid_argument);
  }
}

TEST_CASE("block_eigen") {
  SUBCASE("double root at r = 4 lambda") {
    auto [e1, e2] = block_eigen(1.0, 4.0);
    CHECK(e1.real() == doctest::Approx(-2.0));
    CHECK(e2.real() == doctest::Approx(-2.0));
    CHECK(e1.imag() == 0.0);
  }
  SUBCASE("real pair at r = 8") {
    auto [e1, e2] = block_eigen(1.0, 8.0);
    CHECK(e1.real() == doctest::Approx(-4.0 + 2.0 * std::sqrt(2.0)).epsilon(1e-12));
    CHECK(e2.real() == doctest::Approx(-4.0 - 2.0 * std::sqrt(2.0)).epsilon(1e-12));
  }
  SUBCASE("conjugate pair at r = 2") {
    auto [e1, e2] = block_eigen(1.0, 2.0);
    CHECK(e1.real() == doctest::Approx(-1.0));
    CHECK(e1.imag() == doctest::Approx(1.0));
    CHECK(e2.imag() == doctest::Approx(-1.0));
  }
  SUBCASE("characteristic polynomial vanishes at the roots") {
    auto chi = [](std::complex<double> t, double lam, double r) {
      return (t + r / 2.0) * (t + r / 2.0) + r * (4.0 * lam - r) / 4.0;
    };
    RngStream rng(66, 0);
    for (int trial = 0; trial < 100; ++trial) {
      const double lam = 0.1 + 5.0 * rng.uniform();
      const double r = 0.1 + 20.0 * rng.uniform();
      auto [e1, e2] = block_eigen(lam, r);
      CHECK(std::abs(chi(e1, lam, r)) <= 1e-12 * (1.0 + r * r));
      CHECK(std::abs(chi(e2, lam, r)) <= 1e-12 * (1.0 + r * r));
      // spectral gap ties to the rate constant
      const double max_re = std::max(e1.real(), e2.real());
      CHECK(std::abs(max_re + alpha_r(r, lam) / 2.0) <= 1e-10 * (1.0 + r));
    }
  }
}

TEST_CASE("limit covariance, beta < 1") {
  SUBCASE("d = 1 example") {
    auto d = spectral_reduce(Matrix(1, {1.0}));
    auto cov = limit_cov_beta_lt1(d, 5.0, 1.0);
    CHECK(cov.x_block(0, 0) == doctest::Approx(0.5));
    CHECK(cov.y_block(0, 0) == doctest::Approx(2.5));
    CHECK(cov.xy_block(0, 0) == 0.0);
  }
  SUBCASE("sigma0 = 0 vanishes") {
    auto d = spectral_reduce(Matrix(1, {2.0}));
    auto cov = limit_cov_beta_lt1(d, 3.0, 0.0);
    CHECK(cov.x_block(0, 0) == 0.0);
    CHECK(cov.y_block(0, 0) == 0.0);
  }
  SUBCASE("diagonal 2d") {
    auto d = spectral_reduce(Matrix(2, {1.0, 0.0, 0.0, 2.0}));
    auto cov = limit_cov_beta_lt1(d, 1.0, 1.0);
    CHECK(cov.x_block(0, 0) == doctest::Approx(0.5));
    CHECK(cov.x_block(1, 1) == doctest::Approx(0.25));
    CHECK(cov.y_block(0, 0) == doctest::Approx(0.5));
    CHECK(cov.y_block(1, 1) == doctest::Approx(0.5));
  }
  SUBCASE("assembled matrix is PSD across a grid") {
    RngStream rng(77, 0);
    for (int trial = 0; trial < 30; ++trial) {
      const int n = 1 + static_cast<int>(rng.uniform() * 3);
      Matrix A(n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = 2.0 * rng.uniform() - 1.0;
      Matrix S = A * A.transpose();
      for (int i = 0; i < n; ++i) S(i, i) += 0.3;
      auto cov = limit_cov_beta_lt1(spectral_reduce(S), 0.5 + 5.0 * rng.uniform(),
                                    0.1 + 2.0 * rng.uniform());
      CHECK(testutil::is_psd(cov.assembled()));
    }
  }
}

TEST_CASE("limit covariance, beta = 1, d = 1") {
  SUBCASE("the three stationarity identities hold to 1e-10") {
    auto check_identities = [](double lam, double r, double gamma, double s0) {
      auto c = limit_cov_beta1_1d(lam, r, gamma, s0);
      const double id1 = c.var_x - 2.0 * gamma * c.cov_xy;
      const double id2 =
          c.var_y - (r * lam * c.var_x + (1.0 / gamma - r) * c.cov_xy);
      const double id3 = (r - 1.0 / (2.0 * gamma)) * c.var_y -
                         (r * lam * c.cov_xy + 0.5 * r * r * s0 * s0);
      const double scale = std::abs(c.var_y) + 1.0;
      CHECK(std::abs(id1) <= 1e-10 * scale);
      CHECK(std::abs(id2) <= 1e-10 * scale);
      CHECK(std::abs(id3) <= 1e-10 * scale);
    };
    check_identities(1.0, 8.0, 2.0, 1.0);
    check_identities(1.0, 2.0, 2.0, 1.0);  // r < 4 lambda, gamma alpha_r = 4
    check_identities(0.5, 6.0, 3.0, 0.7);
  }

  SUBCASE("solution for lambda=1, r=8, gamma=2, sigma0=1") {
    auto c = limit_cov_beta1_1d(1.0, 8.0, 2.0, 1.0);
    // exact rationals from the 3x3 solve: 1024/1455, 6272/1455, 256/1455
    CHECK(c.var_x == doctest::Approx(1024.0 / 1455.0).epsilon(1e-12));
    CHECK(c.var_y == doctest::Approx(6272.0 / 1455.0).epsilon(1e-12));
    CHECK(c.cov_xy == doctest::Approx(256.0 / 1455.0).epsilon(1e-12));
    // identity sigma_x^2 = 2 gamma sigma_xy exactly
    CHECK(c.var_x == doctest::Approx(2.0 * 2.0 * c.cov_xy).epsilon(1e-14));
  }

  SUBCASE("sigma0 = 0 gives the zero solution") {
    auto c = limit_cov_beta1_1d(1.0, 8.0, 2.0, 0.0);
    CHECK(c.var_x == doctest::Approx(0.0));
    CHECK(c.var_y == doctest::Approx(0.0));
    CHECK(c.cov_xy == doctest::Approx(0.0));
  }

  SUBCASE("precondition gamma alpha_r > 1 is enforced with the value") {
    CHECK_THROWS_WITH_AS(limit_cov_beta1_1d(1.0, 2.0, 0.25, 1.0),
                         doctest::Contains("0.5"), std::invalid_argument);
  }

  SUBCASE("closed form agrees with the linear solve to 1e-10 on a grid") {
    RngStream rng(88, 0);
    int tested = 0;
    while (tested < 50) {
      const double lam = 0.2 + 3.0 * rng.uniform();
      const double r = 4.0 * lam * (1.0 + 2.0 * rng.uniform());
      const double gamma = (1.0 + 4.0 * rng.uniform()) / alpha_r(r, lam);
      if (!(gamma * alpha_r(r, lam) > 1.05)) continue;
      ++tested;
      const auto solved = limit_cov_beta1_1d(lam, r, gamma, 1.3);
      const auto closed = limit_cov_beta1_closed_form(lam, r, gamma, 1.3);
      CHECK(testutil::rel_err(closed.var_x, solved.var_x) <= 1e-10);
      CHECK(testutil::rel_err(closed.var_y, solved.var_y) <= 1e-10);
      CHECK(testutil::rel_err(closed.cov_xy, solved.cov_xy) <= 1e-10);
    }
  }

  SUBCASE("assembled 2x2 covariance is PSD") {
    RngStream rng(89, 0);
    for (int trial = 0; trial < 50; ++trial) {
      const double lam = 0.2 + 3.0 * rng.uniform();
      const double r = lam * (1.0 + 10.0 * rng.uniform());
      const double gamma = (1.1 + 3.0 * rng.uniform()) / alpha_r(r, lam);
      if (!(gamma * alpha_r(r, lam) > 1.0)) continue;
      auto c = limit_cov_beta1_1d(lam, r, gamma, 0.9);
      Matrix M(2, {c.var_x, c.cov_xy, c.cov_xy, c.var_y});
      CHECK(testutil::is_psd(M, 1e-9));
    }
  }
}

TEST_CASE("ou_generator_apply") {
  Matrix hess(1, {1.0});

  SUBCASE("phi = x^2/2 at z=(1,2), beta<1") {
    auto phi = [](std::span<const double> z) { return 0.5 * z[0] * z[0]; };
    const double v = ou_generator_apply(phi, Vec{1.0, 2.0}, hess, 3.0, 1.0,
                                        false, 1.0);
    CHECK(v == doctest::Approx(-2.0).epsilon(1e-6));
  }
  SUBCASE("phi = y^2/2 at z=(1,2), lambda=1, r=3, sigma0=1, beta<1") {
    auto phi = [](std::span<const double> z) { return 0.5 * z[1] * z[1]; };
    const double v = ou_generator_apply(phi, Vec{1.0, 2.0}, hess, 3.0, 1.0,
                                        false, 1.0);
    // r (lambda x - y) y + r^2 sigma0^2 / 2 = 3(1-2)*2 + 9/2 = -1.5
    CHECK(v == doctest::Approx(-1.5).epsilon(1e-4));
  }
  SUBCASE("beta = 1 adds the 1/(2 gamma) drift") {
    auto phi = [](std::span<const double> z) { return 0.5 * z[0] * z[0]; };
    const double v = ou_generator_apply(phi, Vec{1.0, 2.0}, hess, 3.0, 2.0,
                                        true, 1.0);
    // (x/(2 gamma) - y) x = (0.25 - 2) * 1
    CHECK(v == doctest::Approx(-1.75).epsilon(1e-6));
  }
}

TEST_CASE("stationarity: E_mu[L phi] = 0 under the beta<1 limit law") {
  // sample mu from limit_cov_beta_lt1 (d=1) and check the generator
  // integrates to zero on x^2, y^2 and xy within 3 standard errors
  const double lam = 1.0, r = 5.0, s0 = 1.0;
  Matrix hess(1, {lam});
  const double vx = 0.5 * s0 * s0 / lam;
  const double vy = 0.5 * s0 * s0 * r;

  auto phis = std::vector<std::function<double(std::span<const double>)>>{
      [](std::span<const double> z) { return z[0] * z[0]; },
      [](std::span<const double> z) { return z[1] * z[1]; },
      [](std::span<const double> z) { return z[0] * z[1]; }};

  RngStream rng(404, 0);
  const int N = 1000000;
  for (const auto& phi : phis) {
    double acc = 0.0, acc2 = 0.0;
    for (int i = 0; i < N; ++i) {
      Vec z{std::sqrt(vx) * rng.gaussian(), std::sqrt(vy) * rng.gaussian()};
      const double v = ou_generator_apply(phi, z, hess, r, 1.0, false, s0);
      acc += v;
      acc2 += v * v;
    }
    const double mean = acc / N;
    const double se = std::sqrt((acc2 / N - mean * mean) / N);
    CHECK(std::abs(mean) <= 3.0 * se);
  }
}

TEST_CASE("stepsum_bound_check") {
  SUBCASE("n = n0 = 1: the sum is gamma_1^2") {
    StepSchedule s(0.1, 0.7);
    auto rep = stepsum_bound_check(1.0, 0.0, s, 1, 1);
    // S_1 = gamma_1^2 = 0.01, bound = 2 gamma_2
    CHECK(rep.max_ratio == doctest::Approx(0.01 / (2.0 * s.gamma(2))));
  }
  SUBCASE("beta = 0.7 example settles below the bound") {
    StepSchedule s(0.1, 0.7);
    auto rep = stepsum_bound_check(1.0, 0.0, s, 1, 100000);
    CHECK_FALSE(rep.violated);
    CHECK(rep.settle_index < 50000);
    CHECK(rep.final_ratio <= 1.0);
  }
  SUBCASE("beta = 1, a gamma = 2: n * S_n stays bounded") {
    StepSchedule s(0.5, 1.0);
    auto rep = stepsum_bound_check(4.0, 0.0, s, 1, 100000);
    CHECK_FALSE(rep.violated);
    CHECK(rep.final_ratio <= 1.0);
  }
}

TEST_CASE("subgaussian_sup_stat") {
  StepSchedule s(1.0, 0.7);
  SUBCASE("sigma = 0 gives 0") {
    auto st = subgaussian_sup_stat(0.0, 1, s, 100, 10, 1);
    CHECK(st.mean_sup == 0.0);
  }
  SUBCASE("ratio is order one at n = 1000") {
    auto st = subgaussian_sup_stat(1.0, 1, s, 1000, 200, 2);
    CHECK(st.ratio > 0.0);
    CHECK(st.ratio <= 20.0);
  }
  SUBCASE("ratio stays stable as n grows") {
    auto a = subgaussian_sup_stat(1.0, 1, s, 1000, 60, 3);
    auto b = subgaussian_sup_stat(1.0, 1, s, 10000, 60, 4);
    CHECK(b.ratio <= 3.0 * a.ratio);
  }
}
