// Monte-Carlo property tests that take seconds to minutes; kept apart from
// the fast unit suite so ctest can schedule them in parallel.
#include <doctest.h>

#include <cmath>

#include "shb/baselines.hpp"
#include "shb/harness.hpp"
#include "shb/quad_analysis.hpp"
#include "testutil.hpp"

using namespace shb;

TEST_CASE("almost-sure convergence proxy, quadratic d=2, both memory kinds") {
  // |grad f(X_n)| and |Y_n|/sqrt(r_n) at n = 1e6 must fall below 10x their
  // rate scale in at least 95% of 100 replicas
  const Matrix S(2, {2.0, 1.0, 1.0, 2.0});  // eigenvalues 1, 3
  const Potential pot = make_quadratic(S);
  const double sigma0 = 1.0;
  const std::int64_t N = 1000000;
  const int R = 100;

  struct Setup {
    MemorySchedule mem;
    double beta;
  };
  for (const Setup& setup : {Setup{MemorySchedule::exponential(5.0), 0.75},
                             Setup{MemorySchedule::polynomial(3.0), 0.5}}) {
    StepSchedule sched(1.0, setup.beta);
    const double gN = sched.gamma(N);
    // tr(S^{-1}) = (2+2)/3; |grad| <= lam_max |X|
    const double scale_grad =
        3.0 * std::sqrt(0.5 * sigma0 * sigma0 * (4.0 / 3.0) * gN);
    const double scale_y = std::sqrt(0.5 * sigma0 * sigma0 * 2.0 * gN);

    std::vector<int> ok(R, 0);
    parallel_for(R, [&](int rep) {
      StepSchedule local(1.0, setup.beta);
      RngStream rng(515 + static_cast<int>(setup.beta * 100), rep);
      auto noise = NoiseModel::isotropic_gaussian(sigma0);
      auto st = shb_run(ShbState::init(Vec{1.0, -1.0}), N, pot, local,
                        setup.mem, noise, rng);
      Vec g(2);
      pot.grad(st.x, g);
      const double rn = setup.mem.r_at(st.n, st.big_gamma, local.gamma(1));
      const double ytil = norm2(st.y) / std::sqrt(rn);
      ok[rep] = (norm2(g) < 10.0 * scale_grad && ytil < 10.0 * scale_y) ? 1 : 0;
    });
    int good = 0;
    for (int v : ok) good += v;
    CHECK(good >= 95);
  }
}

TEST_CASE("lyapunov mean descent on the quadratic") {
  auto cfg = ExperimentConfig::from_json_text(R"json({
    "algorithm": "shb",
    "potential": {"kind": "quadratic", "matrix": [[1.0]]},
    "step": {"gamma": 1.0, "beta": 0.75},
    "memory": {"kind": "exponential", "r": 1.0},
    "noise": {"kind": "isotropic_gaussian", "sigma0": 1.0},
    "init": {"x": [1.0]},
    "horizon": 10000,
    "replicas": 500,
    "checkpoints": {"count": 25, "spacing": "log"},
    "seed": {"master": 31337},
    "lyapunov": true
  })json");
  auto res = mc_expected_error(cfg);
  double prev = 1e300;
  for (const auto& row : res.rows) {
    if (row.n < 100) continue;
    REQUIRE(row.mean_v.has_value());
    CHECK(*row.mean_v <= prev * 1.05);
    prev = *row.mean_v;
  }
}

TEST_CASE("averaged SGD reaches the optimal variance sigma0^2/lambda^2") {
  // n E[xbar_n^2] -> 1 for lambda = 1, sigma0 = 1, within 15% at n = 1e5
  auto cfg = ExperimentConfig::from_json_text(R"json({
    "algorithm": "avg_sgd",
    "potential": {"kind": "quadratic", "matrix": [[1.0]]},
    "step": {"gamma": 1.0, "beta": 0.5},
    "memory": {"kind": "exponential", "r": 1.0},
    "noise": {"kind": "isotropic_gaussian", "sigma0": 1.0},
    "init": {"x": [0.0]},
    "horizon": 100000,
    "replicas": 1000,
    "checkpoints": {"count": 8, "spacing": "log"},
    "seed": {"master": 777}
  })json");
  auto res = mc_expected_error(cfg);
  const auto& last = res.rows.back();
  CHECK(last.n == 100000);
  CHECK(std::abs(last.n * last.mse_x - 1.0) < 0.15);
}

TEST_CASE("polynomial memory Y scale: |Y|^2 Gamma_N / gamma_N is order one") {
  auto cfg = ExperimentConfig::from_json_text(R"json({
    "algorithm": "shb",
    "potential": {"kind": "quadratic", "matrix": [[1.0]]},
    "step": {"gamma": 1.0, "beta": 0.5},
    "memory": {"kind": "polynomial", "r": 3.0},
    "noise": {"kind": "isotropic_gaussian", "sigma0": 1.0},
    "init": {"x": [1.0]},
    "horizon": 100000,
    "replicas": 200,
    "checkpoints": {"count": 8, "spacing": "log"},
    "seed": {"master": 99}
  })json");
  auto res = mc_expected_error(cfg);
  StepSchedule sched(1.0, 0.5);
  const double scale = sched.Gamma(100000) / sched.gamma(100000);
  const double v = res.rows.back().mse_y * scale;
  CHECK(v > 0.05);
  CHECK(v < 20.0);
}

TEST_CASE("stepsum bounds hold over the parameter grid") {
  // a in {0.5, 1, 4} x beta in {0.5, 0.7, 1} x b in {0, a^2/10}; gamma
  // chosen so the beta = 1 cases sit in the fast regime (a gamma = 3)
  // N must outlast the transient e^{-a Gamma_n}, which dies slowly when a
  // and beta are both small; 1e6 covers the whole grid
  const std::int64_t N = 1000000;
  for (double a : {0.5, 1.0, 4.0}) {
    for (double beta : {0.5, 0.7, 1.0}) {
      for (double b : {0.0, a * a / 10.0}) {
        const double gamma = beta == 1.0 ? 3.0 / a : 0.1;
        StepSchedule sched(gamma, beta);
        auto rep = stepsum_bound_check(a, b, sched, 1, N);
        INFO("a=", a, " beta=", beta, " b=", b);
        CHECK_FALSE(rep.violated);
        CHECK(rep.settle_index <= N / 2);
        CHECK(rep.final_ratio <= 1.0);
      }
    }
  }
}
