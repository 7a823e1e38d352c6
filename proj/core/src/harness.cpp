#include "shb/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "shb/baselines.hpp"

namespace shb {

int worker_count() {
  if (const char* env = std::getenv("SHB_WORKERS")) {
    const int w = std::atoi(env);
    if (w >= 1) return w;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(int n_tasks, const std::function<void(int)>& body) {
  const int workers = std::min(worker_count(), n_tasks);
  if (workers <= 1) {
    for (int i = 0; i < n_tasks; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr err;
  std::atomic<bool> failed{false};
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= n_tasks || failed.load()) return;
        try {
          body(i);
        } catch (...) {
          if (!failed.exchange(true)) err = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

Vec resolve_minimizer(const Potential& pot) {
  if (pot.minimizer) return *pot.minimizer;
  if (pot.dim != 1)
    throw std::invalid_argument(
        "resolve_minimizer: no stored minimizer and the critical-point "
        "search only covers d = 1");
  const auto roots = critical_points_1d(pot, -kWorkingBoxHalfWidth,
                                        kWorkingBoxHalfWidth, 4001, 1e-10);
  if (roots.empty())
    throw std::runtime_error("resolve_minimizer: no critical point found");
  double best = roots.front();
  double best_f = pot.f1(best);
  for (double rt : roots) {
    const double fr = pot.f1(rt);
    if (fr < best_f) {
      best_f = fr;
      best = rt;
    }
  }
  return Vec{best};
}

namespace {

// Shared per-experiment tables so the per-step cost stays flat: gamma_n is
// pow-heavy and is evaluated once here, not once per replica step.
struct RunPlan {
  const Potential* pot = nullptr;
  const ExperimentConfig* cfg = nullptr;
  StepSchedule sched;
  Vec gammas;  // gammas[n] = gamma_n, n = 1..horizon
  std::vector<std::int64_t> checkpoints;
  Vec x_star;
  double lyap_a = 0.0, lyap_b = 0.0;

  RunPlan(const Potential& p, const ExperimentConfig& c)
      : pot(&p), cfg(&c), sched(c.step_schedule()) {
    gammas.resize(static_cast<size_t>(c.horizon) + 1);
    for (std::int64_t n = 1; n <= c.horizon; ++n)
      gammas[static_cast<size_t>(n)] = sched.gamma(n);
    checkpoints = c.checkpoints.indices(c.horizon);
    x_star = resolve_minimizer(p);
    if (c.record_lyapunov) {
      auto ab = lyapunov_ab(p, c.memory);
      lyap_a = ab.first;
      lyap_b = ab.second;
    }
  }
};

struct ReplicaTrace {
  bool diverged = false;
  Vec err_x;  // |X_n - x*|^2 per checkpoint
  Vec err_y;  // |Y_n|^2 per checkpoint
  Vec v;      // Lyapunov values per checkpoint (when requested)
};

// One SHB replica, writing checkpoint statistics into `out`.
void run_replica_shb(const RunPlan& plan, int replica, ReplicaTrace& out) {
  const ExperimentConfig& cfg = *plan.cfg;
  const Potential& pot = *plan.pot;
  const int d = pot.dim;
  const double gamma1 = plan.gammas[1];
  const bool expo = cfg.memory.kind == MemorySchedule::Kind::Exponential;
  const double rconst = cfg.memory.r;

  RngStream rng(cfg.master_seed, static_cast<std::uint64_t>(replica));
  Vec x = cfg.init_x;
  Vec y(d, 0.0);
  Vec grad(d), dm(d);
  double big_gamma = 0.0;

  size_t cp = 0;
  out.err_x.assign(plan.checkpoints.size(), 0.0);
  out.err_y.assign(plan.checkpoints.size(), 0.0);
  if (cfg.record_lyapunov) out.v.assign(plan.checkpoints.size(), 0.0);

  for (std::int64_t n = 0; n < cfg.horizon; ++n) {
    const double g = plan.gammas[static_cast<size_t>(n + 1)];
    const double rn = expo ? rconst : (n == 0 ? rconst / gamma1 : rconst / big_gamma);
    const double gr = g * rn;

    pot.grad(x, grad);
    sample_increment(cfg.noise, pot, x, rng, dm);
    double mag = 0.0;
    for (int i = 0; i < d; ++i) {
      const double xi = x[i] - g * y[i];
      const double yi = y[i] + gr * (grad[i] - y[i]) + gr * dm[i];
      x[i] = xi;
      y[i] = yi;
      mag = std::max(mag, std::max(std::abs(xi), std::abs(yi)));
    }
    big_gamma += g;
    if (!(mag <= kDivergenceThreshold)) {
      out.diverged = true;
      return;
    }

    if (cp < plan.checkpoints.size() && n + 1 == plan.checkpoints[cp]) {
      double ex = 0.0, ey = 0.0;
      for (int i = 0; i < d; ++i) {
        const double dx = x[i] - plan.x_star[i];
        ex += dx * dx;
        ey += y[i] * y[i];
      }
      out.err_x[cp] = ex;
      out.err_y[cp] = ey;
      if (cfg.record_lyapunov) {
        const double r_prev =
            cfg.memory.r_at(n, big_gamma - g, gamma1);  // r_{n} indexes the
        // V_{n+1} convention: the state after n+1 steps pairs with r_n
        out.v[cp] = lyapunov_value(pot, plan.lyap_a, plan.lyap_b, r_prev, x, y);
      }
      ++cp;
    }
  }
}

void run_replica_baseline(const RunPlan& plan, int replica, ReplicaTrace& out) {
  const ExperimentConfig& cfg = *plan.cfg;
  const Potential& pot = *plan.pot;
  const int d = pot.dim;

  RngStream rng(cfg.master_seed, static_cast<std::uint64_t>(replica));
  BaselineState st = cfg.algorithm.kind == "sgd"   ? BaselineState::sgd(cfg.init_x)
                     : cfg.algorithm.kind == "avg_sgd"
                         ? BaselineState::avg_sgd(cfg.init_x)
                         : BaselineState::nagd(cfg.init_x);
  StepWorkspace ws(d);
  StepSchedule sched = cfg.step_schedule();

  size_t cp = 0;
  out.err_x.assign(plan.checkpoints.size(), 0.0);
  out.err_y.assign(plan.checkpoints.size(), 0.0);

  const bool avg = st.variant == BaselineState::Variant::AvgSgd;
  for (std::int64_t k = 0; k < cfg.horizon; ++k) {
    try {
      baseline_step(st, pot, sched, cfg.noise, rng, ws);
    } catch (const DivergedError&) {
      out.diverged = true;
      return;
    }
    if (cp < plan.checkpoints.size() && k + 1 == plan.checkpoints[cp]) {
      const Vec& ref = avg ? st.aux : st.x;
      double ex = 0.0;
      for (int i = 0; i < d; ++i) {
        const double dx = ref[i] - plan.x_star[i];
        ex += dx * dx;
      }
      out.err_x[cp] = ex;
      ++cp;
    }
  }
}

}  // namespace

McResult mc_expected_error(const ExperimentConfig& cfg) {
  const Potential pot = cfg.potential.build();
  if (static_cast<int>(cfg.init_x.size()) != pot.dim)
    throw ConfigError("init.x dimension does not match the potential");
  RunPlan plan(pot, cfg);

  const int R = cfg.replicas;
  std::vector<ReplicaTrace> traces(R);
  parallel_for(R, [&](int rep) {
    if (cfg.algorithm.kind == "shb")
      run_replica_shb(plan, rep, traces[rep]);
    else
      run_replica_baseline(plan, rep, traces[rep]);
  });

  McResult res;
  res.x_star = plan.x_star;
  res.replicas = R;
  for (const auto& t : traces)
    if (t.diverged) ++res.divergent;
  if (res.divergent * 100 > R) throw DivergenceBudgetError(res.divergent, R);

  const size_t C = plan.checkpoints.size();
  for (size_t c = 0; c < C; ++c) {
    SummaryRow row;
    row.n = plan.checkpoints[c];
    // deterministic reduce in replica order
    double sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0, sv = 0.0, svv = 0.0;
    int m = 0;
    for (int rep = 0; rep < R; ++rep) {
      const auto& t = traces[rep];
      if (t.diverged) continue;
      sx += t.err_x[c];
      sxx += t.err_x[c] * t.err_x[c];
      sy += t.err_y[c];
      syy += t.err_y[c] * t.err_y[c];
      if (cfg.record_lyapunov) {
        sv += t.v[c];
        svv += t.v[c] * t.v[c];
      }
      ++m;
    }
    row.replicas = m;
    if (m > 0) {
      row.mse_x = sx / m;
      row.mse_y = sy / m;
      const double varx = std::max(0.0, sxx / m - row.mse_x * row.mse_x);
      const double vary = std::max(0.0, syy / m - row.mse_y * row.mse_y);
      row.se_x = std::sqrt(varx / m);
      row.se_y = std::sqrt(vary / m);
      if (cfg.record_lyapunov) {
        row.mean_v = sv / m;
        const double varv = std::max(0.0, svv / m - *row.mean_v * *row.mean_v);
        row.se_v = std::sqrt(varv / m);
      }
    }
    res.rows.push_back(row);
  }
  return res;
}

RateFit fit_rate(const std::vector<SummaryRow>& rows, std::int64_t lo,
                 std::int64_t hi, RateSeries series) {
  std::vector<double> xs, ys;
  for (const auto& r : rows) {
    if (r.n < lo || r.n > hi) continue;
    const double v = series == RateSeries::MseX ? r.mse_x : r.mse_y;
    if (!(v > 0.0))
      throw std::invalid_argument(
          "fit_rate: nonpositive mean at n=" + std::to_string(r.n));
    xs.push_back(std::log(static_cast<double>(r.n)));
    ys.push_back(std::log(v));
  }
  if (xs.size() < 5)
    throw std::invalid_argument("fit_rate: need at least 5 checkpoints in window");

  const size_t m = xs.size();
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < m; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (size_t i = 0; i < m; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

CltResult clt_covariance(const ExperimentConfig& cfg) {
  const Potential pot = cfg.potential.build();
  if (static_cast<int>(cfg.init_x.size()) != pot.dim)
    throw ConfigError("init.x dimension does not match the potential");
  if (cfg.algorithm.kind != "shb")
    throw ConfigError("clt_covariance applies to the shb algorithm");
  StepSchedule sched = cfg.step_schedule();
  if (!(sched.gamma(cfg.horizon) <= 0.1 * sched.gamma(1)))
    throw ConfigError(
        "clt_covariance: horizon too small (gamma_n must be <= gamma_1/10)");

  ExperimentConfig local = cfg;
  local.checkpoints.count = 1;
  local.checkpoints.spacing = "linear";
  local.record_lyapunov = false;
  const Potential pot2 = local.potential.build();
  RunPlan plan(pot2, local);

  const int d = pot.dim;
  const int R = cfg.replicas;
  // final rescaled states, 2d per replica
  std::vector<Vec> finals(R);
  std::vector<char> diverged(R, 0);
  const double gN = sched.gamma(cfg.horizon);
  const double inv = 1.0 / std::sqrt(gN);

  parallel_for(R, [&](int rep) {
    const double gamma1 = plan.gammas[1];
    const bool expo = local.memory.kind == MemorySchedule::Kind::Exponential;
    const double rconst = local.memory.r;
    RngStream rng(local.master_seed, static_cast<std::uint64_t>(rep));
    Vec x = local.init_x;
    Vec y(d, 0.0);
    Vec grad(d), dm(d);
    double big_gamma = 0.0;
    for (std::int64_t n = 0; n < local.horizon; ++n) {
      const double g = plan.gammas[static_cast<size_t>(n + 1)];
      const double rn = expo ? rconst : (n == 0 ? rconst / gamma1 : rconst / big_gamma);
      const double gr = g * rn;
      pot.grad(x, grad);
      sample_increment(local.noise, pot, x, rng, dm);
      double mag = 0.0;
      for (int i = 0; i < d; ++i) {
        const double xi = x[i] - g * y[i];
        const double yi = y[i] + gr * (grad[i] - y[i]) + gr * dm[i];
        x[i] = xi;
        y[i] = yi;
        mag = std::max(mag, std::max(std::abs(xi), std::abs(yi)));
      }
      big_gamma += g;
      if (!(mag <= kDivergenceThreshold)) {
        diverged[rep] = 1;
        return;
      }
    }
    Vec z(2 * d);
    for (int i = 0; i < d; ++i) {
      z[i] = (x[i] - plan.x_star[i]) * inv;
      z[d + i] = y[i] * inv;
    }
    finals[rep] = std::move(z);
  });

  CltResult res;
  res.replicas = R;
  for (int rep = 0; rep < R; ++rep)
    if (diverged[rep]) ++res.divergent;
  if (res.divergent * 100 > R) throw DivergenceBudgetError(res.divergent, R);

  const int D2 = 2 * d;
  res.mean.assign(D2, 0.0);
  int m = 0;
  for (int rep = 0; rep < R; ++rep) {
    if (diverged[rep]) continue;
    for (int i = 0; i < D2; ++i) res.mean[i] += finals[rep][i];
    ++m;
  }
  for (int i = 0; i < D2; ++i) res.mean[i] /= m;
  res.covariance = Matrix(D2);
  for (int rep = 0; rep < R; ++rep) {
    if (diverged[rep]) continue;
    for (int i = 0; i < D2; ++i)
      for (int j = 0; j < D2; ++j)
        res.covariance(i, j) +=
            (finals[rep][i] - res.mean[i]) * (finals[rep][j] - res.mean[j]);
  }
  for (int i = 0; i < D2; ++i)
    for (int j = 0; j < D2; ++j) res.covariance(i, j) /= (m - 1);
  return res;
}

TrapResult trap_experiment(const ExperimentConfig& cfg) {
  if (!cfg.trap) throw ConfigError("trap_experiment: config has no 'trap' section");
  const TrapConfig& tc = *cfg.trap;
  if (tc.algorithms.empty()) throw ConfigError("trap.algorithms must be non-empty");
  const Potential pot = cfg.potential.build();
  if (pot.dim != 1) throw ConfigError("trap_experiment: 1-d potentials only");

  TrapResult res;
  const double lo = std::min(tc.init_lo, -kWorkingBoxHalfWidth);
  const double hi = std::max(tc.init_hi, kWorkingBoxHalfWidth);
  res.critical_points = critical_points_1d(pot, lo, hi, 4001, 1e-10);
  if (res.critical_points.empty())
    throw std::runtime_error("trap_experiment: no critical point in range");
  res.x_star = res.critical_points.front();
  for (double rt : res.critical_points)
    if (pot.f1(rt) < pot.f1(res.x_star)) res.x_star = rt;

  const int A = static_cast<int>(tc.algorithms.size());
  const int S = static_cast<int>(tc.sigmas.size());
  const int I = tc.init_count;
  const int R = cfg.replicas;
  StepSchedule sched0 = cfg.step_schedule();

  // success counts indexed (s, i, a)
  std::vector<int> counts(static_cast<size_t>(S) * I * A, 0);

  parallel_for(S * I, [&](int task) {
    const int s = task / I;
    const int i = task % I;
    const double sigma = tc.sigmas[s];
    const double x0 =
        I == 1 ? tc.init_lo
               : tc.init_lo + (tc.init_hi - tc.init_lo) * i / (I - 1.0);
    const NoiseModel noise = sigma > 0.0 ? NoiseModel::isotropic_gaussian(sigma)
                                         : NoiseModel::zero();
    StepSchedule sched = sched0;  // private copy, cursor is mutable
    StepWorkspace ws(1);

    for (int rep = 0; rep < R; ++rep) {
      const std::uint64_t stream =
          (static_cast<std::uint64_t>(s) * I + i) * static_cast<std::uint64_t>(R) + rep;
      for (int a = 0; a < A; ++a) {
        const TrapAlgorithm& ta = tc.algorithms[a];
        RngStream rng(cfg.master_seed, stream);
        double x_final;
        bool ok = true;
        try {
          if (ta.algorithm == "shb") {
            ShbState st = ShbState::init(Vec{x0});
            const MemorySchedule mem = ta.memory ? *ta.memory : cfg.memory;
            for (std::int64_t k = 0; k < cfg.horizon; ++k)
              shb_step_inplace(st, pot, sched, mem, noise, rng, ws);
            x_final = st.x[0];
          } else {
            BaselineState st = ta.algorithm == "sgd" ? BaselineState::sgd(Vec{x0})
                               : ta.algorithm == "avg_sgd"
                                   ? BaselineState::avg_sgd(Vec{x0})
                                   : BaselineState::nagd(Vec{x0});
            for (std::int64_t k = 0; k < cfg.horizon; ++k)
              baseline_step(st, pot, sched, noise, rng, ws);
            x_final = st.variant == BaselineState::Variant::AvgSgd ? st.aux[0]
                                                                   : st.x[0];
          }
        } catch (const DivergedError&) {
          ok = false;
          x_final = 0.0;
        }
        if (ok && std::abs(x_final - res.x_star) <= 1.0)
          counts[(static_cast<size_t>(s) * I + i) * A + a] += 1;
      }
    }
  });

  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < A; ++a) {
      double total = 0.0;
      for (int i = 0; i < I; ++i) {
        const double x0 =
            I == 1 ? tc.init_lo
                   : tc.init_lo + (tc.init_hi - tc.init_lo) * i / (I - 1.0);
        const double rate =
            static_cast<double>(counts[(static_cast<size_t>(s) * I + i) * A + a]) / R;
        res.rows.push_back(TrapRow{tc.algorithms[a].label, tc.sigmas[s], x0, rate});
        total += rate;
      }
      res.init_averaged.push_back(TrapRow{tc.algorithms[a].label, tc.sigmas[s],
                                          std::nan(""), total / I});
    }
  }
  return res;
}

double lyapunov_value(const Potential& pot, double a, double b, double r_prev,
                      std::span<const double> x, std::span<const double> y) {
  if (!(r_prev > 0.0))
    throw std::invalid_argument("lyapunov_value: r_prev must be > 0");
  Vec g(pot.dim);
  pot.grad(x, g);
  return (a + b * r_prev) * pot.f(x) + a / (2.0 * r_prev) * norm2sq(y) -
         b * dot(g, y);
}

std::pair<double, double> lyapunov_ab(const Potential& pot,
                                      const MemorySchedule& mem) {
  if (!pot.c_f)
    throw std::invalid_argument("lyapunov_ab: potential has no c_f constant");
  const double c_r = mem.c_r_limit();
  if (!(c_r < 1.0))
    throw std::invalid_argument(
        "lyapunov_ab: c_r = " + std::to_string(c_r) + " >= 1 violates (H_r)");
  const double bound =
      std::max({0.5, pot.hess_sup_norm / (1.0 - c_r), mem.r_inf() * (*pot.c_f - 1.0)});
  return {2.0 * bound, 1.0};
}

}  // namespace shb
